// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qbsde::selftest {

struct Options {
  std::uint64_t seed = 20260101;
  unsigned workers = 1;
  /// Randomized instances per property suite.
  int instances = 200;
  /// Criterion ids to run (1..8); empty runs all of them.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct PropertyResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  std::string first_failure;  // empty when every instance passed
  double seconds = 0.0;
};

/// Names of the property suites, in run order.
const std::vector<std::string>& property_names();

/// Runs one property suite on opts.instances randomized instances drawn from
/// opts.seed. Throws ConfigError on an unknown name.
PropertyResult run_property(const std::string& name, const Options& opts);

std::vector<PropertyResult> run_properties(const Options& opts);

/// Criteria 1..8; 8 aggregates run_properties. Exceptions thrown inside a
/// criterion are reported as a failure with the message as detail.
CriterionResult run_criterion(int id, const Options& opts);

std::vector<CriterionResult> run_acceptance(const Options& opts);

/// "PASS  [n] name (1.23 s) detail"
std::string format_line(const CriterionResult& r);
std::string format_line(const PropertyResult& r);

}  // namespace qbsde::selftest
