// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qbsde/bsde.hpp"

namespace qbsde {

enum class ComparisonCondition {
  a1,  // xi_2 >= zeta for some zeta in D
  a2,  // u_{f1} bounded below
};

const char* to_string(ComparisonCondition c) noexcept;

/// Two problems on a shared forward model; they are solved on one path
/// bundle so that Y^1 - Y^2 is a common-random-number estimator.
struct ComparisonCase {
  BsdeProblem p1;
  BsdeProblem p2;
  /// Points where f1 <= f2 is sampled; must be nonempty.
  std::vector<double> f_grid;
  ComparisonCondition condition = ComparisonCondition::a1;
  double zeta = 0.0;  // for a1
  /// Known Y^2_0 - Y^1_0, used to set the strict-gap threshold.
  std::optional<double> expected_gap;

  Engine engine = Engine::quadrature;
  ExactLaw law = ExactLaw::brownian;
  int gh_nodes = 64;
  int degree = 4;
  std::size_t n_paths = 10000;
  std::size_t steps = 20;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct ComparisonReport {
  bool pass = false;
  double max_violation = 0.0;  // max over paths and grid times of Y^1 - Y^2
  double tolerance = 0.0;      // eps_mc
  double Y1_0 = 0.0, Y2_0 = 0.0;
  double se1 = 0.0, se2 = 0.0;
  double strict_fraction = 0.0;  // P(xi_1 < xi_2) on the paths
  bool strict_checked = false;
  bool strict_ok = true;
  double strict_threshold = 0.0;
  std::shared_ptr<const PathBundle> bundle;
  std::vector<double> path_gap;  // per path max_t (Y^1_t - Y^2_t)

  std::string to_text() const;
};

/// Verifies the ordering evidence, then solves both problems on shared paths.
/// PASS iff max (Y^1 - Y^2) <= 3 pooled SE (1e-9 for the deterministic
/// engine). Throws PreconditionError when the evidence fails.
ComparisonReport compare(const ComparisonCase& c);

struct ConverseParams {
  double T = 1.0;
  std::size_t steps = 200;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Points sampled on [y - K, y + K] for the Theta_n check and the
  /// Lipschitz estimate.
  int check_points = 401;
};

enum class ConverseVerdict { contradiction_found, bound_violated };
const char* to_string(ConverseVerdict v) noexcept;

struct ConverseReport {
  ConverseVerdict verdict = ConverseVerdict::bound_violated;
  std::vector<std::size_t> tau;  // stopping index per path
  std::vector<double> gap;       // Y^1_tau - Y^2_tau
  std::vector<double> bound;     // |z|^2 tau / (2n) - slack
  double lipschitz = 0.0;
  double slack = 0.0;
  double min_margin = 0.0;  // min over paths of gap - bound
  double fraction_ok = 0.0;
  std::shared_ptr<const PathBundle> y1;
  std::shared_ptr<const PathBundle> y2;

  std::string to_text() const;
};

/// Simulates Y^i_t = y - int f_i(Y^i)|z|^2 ds + z B_t with shared increments,
/// stops at tau = tau^1 ^ tau^2 ^ tau^3 ^ T and checks on every path that
/// Y^1_tau - Y^2_tau >= |z|^2 tau / (2n) - L |z|^2 D T. Throws
/// PreconditionError if [y - K, y + K] is not inside D and the closure of
/// Theta_n = {f1 < f2 - 1/n}, or if tau = 0 on some path.
ConverseReport converse_experiment(const Generator& f1, const Generator& f2, double y, double z, double K,
                                   int n, const ConverseParams& params = {});

/// path,tau,gap,bound
void write_converse_csv(std::ostream& os, const ConverseReport& r);

}  // namespace qbsde
