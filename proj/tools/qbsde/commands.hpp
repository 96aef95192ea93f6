// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "config.hpp"

namespace qbsde::cli {

/// Exit codes. Library errors map onto 1-3 by kind; 4 is reserved for
/// verdicts that contradict a theorem (comparison FAIL, converse bound
/// violated, selftest failure).
enum ExitCode : int { kOk = 0, kConfig = 1, kPrecondition = 2, kNumerical = 3, kTheoremViolation = 4 };

struct RunOptions {
  std::uint64_t seed = 20260101;
  unsigned workers = 1;
  std::filesystem::path out = "qbsde-out";
  bool dump_paths = false;
  std::ostream* log = nullptr;
};

/// Reads [run]; command-line flags must already be applied as overrides.
RunOptions read_run_options(Config& cfg, std::ostream& log);

int cmd_transform(Config& cfg, const RunOptions& run);
int cmd_classify(Config& cfg, const RunOptions& run);
int cmd_solve(Config& cfg, const RunOptions& run);
int cmd_compare(Config& cfg, const RunOptions& run);
int cmd_converse(Config& cfg, const RunOptions& run);
int cmd_pde(Config& cfg, const RunOptions& run);
int cmd_selftest(Config& cfg, const RunOptions& run);

}  // namespace qbsde::cli
