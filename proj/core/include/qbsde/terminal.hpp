// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbsde/interval.hpp"

namespace qbsde {

/// xi = g(X_T). Piecewise-constant maps carry their levels so expectations
/// against Gaussian laws can be taken exactly; `breakpoints` lists every
/// discontinuity of g.
struct TerminalMap {
  std::string name;
  std::function<double(double)> g;
  bool smooth = true;
  std::vector<double> breakpoints;  // sorted
  /// For piecewise-constant g: levels[i] on (breakpoints[i-1], breakpoints[i]).
  std::vector<double> levels;
  /// Image of g when known in closed form.
  std::optional<ClosedInterval> image;

  double operator()(double x) const { return g(x); }
  bool piecewise_constant() const noexcept { return !levels.empty(); }
};

namespace terminal {

TerminalMap identity();
TerminalMap affine(double a, double b);
TerminalMap exponential(double s);  // g(x) = e^{s x}
TerminalMap constant(double k);
/// c1 on x < theta, c2 on x >= theta.
TerminalMap two_point(double c1, double c2, double theta);
/// Expression in x; assumed smooth.
TerminalMap expression(std::string_view text);

}  // namespace terminal

/// "identity", "affine A B", "exp S", "constant K", "two_point C1 C2 THETA",
/// or "expr TEXT". Throws ConfigError.
TerminalMap parse_terminal(std::string_view spec);

}  // namespace qbsde
