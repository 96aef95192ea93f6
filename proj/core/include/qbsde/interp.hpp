// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace qbsde {

/// Piecewise cubic Hermite interpolant through increasing data, with slopes
/// limited (Fritsch-Carlson) so that monotone data stays monotone.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  /// xs strictly increasing, ys nondecreasing. When slopes is empty the
  /// three-point PCHIP estimate is used. Throws ValidationError.
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes = {});

  double operator()(double x) const;
  double derivative(double x) const;
  /// Solves p(x) = y by bisection inside the bracketing cell; clamps to the
  /// data range.
  double inverse(double y) const;
  /// Index i with xs[i] <= x < xs[i+1], clamped to the valid cell range.
  std::size_t cell(double x) const;
  /// Same for the value axis.
  std::size_t value_cell(double y) const;

  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }
  const std::vector<double>& slopes() const noexcept { return d_; }
  bool empty() const noexcept { return xs_.empty(); }

 private:
  double eval_cell(std::size_t i, double x) const;

  std::vector<double> xs_, ys_, d_;
};

}  // namespace qbsde
