// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/interp.hpp"

#include <algorithm>
#include <cmath>

#include "qbsde/errors.hpp"

namespace qbsde {

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys,
                             std::vector<double> slopes)
    : xs_(std::move(xs)), ys_(std::move(ys)), d_(std::move(slopes)) {
  const std::size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) throw ValidationError("monotone cubic needs >= 2 matching points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw ValidationError("monotone cubic abscissae must increase");
    if (ys_[i] < ys_[i - 1]) throw ValidationError("monotone cubic data must be nondecreasing");
  }
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);

  if (d_.empty()) {
    d_.assign(n, 0.0);
    d_[0] = delta[0];
    d_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0) continue;
      const double h0 = xs_[i] - xs_[i - 1];
      const double h1 = xs_[i + 1] - xs_[i];
      const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  } else if (d_.size() != n) {
    throw ValidationError("monotone cubic slope count mismatch");
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    const double a = d_[i] / delta[i];
    const double b = d_[i + 1] / delta[i];
    if (a < 0) d_[i] = 0.0;
    if (b < 0) d_[i + 1] = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      d_[i] = tau * a * delta[i];
      d_[i + 1] = tau * b * delta[i];
    }
  }
}

std::size_t MonotoneCubic::cell(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(i, xs_.size() - 2);
}

std::size_t MonotoneCubic::value_cell(double y) const {
  auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
  std::size_t i = it == ys_.begin() ? 0 : static_cast<std::size_t>(it - ys_.begin()) - 1;
  return std::min(i, ys_.size() - 2);
}

double MonotoneCubic::eval_cell(std::size_t i, double x) const {
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
         (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

double MonotoneCubic::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front() + d_.front() * (x - xs_.front());
  if (x >= xs_.back()) return ys_.back() + d_.back() * (x - xs_.back());
  return eval_cell(cell(x), x);
}

double MonotoneCubic::derivative(double x) const {
  if (x <= xs_.front()) return d_.front();
  if (x >= xs_.back()) return d_.back();
  const std::size_t i = cell(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * ys_[i] + (3 * t2 - 4 * t + 1) * d_[i] +
         (-6 * t2 + 6 * t) / h * ys_[i + 1] + (3 * t2 - 2 * t) * d_[i + 1];
}

double MonotoneCubic::inverse(double y) const {
  if (y <= ys_.front()) return xs_.front();
  if (y >= ys_.back()) return xs_.back();
  const std::size_t i = value_cell(y);
  double lo = xs_[i], hi = xs_[i + 1];
  while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (eval_cell(i, mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qbsde
