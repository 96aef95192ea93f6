// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>

namespace qbsde {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi) on the extended real line. Either end may be
/// infinite. Used both for the generator domain and for the transform range.
class OpenInterval {
 public:
  /// The whole real line.
  OpenInterval() = default;
  /// Throws ValidationError unless lo < hi.
  OpenInterval(double lo, double hi);

  static OpenInterval real_line() { return {}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  bool contains(double x) const noexcept { return lo_ < x && x < hi_; }
  bool lower_finite() const noexcept { return std::isfinite(lo_); }
  bool upper_finite() const noexcept { return std::isfinite(hi_); }
  bool bounded() const noexcept { return lower_finite() && upper_finite(); }
  double width() const noexcept { return hi_ - lo_; }

  /// Interval shrunk inward by rel·max(1,|endpoint|) at each finite end.
  OpenInterval shrunk(double rel) const;

  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;

 private:
  double lo_ = -kInf;
  double hi_ = kInf;
};

/// Closed, finite interval [lo, hi] with lo <= hi.
struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

/// Default base point: midpoint of a bounded domain, 0 when it lies in the
/// domain, else one unit inside the finite end.
double default_base_point(const OpenInterval& d);

/// Formats a double at full (17 significant digit) precision; infinities as
/// "inf" / "-inf".
std::string format_double(double x);

/// Parses a double, accepting "inf", "+inf", "-inf".
double parse_double(const std::string& text);

std::string to_string(const OpenInterval& d);
std::ostream& operator<<(std::ostream& os, const OpenInterval& d);

}  // namespace qbsde
