// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/interval.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "qbsde/errors.hpp"

namespace qbsde {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::validation: return "validation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::not_locally_integrable: return "not-locally-integrable";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::inapplicable: return "inapplicable";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::simulation: return "simulation";
    case ErrorKind::regression: return "regression";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

OpenInterval::OpenInterval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw ValidationError("open interval requires lo < hi, got " +
                          format_double(lo) + ", " + format_double(hi));
  }
}

OpenInterval OpenInterval::shrunk(double rel) const {
  double lo = lo_;
  double hi = hi_;
  if (lower_finite()) lo += rel * std::max(1.0, std::abs(lo_));
  if (upper_finite()) hi -= rel * std::max(1.0, std::abs(hi_));
  if (!(lo < hi)) {
    const double mid = 0.5 * (lo_ + hi_);
    return OpenInterval(std::nextafter(mid, -kInf), std::nextafter(mid, kInf));
  }
  return OpenInterval(lo, hi);
}

double default_base_point(const OpenInterval& d) {
  if (d.bounded()) return 0.5 * (d.lo() + d.hi());
  if (d.contains(0.0)) return 0.0;
  if (d.lower_finite()) return d.lo() + 1.0;
  return d.hi() - 1.0;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  std::string s = text;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
  if (s == "-inf" || s == "-infinity") return -kInf;
  if (s.empty()) throw ConfigError("expected a number, got an empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

std::string to_string(const OpenInterval& d) {
  return "(" + format_double(d.lo()) + ", " + format_double(d.hi()) + ")";
}

std::ostream& operator<<(std::ostream& os, const OpenInterval& d) {
  return os << to_string(d);
}

}  // namespace qbsde
