// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/terminal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbsde/errors.hpp"
#include "qbsde/expr.hpp"

namespace qbsde::terminal {

TerminalMap identity() {
  TerminalMap t;
  t.name = "identity";
  t.g = [](double x) { return x; };
  return t;
}

TerminalMap affine(double a, double b) {
  TerminalMap t;
  t.name = "affine " + format_double(a) + " " + format_double(b);
  t.g = [a, b](double x) { return a * x + b; };
  if (a == 0.0) {
    t.image = ClosedInterval{b, b};
    t.levels = {b};
  }
  return t;
}

TerminalMap exponential(double s) {
  TerminalMap t;
  t.name = "exp " + format_double(s);
  t.g = [s](double x) { return std::exp(s * x); };
  return t;
}

TerminalMap constant(double k) {
  TerminalMap t;
  t.name = "constant " + format_double(k);
  t.g = [k](double) { return k; };
  t.image = ClosedInterval{k, k};
  t.levels = {k};
  return t;
}

TerminalMap two_point(double c1, double c2, double theta) {
  TerminalMap t;
  t.name = "two_point " + format_double(c1) + " " + format_double(c2) + " " + format_double(theta);
  t.g = [c1, c2, theta](double x) { return x < theta ? c1 : c2; };
  t.smooth = false;
  t.breakpoints = {theta};
  t.levels = {c1, c2};
  t.image = ClosedInterval{std::min(c1, c2), std::max(c1, c2)};
  return t;
}

TerminalMap expression(std::string_view text) {
  TerminalMap t;
  t.name = "expr " + std::string(text);
  auto e = Expression::parse(text, {"x"});
  t.g = [e](double x) { return e(x); };
  return t;
}

}  // namespace qbsde::terminal

namespace qbsde {

TerminalMap parse_terminal(std::string_view spec) {
  std::istringstream is{std::string(spec)};
  std::string kind;
  is >> kind;
  auto number = [&](const char* what) {
    std::string tok;
    if (!(is >> tok)) throw ConfigError("terminal '" + kind + "' needs " + what);
    try {
      return parse_double(tok);
    } catch (const std::exception&) {
      throw ConfigError("terminal '" + kind + "': bad number '" + tok + "' for " + what);
    }
  };
  TerminalMap out;
  if (kind == "identity") {
    out = terminal::identity();
  } else if (kind == "affine") {
    const double a = number("slope");
    out = terminal::affine(a, number("intercept"));
  } else if (kind == "exp") {
    out = terminal::exponential(number("rate"));
  } else if (kind == "constant") {
    out = terminal::constant(number("value"));
  } else if (kind == "two_point") {
    const double c1 = number("c1");
    const double c2 = number("c2");
    out = terminal::two_point(c1, c2, number("theta"));
  } else if (kind == "expr") {
    std::string rest;
    std::getline(is, rest);
    const auto b = rest.find_first_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("terminal 'expr' needs an expression in x");
    return terminal::expression(rest.substr(b));
  } else {
    throw ConfigError("unknown terminal map '" + kind +
                      "' (identity, affine, exp, constant, two_point, expr)");
  }
  std::string extra;
  if (is >> extra) throw ConfigError("terminal '" + kind + "': unexpected token '" + extra + "'");
  return out;
}

}  // namespace qbsde
