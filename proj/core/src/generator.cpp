// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/generator.hpp"

#include <cmath>
#include <sstream>

#include "qbsde/errors.hpp"
#include "qbsde/expr.hpp"

namespace qbsde {

const char* to_string(SignClass s) noexcept {
  switch (s) {
    case SignClass::nonnegative: return "nonnegative";
    case SignClass::nonpositive: return "nonpositive";
    case SignClass::mixed: return "mixed";
  }
  return "mixed";
}

SignClass parse_sign_class(std::string_view text) {
  if (text == "nonnegative") return SignClass::nonnegative;
  if (text == "nonpositive") return SignClass::nonpositive;
  if (text == "mixed") return SignClass::mixed;
  throw ConfigError("unknown sign class '" + std::string(text) +
                    "' (expected nonnegative, nonpositive or mixed)");
}

void Generator::validate() const {
  if (!f) throw ValidationError("generator '" + name + "' has no function");
  if (sign_class == SignClass::nonnegative && lower_bound && *lower_bound < 0.0) {
    throw ValidationError("generator '" + name +
                          "': nonnegative sign class with negative lower bound");
  }
  if (sign_class == SignClass::nonpositive && upper_bound && *upper_bound > 0.0) {
    throw ValidationError("generator '" + name +
                          "': nonpositive sign class with positive upper bound");
  }
  if (lower_bound && upper_bound && *lower_bound > *upper_bound) {
    throw ValidationError("generator '" + name + "': lower bound exceeds upper bound");
  }
  if (sign_class == SignClass::nonnegative && upper_bound && *upper_bound < 0.0) {
    throw ValidationError("generator '" + name +
                          "': nonnegative sign class with negative upper bound");
  }
  if (sign_class == SignClass::nonpositive && lower_bound && *lower_bound > 0.0) {
    throw ValidationError("generator '" + name +
                          "': nonpositive sign class with positive lower bound");
  }
}

Generator restrict_domain(Generator gen, const OpenInterval& sub) {
  if (sub.lo() < gen.domain.lo() || sub.hi() > gen.domain.hi()) {
    throw ValidationError("domain " + to_string(sub) + " is not inside " +
                          to_string(gen.domain) + " for generator '" + gen.name + "'");
  }
  gen.domain = sub;
  return gen;
}

Generator expression_generator(std::string_view expr, const OpenInterval& domain) {
  auto compiled = Expression::parse(expr, {"y"});
  Generator g;
  g.name = std::string(expr);
  g.f = [compiled](double y) { return compiled(y); };
  g.domain = domain;
  g.sign_class = SignClass::mixed;
  return g;
}

namespace builtin {

Generator constant(double c) {
  Generator g;
  std::ostringstream os;
  os << "const " << format_double(c);
  g.name = os.str();
  g.f = [c](double) { return c; };
  g.antiderivative = [c](double y) { return c * y; };
  g.closed_form = [c](double alpha) {
    TransformFormula tf;
    if (c == 0.0) {
      tf.u = [alpha](double x) { return x - alpha; };
      tf.u_prime = [](double) { return 1.0; };
      tf.u_inv = [alpha](double y) { return y + alpha; };
    } else {
      const double k = 2.0 * c;
      tf.u = [alpha, k](double x) { return std::expm1(k * (x - alpha)) / k; };
      tf.u_prime = [alpha, k](double x) { return std::exp(k * (x - alpha)); };
      tf.u_inv = [alpha, k](double y) { return alpha + std::log1p(k * y) / k; };
    }
    return tf;
  };
  g.sign_class = c > 0 ? SignClass::nonnegative
                       : (c < 0 ? SignClass::nonpositive : SignClass::nonnegative);
  g.lower_bound = c;
  g.upper_bound = c;
  g.locally_bounded = true;
  return g;
}

Generator delta_over_y(double delta) {
  Generator g;
  g.name = "delta_over_y " + format_double(delta);
  g.f = [delta](double y) { return delta / y; };
  g.domain = OpenInterval(0.0, kInf);
  g.antiderivative = [delta](double y) { return delta * std::log(y); };
  g.closed_form = [delta](double alpha) {
    TransformFormula tf;
    const double p = 2.0 * delta + 1.0;
    tf.u_prime = [alpha, delta](double x) { return std::exp(2.0 * delta * std::log(x / alpha)); };
    if (p == 0.0) {
      tf.u = [alpha](double x) { return alpha * std::log(x / alpha); };
      tf.u_inv = [alpha](double y) { return alpha * std::exp(y / alpha); };
    } else {
      tf.u = [alpha, p](double x) { return alpha / p * std::expm1(p * std::log(x / alpha)); };
      tf.u_inv = [alpha, p](double y) { return alpha * std::exp(std::log1p(p * y / alpha) / p); };
    }
    return tf;
  };
  if (delta >= 0) {
    g.sign_class = SignClass::nonnegative;
    g.lower_bound = 0.0;
  } else {
    g.sign_class = SignClass::nonpositive;
    g.upper_bound = 0.0;
  }
  g.locally_bounded = true;
  return g;
}

Generator half_over_y() {
  Generator g = delta_over_y(0.5);
  g.name = "half_over_y";
  return g;
}

Generator abs_log_over_y() {
  Generator g;
  g.name = "abs_log_over_y";
  g.f = [](double y) { return std::abs(std::log(y)) / y; };
  g.domain = OpenInterval(0.0, kInf);
  g.antiderivative = [](double y) {
    const double l = std::log(y);
    return 0.5 * l * std::abs(l);
  };
  g.sign_class = SignClass::nonnegative;
  g.lower_bound = 0.0;
  g.locally_bounded = true;
  return g;
}

Generator inv_y_squared_plus_one() {
  Generator g;
  g.name = "inv_y_squared_plus_one";
  g.f = [](double y) { return 1.0 / (y * y) + 1.0; };
  g.domain = OpenInterval(0.0, kInf);
  g.antiderivative = [](double y) { return y - 1.0 / y; };
  g.sign_class = SignClass::nonnegative;
  g.lower_bound = 1.0;
  g.locally_bounded = true;
  return g;
}

Generator neg_inv_quadratic() {
  Generator g;
  g.name = "neg_inv_(y-1)(y-6)";
  g.f = [](double y) { return -1.0 / ((y - 1.0) * (y - 6.0)); };
  g.domain = OpenInterval(1.0, 6.0);
  // Partial fractions: f = (1/5) (1/(y-1) + 1/(6-y)).
  g.antiderivative = [](double y) { return 0.2 * (std::log(y - 1.0) - std::log(6.0 - y)); };
  g.sign_class = SignClass::nonnegative;
  g.lower_bound = 1.0 / 6.25;  // attained at y = 3.5
  g.locally_bounded = true;
  return g;
}

}  // namespace builtin

Generator parse_builtin(std::string_view spec) {
  std::istringstream is{std::string(spec)};
  std::string name;
  is >> name;
  auto read_param = [&](const char* what) {
    std::string tok;
    if (!(is >> tok)) throw ConfigError("builtin '" + name + "' needs a parameter " + what);
    return parse_double(tok);
  };
  Generator g;
  if (name == "const") {
    g = builtin::constant(read_param("c"));
  } else if (name == "half_over_y") {
    g = builtin::half_over_y();
  } else if (name == "delta_over_y") {
    g = builtin::delta_over_y(read_param("delta"));
  } else if (name == "abs_log_over_y") {
    g = builtin::abs_log_over_y();
  } else if (name == "inv_y_squared_plus_one") {
    g = builtin::inv_y_squared_plus_one();
  } else if (name == "neg_inv_(y-1)(y-6)" || name == "neg_inv_quadratic") {
    g = builtin::neg_inv_quadratic();
  } else {
    throw ConfigError("unknown builtin generator '" + name + "'");
  }
  std::string extra;
  if (is >> extra) throw ConfigError("unexpected token '" + extra + "' after builtin " + name);
  return g;
}

BoundCheck verify_declared_bounds(const Generator& gen, double a, double b, int n) {
  if (!(a < b) || !gen.domain.contains(a) || !gen.domain.contains(b)) {
    throw DomainError("bound check interval [" + format_double(a) + ", " + format_double(b) +
                      "] must lie inside " + to_string(gen.domain));
  }
  BoundCheck out;
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = a + i * h;
    bool skip = false;
    for (double s : gen.singular_points) {
      if (std::abs(x - s) <= 1e-9 * std::max(1.0, std::abs(s))) skip = true;
    }
    if (skip) continue;
    const double v = gen.f(x);
    std::string why;
    if (!std::isfinite(v)) {
      why = "non-finite value";
    } else if (gen.lower_bound && v < *gen.lower_bound - 1e-12 * std::max(1.0, std::abs(*gen.lower_bound))) {
      why = "below declared lower bound " + format_double(*gen.lower_bound);
    } else if (gen.upper_bound && v > *gen.upper_bound + 1e-12 * std::max(1.0, std::abs(*gen.upper_bound))) {
      why = "above declared upper bound " + format_double(*gen.upper_bound);
    } else if (gen.sign_class == SignClass::nonnegative && v < 0) {
      why = "negative value for nonnegative generator";
    } else if (gen.sign_class == SignClass::nonpositive && v > 0) {
      why = "positive value for nonpositive generator";
    }
    if (!why.empty()) {
      out.ok = false;
      out.worst_x = x;
      out.worst_value = v;
      out.message = "f(" + format_double(x) + ") = " + format_double(v) + ": " + why;
      return out;
    }
  }
  return out;
}

}  // namespace qbsde
