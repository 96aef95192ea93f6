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

using RealFn = std::function<double(double)>;

enum class SignClass { nonnegative, nonpositive, mixed };

const char* to_string(SignClass s) noexcept;
SignClass parse_sign_class(std::string_view text);

/// Exact u, u' and u^{-1} for a fixed base point.
struct TransformFormula {
  RealFn u;
  RealFn u_prime;
  RealFn u_inv;
};

/// The coefficient f of the quadratic driver f(y)|z|^2 together with the
/// metadata the rest of the toolkit relies on.
struct Generator {
  std::string name;
  RealFn f;
  OpenInterval domain;
  /// F with F' = f, when a closed form is known.
  RealFn antiderivative;
  /// Exact transform for a given base point, when one is known.
  std::function<TransformFormula(double alpha)> closed_form;
  SignClass sign_class = SignClass::mixed;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  bool locally_bounded = true;
  /// Points of D where f may blow up; excluded from sampling checks.
  std::vector<double> singular_points;

  double operator()(double y) const { return f(y); }

  bool has_antiderivative() const noexcept { return static_cast<bool>(antiderivative); }
  bool has_closed_form() const noexcept { return static_cast<bool>(closed_form); }

  /// Checks metadata consistency (sign class vs bounds, bounds ordering).
  /// Throws ValidationError.
  void validate() const;
};

/// Same generator on a sub-interval of its domain.
Generator restrict_domain(Generator gen, const OpenInterval& sub);

/// Generator with f replaced by an expression in y; no antiderivative.
Generator expression_generator(std::string_view expr, const OpenInterval& domain);

/// Parses a builtin spec such as "const 0.5", "half_over_y",
/// "delta_over_y 1", "abs_log_over_y", "inv_y_squared_plus_one",
/// "neg_inv_(y-1)(y-6)". Throws ConfigError on unknown names.
Generator parse_builtin(std::string_view spec);

namespace builtin {
/// f == c on the real line.
Generator constant(double c);
/// f(y) = delta / y on (0, inf).
Generator delta_over_y(double delta);
/// f(y) = 1 / (2y) on (0, inf).
Generator half_over_y();
/// f(y) = |ln y| / y on (0, inf).
Generator abs_log_over_y();
/// f(y) = 1/y^2 + 1 on (0, inf).
Generator inv_y_squared_plus_one();
/// f(y) = -1 / ((y-1)(y-6)) on (1, 6).
Generator neg_inv_quadratic();
}  // namespace builtin

struct BoundCheck {
  bool ok = true;
  double worst_x = 0.0;
  double worst_value = 0.0;
  std::string message;
};

/// Samples f on a uniform grid of [a, b] (which must lie in D) and checks
/// declared bounds and sign class, skipping declared singular points.
BoundCheck verify_declared_bounds(const Generator& gen, double a, double b, int n = 4097);

}  // namespace qbsde
