// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "qbsde/generator.hpp"
#include "qbsde/interval.hpp"

namespace qbsde {

struct TransformOptions {
  /// Relative tolerance for every integral and for evaluations.
  double tol = 1e-11;
  /// Target node count of the tabulated grid.
  int grid_nodes = 2048;
  /// Partial sums beyond this magnitude count as divergence of V's end.
  double divergence_cap = 1e12;
  /// Use the generator's exact formula when it has one.
  bool use_closed_form = true;
};

/// Affine relation u^alpha = a * u^beta + b between two base points.
struct AffineCoefficients {
  double a = 1.0;
  double b = 0.0;
};

struct TableRow {
  double x;
  double u;
  double uprime;
};

/// The integrability transform
///
///     u(x) = int_alpha^x exp(2 int_alpha^y f(z) dz) dy,
///
/// which satisfies u'' = 2 f u' and turns BSDE(f(y)|z|^2, xi) into a pure
/// conditional expectation. Immutable after construction; copies share
/// state and are safe to use from several threads.
class Transform {
 public:
  enum class Representation { closed_form, tabulated };

  Transform() = default;

  double u(double x) const;
  /// Always positive where it does not underflow.
  double u_prime(double x) const;
  /// 2 f(x) u'(x).
  double u_second(double x) const;
  /// Throws RangeError unless y lies in V.
  double u_inv(double y) const;

  AffineCoefficients change_base_point(double beta) const;

  /// Checks the exponential lower (f >= beta > 0) and/or upper (f <= -beta)
  /// bound at x. Throws UnsupportedError if the generator declares neither.
  bool exp_bound_check(double x) const;

  double base_point() const;
  const Generator& generator() const;
  const OpenInterval& domain() const;
  /// V = u(D).
  const OpenInterval& range() const;
  Representation representation() const;
  double tol() const;
  /// True for transforms loaded from a CSV table (interpolation only).
  bool imported() const;
  bool valid() const noexcept { return static_cast<bool>(impl_); }

  /// Grid nodes with u and u' (a sampled grid for closed forms).
  std::vector<TableRow> table() const;

  void write_csv(std::ostream& os) const;
  /// Loads a table written by write_csv. Evaluation is by monotone cubic
  /// interpolation on [x_0, x_n]; the base point is where u crosses 0.
  static Transform read_csv(std::istream& is);

  struct Impl;

 private:
  explicit Transform(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend Transform build_transform(const Generator&, double, const TransformOptions&);

  std::shared_ptr<const Impl> impl_;
};

const char* to_string(Transform::Representation r) noexcept;

/// Throws DomainError if alpha is outside D and NotLocallyIntegrableError if
/// the inner integral fails on a compact piece of D.
Transform build_transform(const Generator& gen, double alpha, const TransformOptions& opts = {});
Transform build_transform(const Generator& gen, double alpha, double tol,
                          std::optional<int> grid_hint = std::nullopt);

/// Compact window well inside D used for sampling checks.
ClosedInterval sample_window(const OpenInterval& d, double alpha);

struct InvariantReport {
  bool monotone = true;
  double max_roundtrip_error = 0.0;   // |u_inv(u(x)) - x| / max(1,|x|)
  double max_ode_residual = 0.0;      // relative, central differences
  double max_affine_error = 0.0;      // |u^a - (a u^b + b)| / max(1,|u^a|)
  bool ok = true;
};

/// Deterministic self-check of monotonicity, round trip, u'' = 2 f u' and
/// the affine base-point relation on n points of sample_window.
InvariantReport check_invariants(const Transform& t, int n = 257);

}  // namespace qbsde
