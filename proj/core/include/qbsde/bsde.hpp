// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qbsde/generator.hpp"
#include "qbsde/sde.hpp"
#include "qbsde/terminal.hpp"
#include "qbsde/transform.hpp"

namespace qbsde {

enum class Engine { quadrature, regression };

const char* to_string(Engine e) noexcept;

/// BSDE(f(y)|z|^2, g(X_T)) with X started at (t0, x0).
struct BsdeProblem {
  Generator generator;
  Transform transform;
  TerminalMap terminal;
  ForwardModel forward;
  double T = 1.0;
  double t0 = 0.0;
  double x0 = 0.0;
};

/// Checks g(X_T) in D and u(g(X_T)) finite on 1000 pilot paths drawn with a
/// fixed internal seed. Throws DomainError naming the offending state.
void check_terminal_domain(const BsdeProblem& p);

/// E[h(X_T) | X_t = x] under the forward model's exact law. Gauss-Hermite
/// with `nodes` points for smooth h, accepted when it agrees with the
/// nodes/2 rule to 1e-11; adaptive Gauss-Kronrod on |z| <= 12, split at the
/// images of `breakpoints`, otherwise.
double gaussian_expectation(const ForwardModel& fwd, double tau, double x,
                            const std::function<double(double)>& h,
                            std::span<const double> breakpoints, int nodes);

/// Deterministic value function of the quadrature engine:
///   y(t,x) = E[u(g(X_T)) | X_t = x],  Y = u^{-1}(y),
///   z = sigma(t,x) dy/dx (central difference, h = 1e-5 max(1,|x|)),
///   Z = z / u'(Y).
class QuadratureValue {
 public:
  QuadratureValue(const BsdeProblem& p, ExactLaw law, int nodes = 64);

  double y(double t, double x) const;
  double z(double t, double x) const;
  double Y(double t, double x) const;
  double Z(double t, double x) const;
  /// E[xi | X_t = x], the Jensen reference.
  double conditional_mean(double t, double x) const;
  const BsdeProblem& problem() const { return p_; }

 private:
  double h(double x) const;
  double inverse(double y, double t, double x) const;

  BsdeProblem p_;
  int nodes_;
  std::vector<double> level_u_;  // u at each level of a piecewise-constant g
};

struct ValueGrid {
  std::vector<double> times;
  std::vector<double> xs;
  // times.size() x xs.size(), row-major by time.
  std::vector<double> y, Y, Z;
  double at(const std::vector<double>& v, std::size_t i, std::size_t j) const {
    return v[i * xs.size() + j];
  }
};

struct BsdeSolution {
  std::string engine;  // "quadrature" or "regression"
  std::vector<double> times;
  /// Paths the per-path arrays refer to; null when none were requested.
  std::shared_ptr<const PathBundle> bundle;
  // N x (m+1), row-major by path.
  std::vector<double> y, Y, Z;
  ValueGrid surface;
  double y0 = 0.0, Y0 = 0.0, Z0 = 0.0;
  double se_y0 = 0.0, se_Y0 = 0.0;
  /// Regression: two-fold cross-validated RMS fit error per time.
  std::vector<double> cv_error;
  /// Regression: fitted values clipped back into V / into the hull of the
  /// terminal values.
  std::size_t clipped_to_V = 0;
  std::size_t clamped_to_hull = 0;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  double Yp(std::size_t path, std::size_t k) const { return Y[path * times.size() + k]; }
  double Zp(std::size_t path, std::size_t k) const { return Z[path * times.size() + k]; }
  double yp(std::size_t path, std::size_t k) const { return y[path * times.size() + k]; }
};

struct QuadratureOptions {
  int nodes = 64;
  /// Surface grid; defaults to the single node (t0, x0).
  std::vector<double> times;
  std::vector<double> xs;
  unsigned workers = 1;
};

/// Exact-law engine. With a bundle, Y and Z are also evaluated along every
/// path. Throws ConfigError if the forward model does not follow `law` and
/// RangeError naming (t, x) if y leaves V.
BsdeSolution solve_quadrature(const BsdeProblem& p, ExactLaw law, const QuadratureOptions& opts = {},
                              std::shared_ptr<const PathBundle> bundle = nullptr);

struct RegressionOptions {
  int degree = 4;
  /// Clamp fitted y to [min, max] of u(xi) over the paths; a conditional
  /// expectation cannot leave that hull.
  bool hull_clamp = true;
  unsigned workers = 1;
};

/// Least-squares Monte Carlo: at each grid time, u(g(X_T)) is projected on
/// polynomials in X_t. Throws PreconditionError if N < 10 (degree + 1),
/// RegressionError on a rank-deficient design and RangeError when more than
/// 0.1% of the fitted values at some time fall outside V.
BsdeSolution solve_regression(const BsdeProblem& p, std::shared_ptr<const PathBundle> bundle,
                              const RegressionOptions& opts = {});

struct ResidualStats {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double mean_abs = 0.0;
  std::size_t n = 0;
};

/// Per path R = Y_{t0} - [xi + sum f(Y_k)|Z_k|^2 D - sum Z_k dB_k].
ResidualStats residual_check(const BsdeSolution& sol, const BsdeProblem& p);

struct MartingalePoint {
  double t = 0.0;
  double mean = 0.0;       // sample mean of u(Y_t)
  double reference = 0.0;  // sample mean of u(xi)
  double se = 0.0;         // SE of the paired difference
  bool ok = true;          // |mean - reference| <= 3 se
};

/// Sample means of u(Y_t) at the grid times nearest to t_check, compared with
/// the mean of u(xi) on the same paths.
std::vector<MartingalePoint> martingale_diagnostic(const BsdeSolution& sol, const BsdeProblem& p,
                                                   std::span<const double> t_check);

/// Sample estimate of E sum_k |u'(Y_k) Z_k|^2 D_k, the quadratic variation of
/// the transformed martingale. Finite is necessary, not sufficient, for the
/// stochastic integral to be a true martingale; a proxy only.
struct IntegrandMoment {
  double mean = 0.0;
  double se = 0.0;
};
IntegrandMoment integrand_moment(const BsdeSolution& sol, const BsdeProblem& p);

/// t,x,y_transformed,Y,Z
void write_surface_csv(std::ostream& os, const BsdeSolution& sol);
/// path,t,Y,Z
void write_solution_paths_csv(std::ostream& os, const BsdeSolution& sol);
/// key = value summary (engine, Y0, SE, clipping counts, CV errors).
void write_summary(std::ostream& os, const BsdeSolution& sol);

}  // namespace qbsde
