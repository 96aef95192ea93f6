// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "qbsde/errors.hpp"
#include "qbsde/parallel.hpp"
#include "qbsde/quadrature.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

namespace {

constexpr double kTruncation = 12.0;  // phi(12) ~ 2e-32
constexpr std::uint64_t kPilotSeed = 0x5eed0fd0a11c0debULL;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double diff_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

bool additive(const ForwardModel& f) { return *f.law != ExactLaw::geometric_brownian; }

// Value of X_T for standard normal draw zeta.
double terminal_state(const ForwardModel& f, double x, double m, double s, double zeta) {
  return additive(f) ? x + m + s * zeta : x * std::exp(m + s * zeta);
}

// zeta at which X_T crosses theta; NaN when it never does.
double crossing(const ForwardModel& f, double x, double m, double s, double theta) {
  if (additive(f)) return (theta - x - m) / s;
  if (x > 0 && theta > 0) return (std::log(theta / x) - m) / s;
  if (x < 0 && theta < 0) return (std::log(theta / x) - m) / s;
  return std::numeric_limits<double>::quiet_NaN();
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments out;
  if (v.empty()) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - out.mean) * (x - out.mean);
  out.sd = v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0;
  return out;
}

void require_law(const ForwardModel& f, ExactLaw law) {
  if (!f.law || *f.law != law)
    throw ConfigError(std::string("forward model '") + f.name + "' does not follow the declared law '" +
                      to_string(law) + "'");
}

void require_bundle_matches(const BsdeProblem& p, const PathBundle& b) {
  if (b.times.size() < 2) throw PreconditionError("path bundle has no time steps");
  const double scale = std::max(1.0, std::abs(p.T));
  if (std::abs(b.times.front() - p.t0) > 1e-12 * scale || std::abs(b.times.back() - p.T) > 1e-12 * scale)
    throw PreconditionError("path bundle grid [" + format_double(b.times.front()) + ", " +
                            format_double(b.times.back()) + "] does not span the problem's [t0, T]");
  for (std::size_t i = 0; i < b.n_paths; ++i)
    if (std::abs(b.x(i, 0) - p.x0) > 1e-12 * std::max(1.0, std::abs(p.x0)))
      throw PreconditionError("path bundle does not start at x0 = " + format_double(p.x0));
}

}  // namespace

const char* to_string(Engine e) noexcept { return e == Engine::quadrature ? "quadrature" : "regression"; }

void check_terminal_domain(const BsdeProblem& p) {
  const auto& D = p.transform.domain();
  if (p.terminal.image) {
    if (!D.contains(p.terminal.image->lo) || !D.contains(p.terminal.image->hi))
      throw DomainError("terminal '" + p.terminal.name + "' takes values outside D = " + to_string(D));
    return;
  }
  const auto pilot = simulate(p.forward, p.t0, p.x0, p.T, 32, 1000, kPilotSeed);
  for (std::size_t i = 0; i < pilot.n_paths; ++i) {
    const double x = pilot.x(i, pilot.steps());
    const double xi = p.terminal(x);
    if (!D.contains(xi))
      throw DomainError("terminal '" + p.terminal.name + "' maps X_T = " + format_double(x) + " to " +
                        format_double(xi) + ", outside D = " + to_string(D));
    if (!std::isfinite(p.transform.u(xi)))
      throw DomainError("u(g(X_T)) is not finite at X_T = " + format_double(x));
  }
}

double gaussian_expectation(const ForwardModel& fwd, double tau, double x,
                            const std::function<double(double)>& h, std::span<const double> breakpoints,
                            int nodes) {
  double m = 0.0, s = 0.0;
  fwd.transition(tau, m, s);
  if (s == 0.0) return h(terminal_state(fwd, x, m, s, 0.0));
  std::vector<double> cuts{-kTruncation};
  if (breakpoints.empty()) {
    auto hz = [&](double z) { return h(terminal_state(fwd, x, m, s, z)); };
    const double v = quad::gauss_hermite_normal(nodes).expect(hz);
    // The half-size rule is an error estimate. Gauss-Hermite converges slowly
    // when h has complex singularities near the real axis (u' of a rational
    // f, say); those integrands go to the adaptive rule below.
    const double coarse = quad::gauss_hermite_normal(std::max(2, nodes / 2)).expect(hz);
    if (std::abs(v - coarse) <= 1e-11 * std::max(1.0, std::abs(v))) return v;
  }
  for (double theta : breakpoints) {
    const double c = crossing(fwd, x, m, s, theta);
    if (std::isfinite(c) && c > -kTruncation && c < kTruncation) cuts.push_back(c);
  }
  cuts.push_back(kTruncation);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto r = quad::adaptive([&](double z) { return h(terminal_state(fwd, x, m, s, z)) * normal_pdf(z); },
                            cuts[i], cuts[i + 1], 1e-13);
    total += r.value;
  }
  return total;
}

QuadratureValue::QuadratureValue(const BsdeProblem& p, ExactLaw law, int nodes) : p_(p), nodes_(nodes) {
  require_law(p_.forward, law);
  if (!p_.transform.valid()) throw ConfigError("problem has no transform");
  if (nodes < 2 || nodes > 512) throw ConfigError("Gauss-Hermite node count must be in [2, 512]");
  for (double c : p_.terminal.levels) level_u_.push_back(p_.transform.u(c));
}

double QuadratureValue::h(double x) const { return p_.transform.u(p_.terminal(x)); }

double QuadratureValue::y(double t, double x) const {
  const double tau = p_.T - t;
  if (tau <= 0.0) return h(x);
  if (p_.terminal.piecewise_constant()) {
    double m = 0.0, s = 0.0;
    p_.forward.transition(tau, m, s);
    double acc = 0.0, prev = 0.0;
    const auto& bp = p_.terminal.breakpoints;
    for (std::size_t i = 0; i < level_u_.size(); ++i) {
      double cdf = 1.0;
      if (i < bp.size()) {
        const double c = crossing(p_.forward, x, m, s, bp[i]);
        if (std::isnan(c))
          cdf = terminal_state(p_.forward, x, m, s, 0.0) < bp[i] ? 1.0 : 0.0;
        else  // X_T decreases in the draw for a negative geometric state
          cdf = (additive(p_.forward) || x > 0) ? normal_cdf(c) : 1.0 - normal_cdf(c);
      }
      acc += level_u_[i] * (cdf - prev);
      prev = cdf;
    }
    return acc;
  }
  return gaussian_expectation(p_.forward, tau, x, [this](double v) { return h(v); }, p_.terminal.breakpoints,
                              nodes_);
}

double QuadratureValue::z(double t, double x) const {
  const double d = diff_step(x);
  return p_.forward.diffusion(t, x) * (y(t, x + d) - y(t, x - d)) / (2.0 * d);
}

double QuadratureValue::inverse(double yv, double t, double x) const {
  if (!p_.transform.range().contains(yv))
    throw RangeError("y(" + format_double(t) + ", " + format_double(x) + ") = " + format_double(yv) +
                     " is outside V = " + to_string(p_.transform.range()));
  return p_.transform.u_inv(yv);
}

double QuadratureValue::Y(double t, double x) const {
  if (p_.T - t <= 0.0) return p_.terminal(x);
  return inverse(y(t, x), t, x);
}

double QuadratureValue::Z(double t, double x) const { return z(t, x) / p_.transform.u_prime(Y(t, x)); }

double QuadratureValue::conditional_mean(double t, double x) const {
  const double tau = p_.T - t;
  if (tau <= 0.0) return p_.terminal(x);
  return gaussian_expectation(p_.forward, tau, x, p_.terminal.g, p_.terminal.breakpoints, nodes_);
}

BsdeSolution solve_quadrature(const BsdeProblem& p, ExactLaw law, const QuadratureOptions& opts,
                              std::shared_ptr<const PathBundle> bundle) {
  check_terminal_domain(p);
  const QuadratureValue qv(p, law, opts.nodes);
  const bool smooth = p.terminal.smooth;

  BsdeSolution sol;
  sol.engine = "quadrature";
  auto& S = sol.surface;
  S.times = opts.times.empty() ? std::vector<double>{p.t0} : opts.times;
  S.xs = opts.xs.empty() ? std::vector<double>{p.x0} : opts.xs;
  const std::size_t nt = S.times.size(), nx = S.xs.size();
  S.y.resize(nt * nx);
  S.Y.resize(nt * nx);
  S.Z.resize(nt * nx);
  // Z at maturity of a nonsmooth g is taken from the last time before T.
  auto z_time = [&](double t) {
    if (smooth || p.T - t > 0.0) return t;
    return p.T - std::max(1e-3 * (p.T - p.t0), 1e-8);
  };
  parallel_for(nt * nx, opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t n = lo; n < hi; ++n) {
      const double t = S.times[n / nx], x = S.xs[n % nx];
      S.y[n] = qv.y(t, x);
      S.Y[n] = qv.Y(t, x);
      const double tz = z_time(t);
      S.Z[n] = qv.Z(tz, x);
    }
  });

  sol.y0 = qv.y(p.t0, p.x0);
  sol.Y0 = qv.Y(p.t0, p.x0);
  sol.Z0 = qv.Z(z_time(p.t0), p.x0);

  if (bundle) {
    require_bundle_matches(p, *bundle);
    sol.bundle = bundle;
    sol.times = bundle->times;
    const std::size_t m = bundle->steps(), N = bundle->n_paths, w = m + 1;
    sol.y.resize(N * w);
    sol.Y.resize(N * w);
    sol.Z.resize(N * w);
    parallel_for(N, opts.workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t k = 0; k <= m; ++k) {
          const double t = sol.times[k], x = bundle->x(i, k);
          const std::size_t n = i * w + k;
          if (k == m) {
            sol.Y[n] = p.terminal(x);
            sol.y[n] = p.transform.u(sol.Y[n]);
            sol.Z[n] = smooth ? qv.Z(t, x) : sol.Z[n - 1];
          } else {
            sol.y[n] = qv.y(t, x);
            sol.Y[n] = qv.Y(t, x);
            sol.Z[n] = qv.z(t, x) / p.transform.u_prime(sol.Y[n]);
          }
        }
      }
    });
  }
  return sol;
}

namespace {

// Polynomial in the standardized variable s = (x - c) / scale.
struct SliceFit {
  double c = 0.0, scale = 1.0;
  Eigen::VectorXd beta;
  double value(double x) const {
    const double s = (x - c) / scale;
    double v = 0.0;
    for (Eigen::Index j = beta.size() - 1; j >= 0; --j) v = v * s + beta[j];
    return v;
  }
  double slope(double x) const {
    const double s = (x - c) / scale;
    double v = 0.0;
    for (Eigen::Index j = beta.size() - 1; j >= 1; --j) v = v * s + static_cast<double>(j) * beta[j];
    return v / scale;
  }
};

Eigen::MatrixXd design(std::span<const double> x, double c, double scale, int degree) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), degree + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = (x[i] - c) / scale;
    double v = 1.0;
    for (int j = 0; j <= degree; ++j) {
      A(static_cast<Eigen::Index>(i), j) = v;
      v *= s;
    }
  }
  return A;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int degree, double t) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols())
    throw RegressionError("rank-deficient design at t = " + format_double(t) + " (rank " +
                          std::to_string(qr.rank()) + " < " + std::to_string(A.cols()) +
                          "); try a polynomial degree below " + std::to_string(degree));
  return qr.solve(b);
}

}  // namespace

BsdeSolution solve_regression(const BsdeProblem& p, std::shared_ptr<const PathBundle> bundle,
                              const RegressionOptions& opts) {
  if (!bundle) throw PreconditionError("regression engine needs a path bundle");
  if (opts.degree < 0) throw ConfigError("polynomial degree must be >= 0");
  const std::size_t N = bundle->n_paths, m = bundle->steps(), w = m + 1;
  if (N < 10 * static_cast<std::size_t>(opts.degree + 1))
    throw PreconditionError("regression needs N >= 10 (degree + 1) = " + std::to_string(10 * (opts.degree + 1)) +
                            " paths, got " + std::to_string(N));
  require_bundle_matches(p, *bundle);
  check_terminal_domain(p);

  const Transform& tr = p.transform;
  const auto& D = tr.domain();
  const OpenInterval V = tr.range();
  const OpenInterval Vs = V.shrunk(1e-12);

  BsdeSolution sol;
  sol.engine = "regression";
  sol.bundle = bundle;
  sol.times = bundle->times;
  sol.y.assign(N * w, 0.0);
  sol.Y.assign(N * w, 0.0);
  sol.Z.assign(N * w, 0.0);
  sol.cv_error.assign(w, 0.0);

  // Terminal slice.
  std::vector<double> target(N);
  const double T = sol.times[m];
  parallel_for(N, opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = bundle->x(i, m);
      const double xi = p.terminal(x);
      if (!D.contains(xi))
        throw DomainError("g(X_T) = " + format_double(xi) + " outside D on path " + std::to_string(i));
      target[i] = tr.u(xi);
      sol.Y[i * w + m] = xi;
      sol.y[i * w + m] = target[i];
      if (p.terminal.smooth) {
        const double d = diff_step(x);
        const double dh = (tr.u(p.terminal(x + d)) - tr.u(p.terminal(x - d))) / (2.0 * d);
        sol.Z[i * w + m] = p.forward.diffusion(T, x) * dh / tr.u_prime(xi);
      }
    }
  });
  const auto [hull_lo, hull_hi] = std::minmax_element(target.begin(), target.end());
  const double lo_h = *hull_lo, hi_h = *hull_hi;
  const Eigen::Map<const Eigen::VectorXd> b(target.data(), static_cast<Eigen::Index>(N));

  std::vector<SliceFit> fits(w);
  for (std::size_t kk = m; kk-- > 0;) {
    const double t = sol.times[kk];
    const auto x = bundle->column(kk);
    const Moments mx = moments(x);
    const bool degenerate = mx.sd <= 1e-12 * std::max(1.0, std::abs(mx.mean));
    std::vector<double> fitted(N);
    std::vector<double> slope(N);

    if (degenerate) {
      // Every path sits at the same state: the projection is the sample mean
      // and the slope is borrowed from the next slice.
      const double mean = moments(target).mean;
      std::fill(fitted.begin(), fitted.end(), mean);
      for (std::size_t i = 0; i < N; ++i) {
        if (kk + 1 < m) {
          slope[i] = fits[kk + 1].slope(x[i]);
        } else if (p.terminal.smooth) {
          const double d = diff_step(x[i]);
          slope[i] = (tr.u(p.terminal(x[i] + d)) - tr.u(p.terminal(x[i] - d))) / (2.0 * d);
        }
      }
      fits[kk].c = mx.mean;
      fits[kk].beta = Eigen::VectorXd::Constant(1, mean);
    } else {
      SliceFit& fit = fits[kk];
      fit.c = mx.mean;
      fit.scale = mx.sd;
      const Eigen::MatrixXd A = design(x, fit.c, fit.scale, opts.degree);
      fit.beta = least_squares(A, b, opts.degree, t);
      const Eigen::VectorXd yhat = A * fit.beta;
      for (std::size_t i = 0; i < N; ++i) {
        fitted[i] = yhat[static_cast<Eigen::Index>(i)];
        slope[i] = fit.slope(x[i]);
      }
      // Two-fold cross-validation by path parity.
      const Eigen::Index half = static_cast<Eigen::Index>(N / 2);
      Eigen::MatrixXd Ae(half, A.cols()), Ao(half, A.cols());
      Eigen::VectorXd be(half), bo(half);
      for (Eigen::Index r = 0; r < half; ++r) {
        Ae.row(r) = A.row(2 * r);
        be[r] = b[2 * r];
        Ao.row(r) = A.row(2 * r + 1);
        bo[r] = b[2 * r + 1];
      }
      const Eigen::VectorXd ce = least_squares(Ae, be, opts.degree, t);
      const Eigen::VectorXd co = least_squares(Ao, bo, opts.degree, t);
      const double sse = (Ao * ce - bo).squaredNorm() + (Ae * co - be).squaredNorm();
      sol.cv_error[kk] = std::sqrt(sse / static_cast<double>(2 * half));
    }

    std::size_t escaped = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double& v = fitted[i];
      if (!V.contains(v)) {
        ++escaped;
        v = std::clamp(v, Vs.lo(), Vs.hi());
      }
      if (opts.hull_clamp && (v < lo_h || v > hi_h)) {
        ++sol.clamped_to_hull;
        v = std::clamp(v, lo_h, hi_h);
      }
    }
    sol.clipped_to_V += escaped;
    if (static_cast<double>(escaped) > 1e-3 * static_cast<double>(N))
      throw RangeError("regression fit left V = " + to_string(V) + " on " + std::to_string(escaped) + " of " +
                       std::to_string(N) + " paths at t = " + format_double(t) +
                       "; clipping would bias the estimate, lower the degree or add paths");

    parallel_for(N, opts.workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t n = i * w + kk;
        sol.y[n] = fitted[i];
        sol.Y[n] = tr.u_inv(fitted[i]);
        sol.Z[n] = p.forward.diffusion(t, x[i]) * slope[i] / tr.u_prime(sol.Y[n]);
      }
    });
  }
  if (!p.terminal.smooth)
    for (std::size_t i = 0; i < N; ++i) sol.Z[i * w + m] = sol.Z[i * w + m - 1];

  const Moments mt = moments(target);
  sol.y0 = sol.y[0];
  sol.Y0 = sol.Y[0];
  sol.Z0 = sol.Z[0];
  sol.se_y0 = mt.sd / std::sqrt(static_cast<double>(N));
  sol.se_Y0 = sol.se_y0 / tr.u_prime(sol.Y0);
  sol.surface.times = {p.t0};
  sol.surface.xs = {p.x0};
  sol.surface.y = {sol.y0};
  sol.surface.Y = {sol.Y0};
  sol.surface.Z = {sol.Z0};
  return sol;
}

ResidualStats residual_check(const BsdeSolution& sol, const BsdeProblem& p) {
  if (!sol.bundle) throw PreconditionError("residual_check needs per-path Y and Z");
  const PathBundle& b = *sol.bundle;
  const std::size_t N = b.n_paths, m = b.steps();
  std::vector<double> R(N);
  for (std::size_t i = 0; i < N; ++i) {
    double drift = 0.0, mart = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dt = b.times[k + 1] - b.times[k];
      const double Z = sol.Zp(i, k);
      drift += p.generator.f(sol.Yp(i, k)) * Z * Z * dt;
      mart += Z * b.dB(i, k);
    }
    const double xi = p.terminal(b.x(i, m));
    R[i] = sol.Yp(i, 0) - (xi + drift - mart);
  }
  const Moments mr = moments(R);
  ResidualStats out;
  out.n = N;
  out.mean = mr.mean;
  out.sd = mr.sd;
  out.se = mr.sd / std::sqrt(static_cast<double>(N));
  for (double r : R) out.mean_abs += std::abs(r);
  out.mean_abs /= static_cast<double>(N);
  return out;
}

IntegrandMoment integrand_moment(const BsdeSolution& sol, const BsdeProblem& p) {
  if (!sol.bundle) throw PreconditionError("integrand_moment needs per-path data");
  const std::size_t N = sol.bundle->n_paths, m = sol.bundle->steps();
  std::vector<double> q(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const double g = p.transform.u_prime(sol.Yp(i, k)) * sol.Zp(i, k);
      q[i] += g * g * (sol.times[k + 1] - sol.times[k]);
    }
  const auto mr = moments(q);
  return {mr.mean, mr.sd / std::sqrt(static_cast<double>(N))};
}

std::vector<MartingalePoint> martingale_diagnostic(const BsdeSolution& sol, const BsdeProblem& p,
                                                   std::span<const double> t_check) {
  if (!sol.bundle) throw PreconditionError("martingale_diagnostic needs per-path data");
  const PathBundle& b = *sol.bundle;
  const std::size_t N = b.n_paths, m = b.steps();
  std::vector<double> uxi(N);
  for (std::size_t i = 0; i < N; ++i) uxi[i] = p.transform.u(sol.Yp(i, m));
  const double ref = moments(uxi).mean;

  std::vector<MartingalePoint> out;
  for (double t : t_check) {
    const auto it = std::min_element(sol.times.begin(), sol.times.end(),
                                     [t](double a, double c) { return std::abs(a - t) < std::abs(c - t); });
    const std::size_t k = static_cast<std::size_t>(it - sol.times.begin());
    std::vector<double> uy(N), diff(N);
    for (std::size_t i = 0; i < N; ++i) {
      uy[i] = p.transform.u(sol.Yp(i, k));
      diff[i] = uy[i] - uxi[i];
    }
    MartingalePoint pt;
    pt.t = sol.times[k];
    pt.mean = moments(uy).mean;
    pt.reference = ref;
    pt.se = moments(diff).sd / std::sqrt(static_cast<double>(N));
    // The floor covers slices where u(Y_t) and u(xi) coincide to rounding.
    pt.ok = std::abs(pt.mean - ref) <= 3.0 * pt.se + 1e-12 * (1.0 + std::abs(ref));
    out.push_back(pt);
  }
  return out;
}

void write_surface_csv(std::ostream& os, const BsdeSolution& sol) {
  const auto& S = sol.surface;
  os << "t,x,y_transformed,Y,Z\n";
  for (std::size_t i = 0; i < S.times.size(); ++i)
    for (std::size_t j = 0; j < S.xs.size(); ++j)
      os << format_double(S.times[i]) << ',' << format_double(S.xs[j]) << ',' << format_double(S.at(S.y, i, j))
         << ',' << format_double(S.at(S.Y, i, j)) << ',' << format_double(S.at(S.Z, i, j)) << '\n';
}

void write_solution_paths_csv(std::ostream& os, const BsdeSolution& sol) {
  os << "path,t,Y,Z\n";
  if (!sol.bundle) return;
  for (std::size_t i = 0; i < sol.bundle->n_paths; ++i)
    for (std::size_t k = 0; k < sol.times.size(); ++k)
      os << i << ',' << format_double(sol.times[k]) << ',' << format_double(sol.Yp(i, k)) << ','
         << format_double(sol.Zp(i, k)) << '\n';
}

void write_summary(std::ostream& os, const BsdeSolution& sol) {
  os << "engine = " << sol.engine << '\n'
     << "y0 = " << format_double(sol.y0) << '\n'
     << "se_y0 = " << format_double(sol.se_y0) << '\n'
     << "Y0 = " << format_double(sol.Y0) << '\n'
     << "se_Y0 = " << format_double(sol.se_Y0) << '\n'
     << "Z0 = " << format_double(sol.Z0) << '\n';
  if (sol.bundle) {
    os << "paths = " << sol.bundle->n_paths << '\n' << "steps = " << sol.bundle->steps() << '\n';
  }
  if (sol.engine == "regression") {
    os << "clipped_to_V = " << sol.clipped_to_V << '\n' << "clamped_to_hull = " << sol.clamped_to_hull << '\n';
    for (std::size_t k = 0; k < sol.cv_error.size(); ++k)
      os << "cv_error[" << format_double(sol.times[k]) << "] = " << format_double(sol.cv_error[k]) << '\n';
  }
}

}  // namespace qbsde
