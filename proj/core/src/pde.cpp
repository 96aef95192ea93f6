// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "qbsde/errors.hpp"
#include "qbsde/parallel.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

double ValueSurface::v_interp(std::size_t i, double x) const {
  const std::size_t n = xs.size();
  if (n == 1) return v[i * n];
  const double dx = xs[1] - xs[0];
  const double r = std::clamp((x - xs[0]) / dx, 0.0, static_cast<double>(n - 1));
  const std::size_t j = std::min(static_cast<std::size_t>(r), n - 2);
  const double f = r - static_cast<double>(j);
  return (1.0 - f) * v_at(i, j) + f * v_at(i, j + 1);
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = a + (b - a) * j / (n - 1);
  if (n > 1) out.back() = b;
  return out;
}

std::vector<double> time_grid(const PdeProblem& p) {
  std::vector<double> t(static_cast<std::size_t>(p.n_t) + 1);
  for (int i = 0; i <= p.n_t; ++i) t[static_cast<std::size_t>(i)] = p.T * i / p.n_t;
  t.back() = p.T;
  return t;
}

double invert(const Transform& tr, double w, double t, double x) {
  if (!tr.range().contains(w))
    throw RangeError("w(" + format_double(t) + ", " + format_double(x) + ") = " + format_double(w) +
                     " is outside V = " + to_string(tr.range()));
  return tr.u_inv(w);
}

BsdeProblem as_bsde(const PdeProblem& p, double t0, double x0) {
  BsdeProblem b;
  b.generator = p.generator;
  b.transform = p.transform;
  b.terminal = p.terminal;
  b.forward = p.forward;
  b.T = p.T;
  b.t0 = t0;
  b.x0 = x0;
  return b;
}

// Thomas algorithm; a: sub, b: diag, c: super. Overwrites d with the solution.
void tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace

void validate(const PdeProblem& p) {
  const auto& A = p.assumptions;
  if (!A.f_continuous_nonnegative)
    throw PreconditionError("assumption f_continuous_nonnegative is not declared");
  if (!A.terminal_polynomial_growth)
    throw PreconditionError("assumption terminal_polynomial_growth is not declared");
  if (!A.coefficients_lipschitz) throw PreconditionError("assumption coefficients_lipschitz is not declared");
  const SignClass s = p.generator.sign_class;
  const bool ok = s == SignClass::nonnegative || (A.allow_nonpositive && s == SignClass::nonpositive);
  if (!ok)
    throw PreconditionError(std::string("generator sign class is ") + to_string(s) +
                            (A.allow_nonpositive ? "; need nonnegative or nonpositive" : "; need nonnegative"));
  if (p.n_t < 2 || p.n_x < 5) throw ConfigError("pde grid needs n_t >= 2 and n_x >= 5");
  if (!(p.x_min < p.x_max) || !(p.T > 0)) throw ConfigError("pde window or horizon is empty");
  const auto& D = p.transform.domain();
  for (double x : linspace(p.x_min, p.x_max, p.n_x))
    if (!D.contains(p.terminal(x)))
      throw PreconditionError("g(" + format_double(x) + ") = " + format_double(p.terminal(x)) +
                              " is outside D = " + to_string(D));
}

namespace {

// Empirical growth exponent of u(g(x)) on the window; exponential growth
// (f bounded below by a positive constant) shows up as a large value.
std::string growth_note(const PdeProblem& p) {
  double worst = 0.0;
  for (double x : linspace(p.x_min, p.x_max, 64)) {
    if (std::abs(x) < 2.0) continue;
    const double w = std::abs(p.transform.u(p.terminal(x)));
    worst = std::max(worst, std::log1p(w) / std::log1p(std::abs(x)));
  }
  return "growth exponent of |u(g(x))| on the window ~ " + format_double(worst) +
         (worst > 8.0 ? " (fast growth; polynomial-growth declaration is doubtful)" : "");
}

}  // namespace

ValueSurface solve_feynman_kac(const PdeProblem& p, const FkParams& prm) {
  validate(p);
  ValueSurface s;
  s.times = time_grid(p);
  s.xs = linspace(p.x_min, p.x_max, p.n_x);
  const std::size_t nt = s.times.size(), nx = s.xs.size();
  s.v.resize(nt * nx);
  s.w.resize(nt * nx);
  s.notes.push_back(growth_note(p));

  if (prm.engine == Engine::quadrature) {
    s.method = "feynman_kac_quadrature";
    if (!p.forward.law) throw PreconditionError("quadrature engine needs a forward model with an exact law");
    const QuadratureValue qv(as_bsde(p, 0.0, 0.0), *p.forward.law, prm.gh_nodes);
    parallel_for(nt * nx, prm.workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t n = lo; n < hi; ++n) {
        const std::size_t i = n / nx;
        const double t = s.times[i], x = s.xs[n % nx];
        if (i + 1 == nt) {
          s.v[n] = p.terminal(x);
          s.w[n] = p.transform.u(s.v[n]);
        } else {
          s.w[n] = qv.y(t, x);
          s.v[n] = invert(p.transform, s.w[n], t, x);
        }
      }
    });
    return s;
  }

  s.method = "feynman_kac_mc";
  std::vector<double> se(nt * nx, 0.0);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t n = i * nx + j;
      const double t = s.times[i], x = s.xs[j];
      if (i + 1 == nt) {
        s.v[n] = p.terminal(x);
        s.w[n] = p.transform.u(s.v[n]);
        continue;
      }
      // One bundle per time row: every x on the row sees the same noise.
      const auto b = simulate(p.forward, t, x, p.T, prm.mc_steps, prm.mc_paths, mix_seed(prm.seed, i), prm.workers);
      double sum = 0.0, sq = 0.0;
      for (std::size_t k = 0; k < b.n_paths; ++k) {
        const double h = p.transform.u(p.terminal(b.x(k, b.steps())));
        sum += h;
        sq += h * h;
      }
      const double N = static_cast<double>(b.n_paths);
      const double mean = sum / N;
      se[n] = std::sqrt(std::max(0.0, sq / N - mean * mean) / std::max(1.0, N - 1.0));
      s.w[n] = mean;
      s.v[n] = invert(p.transform, mean, t, x);
    }
  }
  s.max_se = *std::max_element(se.begin(), se.end());
  return s;
}

namespace {

// Backward time stepping of the linear equation from w(T) on the grid xs.
std::vector<double> fd_solve(const PdeProblem& p, const std::vector<double>& times, const std::vector<double>& xs) {
  const std::size_t nt = times.size(), nx = xs.size();
  const double dx = xs[1] - xs[0];
  std::vector<double> W(nt * nx);
  std::vector<double> cur(nx);
  for (std::size_t j = 0; j < nx; ++j) cur[j] = p.transform.u(p.terminal(xs[j]));
  std::copy(cur.begin(), cur.end(), W.begin() + static_cast<std::ptrdiff_t>((nt - 1) * nx));

  const std::size_t ni = nx - 2;  // interior unknowns 1..nx-2
  std::vector<double> lo(nx), di(nx), up(nx);
  auto assemble = [&](double t) {
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      const double sg = p.forward.diffusion(t, xs[j]);
      const double b = p.forward.drift(t, xs[j]);
      const double a = 0.5 * sg * sg;
      if (std::abs(b) * dx > sg * sg)
        throw ResolutionError("grid Peclet number too large at (t, x) = (" + format_double(t) + ", " +
                              format_double(xs[j]) + "): |b| dx = " + format_double(std::abs(b) * dx) +
                              " > sigma^2 = " + format_double(sg * sg) + "; refine dx");
      lo[j] = a / (dx * dx) - b / (2 * dx);
      di[j] = -2 * a / (dx * dx);
      up[j] = a / (dx * dx) + b / (2 * dx);
    }
  };
  // One theta step of length k backward from t_hi: (I - th k L) w+ = (I + (1-th) k L) w.
  auto step = [&](double t_hi, double k, double theta) {
    assemble(t_hi - 0.5 * k);
    std::vector<double> rhs(ni), A(ni), B(ni), C(ni);
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      const double Lw = lo[j] * cur[j - 1] + di[j] * cur[j] + up[j] * cur[j + 1];
      const std::size_t r = j - 1;
      rhs[r] = cur[j] + (1 - theta) * k * Lw;
      A[r] = -theta * k * lo[j];
      B[r] = 1 - theta * k * di[j];
      C[r] = -theta * k * up[j];
    }
    // w_0 = 2 w_1 - w_2 and w_{n-1} = 2 w_{n-2} - w_{n-3} folded into the
    // first and last interior rows.
    B[0] += 2 * A[0];
    C[0] -= A[0];
    A[0] = 0;
    B[ni - 1] += 2 * C[ni - 1];
    A[ni - 1] -= C[ni - 1];
    C[ni - 1] = 0;
    tridiagonal(A, B, C, rhs);
    for (std::size_t r = 0; r < ni; ++r) cur[r + 1] = rhs[r];
    cur[0] = 2 * cur[1] - cur[2];
    cur[nx - 1] = 2 * cur[nx - 2] - cur[nx - 3];
  };

  for (std::size_t i = nt - 1; i-- > 0;) {
    const double t_hi = times[i + 1], k = times[i + 1] - times[i];
    if (i + 3 > nt - 1) {
      // Rannacher start-up: the first two steps as four implicit half steps.
      step(t_hi, 0.5 * k, 1.0);
      step(t_hi - 0.5 * k, 0.5 * k, 1.0);
    } else {
      step(t_hi, k, 0.5);
    }
    std::copy(cur.begin(), cur.end(), W.begin() + static_cast<std::ptrdiff_t>(i * nx));
  }
  return W;
}

}  // namespace

ValueSurface solve_fd_oracle(const PdeProblem& p) {
  validate(p);
  ValueSurface s;
  s.method = "finite_difference";
  s.times = time_grid(p);
  s.xs = linspace(p.x_min, p.x_max, p.n_x);
  s.w = fd_solve(p, s.times, s.xs);
  const std::size_t nt = s.times.size(), nx = s.xs.size();
  s.v.resize(nt * nx);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      const std::size_t n = i * nx + j;
      s.v[n] = i + 1 == nt ? p.terminal(s.xs[j]) : invert(p.transform, s.w[n], s.times[i], s.xs[j]);
    }
  s.notes.push_back(growth_note(p));
  return s;
}

double window_sensitivity(const PdeProblem& p, double t, double x) {
  const ValueSurface a = solve_fd_oracle(p);
  PdeProblem q = p;
  const double half = 0.5 * (p.x_max - p.x_min), mid = 0.5 * (p.x_max + p.x_min);
  q.x_min = mid - 2 * half;
  q.x_max = mid + 2 * half;
  q.n_x = 2 * (p.n_x - 1) + 1;
  const ValueSurface b = solve_fd_oracle(q);
  const auto i = static_cast<std::size_t>(std::lround(t / p.T * p.n_t));
  return std::abs(a.v_interp(i, x) - b.v_interp(i, x));
}

ResidualGrid pde_residual(const ValueSurface& s, const PdeProblem& p, const Subgrid& sub) {
  const std::size_t nt = s.times.size(), nx = s.xs.size();
  ResidualGrid r;
  for (std::size_t i = 0; i < nt; ++i)
    if (s.times[i] >= sub.t_lo - 1e-12 && s.times[i] <= sub.t_hi + 1e-12) r.rows.push_back(i);
  for (std::size_t j = 0; j < nx; ++j)
    if (s.xs[j] >= sub.x_lo - 1e-12 && s.xs[j] <= sub.x_hi + 1e-12) r.cols.push_back(j);
  if (r.rows.empty() || r.cols.empty()) throw PreconditionError("residual subgrid contains no nodes");
  if (r.rows.front() < 1 || r.rows.back() + 3 > nt)
    throw PreconditionError("residual subgrid touches the initial or terminal time layer");
  if (r.cols.front() < 2 || r.cols.back() + 3 > nx)
    throw PreconditionError("residual subgrid touches the spatial boundary layer");

  const double dx = s.xs[1] - s.xs[0];
  double sq = 0.0;
  for (std::size_t i : r.rows) {
    const double dt2 = s.times[i + 1] - s.times[i - 1];
    for (std::size_t j : r.cols) {
      const double t = s.times[i], x = s.xs[j];
      const double v = s.v_at(i, j);
      const double vt = (s.v_at(i + 1, j) - s.v_at(i - 1, j)) / dt2;
      const double vx = (s.v_at(i, j + 1) - s.v_at(i, j - 1)) / (2 * dx);
      const double vxx = (s.v_at(i, j + 1) - 2 * v + s.v_at(i, j - 1)) / (dx * dx);
      const double sg = p.forward.diffusion(t, x);
      const double res = vt + 0.5 * sg * sg * vxx + p.forward.drift(t, x) * vx + p.generator.f(v) * sg * sg * vx * vx;
      r.values.push_back(res);
      r.max_abs = std::max(r.max_abs, std::abs(res));
      sq += res * res;
    }
  }
  r.rms = std::sqrt(sq / static_cast<double>(r.values.size()));
  return r;
}

void write_surface_csv(std::ostream& os, const ValueSurface& s, const ResidualGrid* r) {
  std::vector<double> res(s.v.size(), std::numeric_limits<double>::quiet_NaN());
  if (r) {
    std::size_t n = 0;
    for (std::size_t i : r->rows)
      for (std::size_t j : r->cols) res[i * s.nx() + j] = r->values[n++];
  }
  os << "t,x,v,w,residual\n";
  for (std::size_t i = 0; i < s.times.size(); ++i)
    for (std::size_t j = 0; j < s.nx(); ++j) {
      const std::size_t n = i * s.nx() + j;
      os << format_double(s.times[i]) << ',' << format_double(s.xs[j]) << ',' << format_double(s.v[n]) << ','
         << format_double(s.w[n]) << ',';
      if (!std::isnan(res[n])) os << format_double(res[n]);
      os << '\n';
    }
}

}  // namespace qbsde
