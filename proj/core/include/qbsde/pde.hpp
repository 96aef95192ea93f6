// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbsde/bsde.hpp"

namespace qbsde {

/// Standing hypotheses of the Feynman-Kac representation; they are declared,
/// not checked, except where noted on the operations below.
struct AssumptionB {
  bool f_continuous_nonnegative = false;
  bool terminal_polynomial_growth = false;
  bool coefficients_lipschitz = false;
  /// Accept f <= 0 with the same machinery.
  bool allow_nonpositive = false;
};

/// d_t v + (1/2) sigma^2 v_xx + b v_x + f(v) |sigma v_x|^2 = 0,  v(T,.) = g,
/// truncated to [x_min, x_max] with uniform grids t_i = i T / n_t.
struct PdeProblem {
  Generator generator;
  Transform transform;
  TerminalMap terminal;
  ForwardModel forward;
  double T = 1.0;
  double x_min = -6.0;
  double x_max = 6.0;
  int n_t = 400;
  int n_x = 401;
  AssumptionB assumptions;
};

struct ValueSurface {
  std::string method;  // feynman_kac_quadrature, feynman_kac_mc, finite_difference
  std::vector<double> times;
  std::vector<double> xs;
  // (n_t + 1) x n_x, row-major by time.
  std::vector<double> v;
  std::vector<double> w;
  /// Largest Monte Carlo standard error of w (zero for deterministic methods).
  double max_se = 0.0;
  std::vector<std::string> notes;

  std::size_t nx() const noexcept { return xs.size(); }
  double v_at(std::size_t i, std::size_t j) const { return v[i * xs.size() + j]; }
  double w_at(std::size_t i, std::size_t j) const { return w[i * xs.size() + j]; }
  /// Linear interpolation in x on time row i.
  double v_interp(std::size_t i, double x) const;
};

/// Checks the declared assumptions, the sign of f and g(x) in D on the
/// window. Throws PreconditionError naming the failed flag.
void validate(const PdeProblem& p);

struct FkParams {
  Engine engine = Engine::quadrature;
  int gh_nodes = 64;
  std::size_t mc_paths = 2000;
  std::size_t mc_steps = 50;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// v(t,x) = u^{-1}(E[u(g(X_T^{t,x}))]) on every grid node. Throws RangeError
/// when w leaves V.
ValueSurface solve_feynman_kac(const PdeProblem& p, const FkParams& params = {});

/// Crank-Nicolson (two Rannacher start-up steps split into implicit-Euler
/// half steps) for the linear equation d_t w + (1/2) sigma^2 w_xx + b w_x = 0,
/// w(T,.) = u(g), with w_xx = 0 at the window edges; v = u^{-1}(w). Throws
/// ResolutionError when |b| dx > sigma^2 somewhere on the grid.
ValueSurface solve_fd_oracle(const PdeProblem& p);

/// |v_FD(t,x)| on the given window minus the same on a window of twice the
/// width (same dx and dt): the truncation error estimate at (t, x).
double window_sensitivity(const PdeProblem& p, double t, double x);

struct Subgrid {
  double t_lo, t_hi, x_lo, x_hi;
};

struct ResidualGrid {
  std::vector<std::size_t> rows;  // time indices
  std::vector<std::size_t> cols;  // space indices
  std::vector<double> values;     // rows.size() x cols.size()
  double max_abs = 0.0;
  double rms = 0.0;
};

/// Central-difference residual of the nonlinear equation on the nodes of s
/// inside `sub`. Throws PreconditionError if the subgrid reaches the first
/// or last two time rows or the outer two columns.
ResidualGrid pde_residual(const ValueSurface& s, const PdeProblem& p, const Subgrid& sub);

/// t,x,v,w,residual (residual blank off the subgrid).
void write_surface_csv(std::ostream& os, const ValueSurface& s, const ResidualGrid* r = nullptr);

}  // namespace qbsde
