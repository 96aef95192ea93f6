// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "qbsde/errors.hpp"
#include "qbsde/parallel.hpp"

namespace qbsde {

const char* to_string(ComparisonCondition c) noexcept {
  return c == ComparisonCondition::a1 ? "a1" : "a2";
}

const char* to_string(ConverseVerdict v) noexcept {
  return v == ConverseVerdict::contradiction_found ? "CONTRADICTION_FOUND" : "BOUND_VIOLATED";
}

namespace {

bool same_setup(const BsdeProblem& a, const BsdeProblem& b) {
  return a.forward.name == b.forward.name && a.forward.mu == b.forward.mu && a.forward.sigma == b.forward.sigma &&
         a.T == b.T && a.t0 == b.t0 && a.x0 == b.x0;
}

BsdeSolution solve_on(const ComparisonCase& c, const BsdeProblem& p, std::shared_ptr<const PathBundle> b) {
  if (c.engine == Engine::quadrature) {
    QuadratureOptions q;
    q.nodes = c.gh_nodes;
    q.workers = c.workers;
    return solve_quadrature(p, c.law, q, std::move(b));
  }
  RegressionOptions r;
  r.degree = c.degree;
  r.workers = c.workers;
  return solve_regression(p, std::move(b), r);
}

}  // namespace

ComparisonReport compare(const ComparisonCase& c) {
  if (c.f_grid.empty()) throw PreconditionError("f1 <= f2 evidence grid is empty");
  if (!same_setup(c.p1, c.p2))
    throw PreconditionError("the two problems must share forward model, horizon and start point");
  const auto& D1 = c.p1.transform.domain();
  const auto& D2 = c.p2.transform.domain();
  for (double y : c.f_grid) {
    if (!D1.contains(y) || !D2.contains(y))
      throw PreconditionError("grid point " + format_double(y) + " is outside D1 or D2");
    const double a = c.p1.generator.f(y), b = c.p2.generator.f(y);
    if (!(a <= b))
      throw PreconditionError("f1 <= f2 fails at y = " + format_double(y) + " (" + format_double(a) + " > " +
                              format_double(b) + ")");
  }
  if (c.condition == ComparisonCondition::a1 && !(D1.contains(c.zeta) && D2.contains(c.zeta)))
    throw PreconditionError("condition a1: zeta = " + format_double(c.zeta) + " is not in D");
  if (c.condition == ComparisonCondition::a2 && !c.p1.transform.range().lower_finite())
    throw PreconditionError("condition a2: u_{f1} is not bounded below (V1 = " +
                            to_string(c.p1.transform.range()) + ")");

  auto bundle = std::make_shared<const PathBundle>(
      simulate(c.p1.forward, c.p1.t0, c.p1.x0, c.p1.T, c.steps, c.n_paths, c.seed, c.workers));
  const std::size_t N = bundle->n_paths, m = bundle->steps(), w = m + 1;

  std::size_t strict = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = bundle->x(i, m);
    const double xi1 = c.p1.terminal(x), xi2 = c.p2.terminal(x);
    if (!(xi1 <= xi2))
      throw PreconditionError("xi1 <= xi2 fails on path " + std::to_string(i) + " (" + format_double(xi1) +
                              " > " + format_double(xi2) + ")");
    if (c.condition == ComparisonCondition::a1 && !(xi2 >= c.zeta))
      throw PreconditionError("condition a1: xi2 = " + format_double(xi2) + " < zeta on path " +
                              std::to_string(i));
    if (xi1 < xi2) ++strict;
  }

  const BsdeSolution s1 = solve_on(c, c.p1, bundle);
  const BsdeSolution s2 = solve_on(c, c.p2, bundle);

  ComparisonReport r;
  r.bundle = bundle;
  r.Y1_0 = s1.Y0;
  r.Y2_0 = s2.Y0;
  r.se1 = s1.se_Y0;
  r.se2 = s2.se_Y0;
  const double pooled = std::hypot(r.se1, r.se2);
  r.tolerance = c.engine == Engine::quadrature ? 1e-9 * std::max(1.0, std::abs(r.Y2_0)) : 3.0 * pooled;
  r.path_gap.assign(N, -kInf);
  r.max_violation = -kInf;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < w; ++k) r.path_gap[i] = std::max(r.path_gap[i], s1.Yp(i, k) - s2.Yp(i, k));
    r.max_violation = std::max(r.max_violation, r.path_gap[i]);
  }
  r.pass = r.max_violation <= r.tolerance;

  r.strict_fraction = static_cast<double>(strict) / static_cast<double>(N);
  r.strict_checked = strict > 0 || c.expected_gap.has_value();
  if (r.strict_checked) {
    const double tol = std::max(3.0 * pooled, 1e-8);
    r.strict_threshold = c.expected_gap ? *c.expected_gap - tol : tol;
    r.strict_ok = r.Y2_0 - r.Y1_0 > r.strict_threshold;
  }
  return r;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  os << "verdict = " << (pass ? "PASS" : "FAIL") << '\n'
     << "max_violation = " << format_double(max_violation) << '\n'
     << "tolerance = " << format_double(tolerance) << '\n'
     << "Y1_0 = " << format_double(Y1_0) << " (se " << format_double(se1) << ")\n"
     << "Y2_0 = " << format_double(Y2_0) << " (se " << format_double(se2) << ")\n"
     << "gap_0 = " << format_double(Y2_0 - Y1_0) << '\n'
     << "strict_fraction = " << format_double(strict_fraction) << '\n';
  if (strict_checked)
    os << "strict = " << (strict_ok ? "PASS" : "FAIL") << " (threshold " << format_double(strict_threshold)
       << ")\n";
  return os.str();
}

ConverseReport converse_experiment(const Generator& f1, const Generator& f2, double y, double z, double K, int n,
                                   const ConverseParams& prm) {
  if (!(K > 0)) throw PreconditionError("K must be positive");
  if (z == 0.0 || !std::isfinite(z)) throw PreconditionError("z must be a nonzero real");
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (prm.check_points < 2) throw ConfigError("check_points must be >= 2");
  const double inv_n = 1.0 / n;

  // Theta_n membership on the closed band, plus a sampled Lipschitz bound.
  const double h = 2.0 * K / (prm.check_points - 1);
  double lip = 0.0, prev1 = 0.0, prev2 = 0.0;
  for (int j = 0; j < prm.check_points; ++j) {
    const double s = j + 1 == prm.check_points ? y + K : y - K + h * j;
    if (!f1.domain.contains(s) || !f2.domain.contains(s))
      throw PreconditionError("[y - K, y + K] is not inside D: " + format_double(s) + " is outside");
    const double a = f1.f(s), b = f2.f(s);
    // Closure of Theta_n: the bound only needs f2 - f1 >= 1/(2n) before tau.
    if (!(b - a >= inv_n * (1 - 1e-12)))
      throw PreconditionError("y = " + format_double(y) + " with K = " + format_double(K) +
                              " is not inside Theta_n: f1 > f2 - 1/n at " + format_double(s));
    if (j > 0) lip = std::max({lip, std::abs(a - prev1) / h, std::abs(b - prev2) / h});
    prev1 = a;
    prev2 = b;
  }

  const auto noise = simulate(ForwardModel::brownian(), 0.0, 0.0, prm.T, prm.steps, prm.n_paths, prm.seed,
                              prm.workers);
  const std::size_t N = noise.n_paths, m = noise.steps(), w = m + 1;
  const double dt = noise.dt(), z2 = z * z;

  auto p1 = std::make_shared<PathBundle>();
  auto p2 = std::make_shared<PathBundle>();
  for (auto* p : {p1.get(), p2.get()}) {
    p->times = noise.times;
    p->n_paths = N;
    p->increments = noise.increments;
    p->seed = noise.seed;
    p->states.assign(N * w, y);
  }

  ConverseReport r;
  r.lipschitz = lip;
  r.slack = lip * z2 * dt * prm.T;
  r.tau.assign(N, m);
  r.gap.assign(N, 0.0);
  r.bound.assign(N, 0.0);
  const double lo = y - K, hi = y + K;
  parallel_for(N, prm.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double* Y1 = p1->states.data() + i * w;
      double* Y2 = p2->states.data() + i * w;
      bool live1 = true, live2 = true;
      std::size_t tau = m;
      for (std::size_t k = 0; k < m; ++k) {
        const double dB = noise.dB(i, k);
        // Each process is frozen once it leaves the band, so f_i is never
        // evaluated outside [y - K, y + K].
        Y1[k + 1] = live1 ? Y1[k] - f1.f(Y1[k]) * z2 * dt + z * dB : Y1[k];
        Y2[k + 1] = live2 ? Y2[k] - f2.f(Y2[k]) * z2 * dt + z * dB : Y2[k];
        live1 = live1 && lo < Y1[k + 1] && Y1[k + 1] < hi;
        live2 = live2 && lo < Y2[k + 1] && Y2[k + 1] < hi;
        if (tau == m && (!live1 || !live2 || f1.f(Y1[k + 1]) >= f2.f(Y2[k + 1]) - 0.5 * inv_n)) tau = k + 1;
      }
      r.tau[i] = tau;
      r.gap[i] = Y1[tau] - Y2[tau];
      r.bound[i] = z2 * noise.times[tau] * 0.5 * inv_n - r.slack;
    }
  });

  std::size_t ok = 0;
  r.min_margin = kInf;
  for (std::size_t i = 0; i < N; ++i) {
    if (r.tau[i] == 0) throw PreconditionError("tau = 0 on path " + std::to_string(i) + "; increase K");
    const double margin = r.gap[i] - r.bound[i];
    r.min_margin = std::min(r.min_margin, margin);
    if (margin >= 0.0) ++ok;
  }
  r.fraction_ok = static_cast<double>(ok) / static_cast<double>(N);
  r.verdict = ok == N ? ConverseVerdict::contradiction_found : ConverseVerdict::bound_violated;
  r.y1 = p1;
  r.y2 = p2;
  return r;
}

std::string ConverseReport::to_text() const {
  std::ostringstream os;
  os << "verdict = " << to_string(verdict) << '\n'
     << "paths = " << tau.size() << '\n'
     << "fraction_ok = " << format_double(fraction_ok) << '\n'
     << "min_margin = " << format_double(min_margin) << '\n'
     << "lipschitz = " << format_double(lipschitz) << '\n'
     << "slack = " << format_double(slack) << '\n';
  if (!gap.empty()) {
    const auto [mn, mx] = std::minmax_element(gap.begin(), gap.end());
    os << "gap_min = " << format_double(*mn) << '\n' << "gap_max = " << format_double(*mx) << '\n';
  }
  return os.str();
}

void write_converse_csv(std::ostream& os, const ConverseReport& r) {
  os << "path,tau,gap,bound\n";
  const double* t = r.y1 ? r.y1->times.data() : nullptr;
  for (std::size_t i = 0; i < r.tau.size(); ++i)
    os << i << ',' << format_double(t ? t[r.tau[i]] : 0.0) << ',' << format_double(r.gap[i]) << ','
       << format_double(r.bound[i]) << '\n';
}

}  // namespace qbsde
