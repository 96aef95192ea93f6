#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "qbsde/errors.hpp"
#include "qbsde/pde.hpp"

using namespace qbsde;

namespace {

PdeProblem problem(const Generator& g, double alpha, TerminalMap term, int n_t = 100, int n_x = 121) {
  PdeProblem p;
  p.generator = g;
  p.transform = build_transform(g, alpha);
  p.terminal = std::move(term);
  p.forward = ForwardModel::brownian();
  p.n_t = n_t;
  p.n_x = n_x;
  p.assumptions = {true, true, true, false};
  return p;
}

double max_error(const ValueSurface& s, double c, double T, double xlo, double xhi) {
  double e = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    for (std::size_t j = 0; j < s.nx(); ++j)
      if (s.xs[j] >= xlo && s.xs[j] <= xhi)
        e = std::max(e, std::abs(s.v_at(i, j) - (s.xs[j] + c * (T - s.times[i]))));
  return e;
}

}  // namespace

TEST(FeynmanKac, ConstantGeneratorClosedForm) {
  const ValueSurface s = solve_feynman_kac(problem(builtin::constant(0.5), 0.0, terminal::identity()));
  EXPECT_LE(max_error(s, 0.5, 1.0, -6, 6), 1e-9);
  EXPECT_NEAR(s.v_interp(0, 0.0), 0.5, 1e-9);
}

TEST(FeynmanKac, ZeroGeneratorIsLinear) {
  const ValueSurface s = solve_feynman_kac(problem(builtin::constant(0.0), 0.0, terminal::affine(2, 1)));
  for (std::size_t j = 0; j < s.nx(); j += 10) EXPECT_NEAR(s.v_at(0, j), 2 * s.xs[j] + 1, 1e-10);
}

TEST(FeynmanKac, DeltaOverYLognormal) {
  const double delta = 0.5, s0 = 0.4;
  PdeProblem p = problem(builtin::delta_over_y(delta), 1.0, terminal::exponential(s0), 20, 41);
  p.x_min = -2;
  p.x_max = 2;
  const ValueSurface s = solve_feynman_kac(p);
  for (std::size_t i = 0; i < s.times.size(); i += 5)
    for (std::size_t j = 0; j < s.nx(); j += 5) {
      const double ref = std::exp(s0 * s.xs[j] + (2 * delta + 1) * s0 * s0 * (1 - s.times[i]) / 2);
      EXPECT_NEAR(s.v_at(i, j), ref, 1e-8 * ref);
    }
}

TEST(FeynmanKac, MonteCarloWithinError) {
  PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(), 4, 5);
  p.x_min = -1;
  p.x_max = 1;
  FkParams prm;
  prm.engine = Engine::regression;
  prm.mc_paths = 4000;
  const ValueSurface s = solve_feynman_kac(p, prm);
  EXPECT_GT(s.max_se, 0.0);
  EXPECT_LE(max_error(s, 0.5, 1.0, -1, 1), 5 * s.max_se + 0.02);
}

TEST(FiniteDifference, ConstantGeneratorInterior) {
  const ValueSurface s = solve_fd_oracle(problem(builtin::constant(0.5), 0.0, terminal::identity(), 200, 241));
  EXPECT_LE(max_error(s, 0.5, 1.0, -2, 2), 2e-4);
}

TEST(FiniteDifference, ConstantTerminal) {
  const ValueSurface s = solve_fd_oracle(problem(builtin::constant(0.5), 0.0, terminal::constant(1.3)));
  for (double v : s.v) EXPECT_NEAR(v, 1.3, 1e-12);
}

TEST(FiniteDifference, PecletInstability) {
  PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(), 20, 11);
  p.forward = ForwardModel::scaled_brownian(50.0, 0.1);
  EXPECT_THROW(solve_fd_oracle(p), ResolutionError);
}

TEST(Residual, ExactSurfaceCancels) {
  const PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(), 40, 41);
  ValueSurface s;
  for (int i = 0; i <= p.n_t; ++i) s.times.push_back(p.T * i / p.n_t);
  for (int j = 0; j < p.n_x; ++j) s.xs.push_back(p.x_min + (p.x_max - p.x_min) * j / (p.n_x - 1));
  for (double t : s.times)
    for (double x : s.xs) s.v.push_back(x + 0.5 * (1 - t));
  s.w.assign(s.v.size(), 0.0);
  const ResidualGrid r = pde_residual(s, p, {0.2, 0.8, -2, 2});
  EXPECT_LE(r.max_abs, 1e-10);

  std::fill(s.v.begin(), s.v.end(), 0.7);
  EXPECT_EQ(pde_residual(s, p, {0.2, 0.8, -2, 2}).max_abs, 0.0);
}

TEST(Residual, DecaysUnderRefinement) {
  double prev = 1e9;
  for (int k : {1, 2}) {
    // dx and dt both halve: 101 -> 201 nodes on [-3, 3].
    PdeProblem p = problem(builtin::delta_over_y(0.5), 1.0, terminal::exponential(0.4), 100 * k, 100 * k + 1);
    p.x_min = -3;
    p.x_max = 3;
    const ResidualGrid r = pde_residual(solve_fd_oracle(p), p, {0.1, 0.9, -1, 1});
    EXPECT_LT(r.max_abs, prev / 3) << k;
    prev = r.max_abs;
  }
}

TEST(Residual, RejectsBoundaryLayers) {
  const PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(), 20, 121);
  const ValueSurface s = solve_feynman_kac(p);
  EXPECT_THROW(pde_residual(s, p, {0.0, 0.5, -1, 1}), PreconditionError);
  EXPECT_THROW(pde_residual(s, p, {0.2, 0.5, -6, 1}), PreconditionError);
}

TEST(Validate, AssumptionsAreNamed) {
  PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  p.assumptions.coefficients_lipschitz = false;
  try {
    validate(p);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("coefficients_lipschitz"), std::string::npos);
  }
  PdeProblem q = problem(builtin::constant(-0.5), 0.0, terminal::identity());
  EXPECT_THROW(validate(q), PreconditionError);
  q.assumptions.allow_nonpositive = true;
  EXPECT_NO_THROW(validate(q));
}

TEST(Export, SurfaceCsv) {
  const PdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(), 10, 121);
  const ValueSurface s = solve_feynman_kac(p);
  const ResidualGrid r = pde_residual(s, p, {0.3, 0.7, -2, 2});
  std::ostringstream os;
  write_surface_csv(os, s, &r);
  EXPECT_EQ(os.str().rfind("t,x,v,w,residual\n", 0), 0u);
}
