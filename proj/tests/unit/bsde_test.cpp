#include <cmath>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "qbsde/bsde.hpp"
#include "qbsde/errors.hpp"

using namespace qbsde;

namespace {

BsdeProblem problem(const Generator& g, double alpha, TerminalMap term,
                    ForwardModel fwd = ForwardModel::brownian(), double T = 1.0, double x0 = 0.0) {
  BsdeProblem p;
  p.generator = g;
  p.transform = build_transform(g, alpha);
  p.terminal = std::move(term);
  p.forward = std::move(fwd);
  p.T = T;
  p.x0 = x0;
  return p;
}

std::shared_ptr<const PathBundle> paths(const BsdeProblem& p, std::size_t steps, std::size_t n,
                                        std::uint64_t seed) {
  return std::make_shared<const PathBundle>(simulate(p.forward, p.t0, p.x0, p.T, steps, n, seed));
}

BsdeProblem two_point_case() {
  return problem(restrict_domain(builtin::half_over_y(), OpenInterval(0, 10)), 1.0,
                 terminal::two_point(2, 5, 0));
}

}  // namespace

TEST(Quadrature, ZeroGeneratorIsMartingale) {
  const QuadratureValue v(problem(builtin::constant(0.0), 0.7, terminal::identity()), ExactLaw::brownian);
  for (double t : {0.0, 0.5, 0.9})
    for (double x : {-1.5, 0.0, 2.0}) {
      EXPECT_NEAR(v.y(t, x), x - 0.7, 1e-12);
      EXPECT_NEAR(v.Y(t, x), x, 1e-12);
      EXPECT_NEAR(v.Z(t, x), 1.0, 1e-8);
    }
}

TEST(Quadrature, ConstantGenerator) {
  for (double c : {0.5, 0.2, -0.3}) {
    const QuadratureValue v(problem(builtin::constant(c), 0.0, terminal::identity()), ExactLaw::brownian);
    for (double t : {0.0, 0.3, 0.8})
      for (double x : {-2.0, 0.0, 1.0}) {
        EXPECT_NEAR(v.Y(t, x), x + c * (1 - t), 1e-9) << c;
        EXPECT_NEAR(v.Z(t, x), 1.0, 1e-6) << c;
      }
  }
}

TEST(Quadrature, DeltaOverYLognormal) {
  const double delta = 0.75, s = 0.4;
  const QuadratureValue v(problem(builtin::delta_over_y(delta), 1.0, terminal::exponential(s)),
                          ExactLaw::brownian);
  for (double t : {0.0, 0.5})
    for (double x : {-1.0, 0.0, 1.0}) {
      const double ref = std::exp(s * x + (2 * delta + 1) * s * s * (1 - t) / 2);
      EXPECT_NEAR(v.Y(t, x), ref, 1e-8 * ref);
    }
}

TEST(Quadrature, TwoPointTerminal) {
  const BsdeSolution s = solve_quadrature(two_point_case(), ExactLaw::brownian);
  EXPECT_NEAR(s.y0, 27.0 / 4, 1e-10);
  EXPECT_NEAR(s.Y0, std::sqrt(14.5), 1e-10);
}

TEST(Quadrature, WorkerCountDoesNotChangeResults) {
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  const auto b = paths(p, 10, 500, 3);
  QuadratureOptions one, four;
  four.workers = 4;
  const BsdeSolution a = solve_quadrature(p, ExactLaw::brownian, one, b);
  const BsdeSolution c = solve_quadrature(p, ExactLaw::brownian, four, b);
  EXPECT_EQ(a.Y, c.Y);
  EXPECT_EQ(a.Z, c.Z);
}

TEST(Quadrature, Errors) {
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity(),
                                ForwardModel::geometric_brownian(0, 0.2), 1.0, 1.0);
  EXPECT_THROW(solve_quadrature(p, ExactLaw::brownian), ConfigError);
  const BsdeProblem bad = problem(builtin::half_over_y(), 1.0, terminal::identity());
  EXPECT_THROW(check_terminal_domain(bad), DomainError);
}

TEST(Regression, ZeroGeneratorMatchesMean) {
  const BsdeProblem p = problem(builtin::constant(0.0), 0.0, terminal::identity(),
                                ForwardModel::scaled_brownian(0.3, 1.0));
  const BsdeSolution s = solve_regression(p, paths(p, 10, 20000, 1));
  EXPECT_LE(std::abs(s.Y0 - 0.3), 3 * s.se_Y0) << s.Y0 << " se " << s.se_Y0;
}

TEST(Regression, ConstantHalf) {
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  RegressionOptions o;
  o.degree = 2;
  const BsdeSolution s = solve_regression(p, paths(p, 10, 50000, 2), o);
  EXPECT_LE(std::abs(s.Y0 - 0.5), 3 * s.se_Y0) << s.Y0 << " se " << s.se_Y0;
}

TEST(Regression, TwoPointTerminal) {
  const BsdeProblem p = two_point_case();
  const BsdeSolution s = solve_regression(p, paths(p, 10, 50000, 3));
  EXPECT_LE(std::abs(s.Y0 - std::sqrt(14.5)), 3 * s.se_Y0) << s.Y0 << " se " << s.se_Y0;
}

TEST(Regression, Preconditions) {
  const BsdeProblem p = problem(builtin::constant(0.0), 0.0, terminal::identity());
  RegressionOptions o;
  o.degree = 4;
  EXPECT_THROW(solve_regression(p, paths(p, 4, 30, 1), o), PreconditionError);
}

TEST(Residual, ZeroGeneratorIsExact) {
  const BsdeProblem p = problem(builtin::constant(0.0), 0.0, terminal::identity());
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, {}, paths(p, 20, 2000, 4));
  const ResidualStats r = residual_check(s, p);
  EXPECT_LE(std::abs(r.mean), 3 * r.se + 1e-12);
  EXPECT_LE(r.mean_abs, 1e-9);
}

TEST(Residual, ShrinksUnderRefinement) {
  // Lognormal case; the mean residual falls as the grid is refined.
  const BsdeProblem p = problem(builtin::delta_over_y(0.5), 1.0, terminal::exponential(0.5));
  double prev = 1e9;
  for (std::size_t m : {5, 20, 80}) {
    const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, {}, paths(p, m, 4000, 5));
    const ResidualStats r = residual_check(s, p);
    EXPECT_LT(r.mean_abs, prev) << m;
    prev = r.mean_abs;
  }
}

TEST(Martingale, TwoPointMeansAreConstant) {
  const BsdeProblem p = two_point_case();
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, {}, paths(p, 20, 5000, 6));
  const double t[] = {0.25, 0.5, 0.75};
  for (const auto& m : martingale_diagnostic(s, p, t)) {
    EXPECT_TRUE(m.ok) << m.t;
    EXPECT_NEAR(m.mean, 27.0 / 4, 4 * m.se + 0.1);
  }
}

TEST(Martingale, ConstantHalfUsesExpectedLevel) {
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, {}, paths(p, 20, 20000, 7));
  const double t[] = {0.5};
  const auto pts = martingale_diagnostic(s, p, t);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_TRUE(pts[0].ok);
  EXPECT_NEAR(pts[0].mean, std::exp(0.5) - 1, 4 * pts[0].se + 0.02);
}

TEST(Martingale, IntegrandMomentConstantHalf) {
  // u'(Y_t) Z_t = exp(B_t + (1 - t)/2), so E|u'Z|^2 = e^{1+t}: left Riemann sum.
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  const std::size_t m = 20;
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, {}, paths(p, m, 20000, 8));
  double ref = 0;
  for (std::size_t k = 0; k < m; ++k) ref += std::exp(1.0 + static_cast<double>(k) / m) / m;
  const IntegrandMoment im = integrand_moment(s, p);
  EXPECT_GT(im.se, 0.0);
  EXPECT_NEAR(im.mean, ref, 4 * im.se);
}

TEST(Export, SurfaceAndPathsCsv) {
  const BsdeProblem p = problem(builtin::constant(0.5), 0.0, terminal::identity());
  QuadratureOptions o;
  o.times = {0.0, 0.5};
  o.xs = {-1.0, 0.0, 1.0};
  const BsdeSolution s = solve_quadrature(p, ExactLaw::brownian, o, paths(p, 2, 3, 1));
  std::ostringstream a, b;
  write_surface_csv(a, s);
  write_solution_paths_csv(b, s);
  EXPECT_EQ(a.str().rfind("t,x,y_transformed,Y,Z\n", 0), 0u);
  EXPECT_EQ(b.str().rfind("path,t,Y,Z\n", 0), 0u);
  EXPECT_NE(a.str().find("0.5,1,"), std::string::npos);
}
