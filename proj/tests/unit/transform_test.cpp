#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "qbsde/errors.hpp"
#include "qbsde/generator.hpp"
#include "qbsde/transform.hpp"

using namespace qbsde;

namespace {

const double e = std::exp(1.0);

Transform half_over_y_on_0_10() {
  return build_transform(restrict_domain(builtin::half_over_y(), OpenInterval(0, 10)), 1.0);
}

}  // namespace

TEST(Transform, HalfOverYIsQuadratic) {
  const Transform t = half_over_y_on_0_10();
  for (double x : {0.5, 1.0, 2.0, 3.0, 7.5, 9.9}) EXPECT_NEAR(t.u(x), 0.5 * x * x - 0.5, 1e-12) << x;
  EXPECT_NEAR(t.u(2.0), 1.5, 1e-12);
  EXPECT_NEAR(t.u_prime(3.0), 3.0, 1e-12);
  EXPECT_NEAR(t.u_inv(27.0 / 4), std::sqrt(14.5), 1e-12);
}

TEST(Transform, ConstantHalfIsExpMinusOne) {
  const Transform t = build_transform(builtin::constant(0.5), 0.0);
  EXPECT_NEAR(t.u(1.0), e - 1, 1e-12);
  EXPECT_NEAR(t.u_prime(1.0), e, 1e-12);
  EXPECT_NEAR(t.u_inv(e - 1), 1.0, 1e-12);
  EXPECT_EQ(t.range().lo(), -1.0);
  EXPECT_FALSE(t.range().upper_finite());
}

TEST(Transform, ZeroGeneratorIsShift) {
  for (double alpha : {-3.0, 0.0, 2.5}) {
    const Transform t = build_transform(builtin::constant(0.0), alpha);
    for (double x : {-4.0, 0.0, 1.0, 10.0}) EXPECT_NEAR(t.u(x), x - alpha, 1e-12);
  }
}

TEST(Transform, BaseIsZeroAndSlopeOne) {
  for (const auto& spec : {"const 0.3", "half_over_y", "abs_log_over_y", "inv_y_squared_plus_one"}) {
    const Generator g = parse_builtin(spec);
    const double alpha = default_base_point(g.domain);
    const Transform t = build_transform(g, alpha);
    EXPECT_EQ(t.u(alpha), 0.0) << spec;
    EXPECT_NEAR(t.u_prime(alpha), 1.0, 1e-14) << spec;
    EXPECT_NEAR(t.u_inv(0.0), alpha, 1e-12) << spec;
  }
}

TEST(Transform, BoundedRangeMatchesPowerIntegral) {
  const Generator g = expression_generator("-1/((y-1)*(y-6))", OpenInterval(1, 6));
  const Transform t = build_transform(g, 3.5, 1e-11);
  ASSERT_TRUE(t.range().bounded());
  // exp(2 int_3.5^y f) = ((y-1)/(6-y))^{2/5}; with y = 1 + 5s the integral
  // is an incomplete beta function B(7/5, 3/5) I_s(7/5, 3/5).
  const double a = 1.4, b = 0.6, B = boost::math::beta(a, b);
  const auto u = [&](double x) {
    return 5 * B * (boost::math::ibeta(a, b, (x - 1) / 5) - boost::math::ibeta(a, b, 0.5));
  };
  for (double x : {1.01, 1.5, 2.0, 3.0, 4.0, 5.5, 5.99}) EXPECT_NEAR(t.u(x), u(x), 1e-9) << x;
  EXPECT_NEAR(t.range().lo(), u(1.0), 1e-9);
  EXPECT_NEAR(t.range().hi(), u(6.0), 1e-9);
}

TEST(Transform, ChangeBasePoint) {
  const Transform t = build_transform(builtin::constant(0.5), 0.0);
  auto ab = t.change_base_point(0.0);
  EXPECT_DOUBLE_EQ(ab.a, 1.0);
  EXPECT_DOUBLE_EQ(ab.b, 0.0);
  ab = t.change_base_point(1.0);
  EXPECT_NEAR(ab.a, e, 1e-12);
  EXPECT_NEAR(ab.b, e - 1, 1e-12);

  const auto ab2 = half_over_y_on_0_10().change_base_point(2.0);
  EXPECT_NEAR(ab2.a, 2.0, 1e-12);
  EXPECT_NEAR(ab2.b, 1.5, 1e-12);
}

TEST(Transform, ExponentialBound) {
  Generator one = restrict_domain(builtin::constant(1.0), OpenInterval(0, kInf));
  const Transform t1 = build_transform(one, 1.0);
  EXPECT_NEAR(t1.u(2.0), (std::exp(2.0) - 1) / 2, 1e-12);
  EXPECT_TRUE(t1.exp_bound_check(2.0));

  const Transform t2 = build_transform(builtin::inv_y_squared_plus_one(), 1.0);
  for (double x : {0.2, 0.7, 1.0, 1.8, 3.0}) EXPECT_TRUE(t2.exp_bound_check(x)) << x;

  Generator zero = builtin::constant(0.0);
  zero.lower_bound.reset();
  zero.upper_bound.reset();
  EXPECT_THROW(build_transform(zero, 0.0).exp_bound_check(1.0), UnsupportedError);
}

TEST(Transform, Errors) {
  EXPECT_THROW(build_transform(builtin::half_over_y(), -1.0), DomainError);
  // 1/(y-1)^2 is not integrable across y = 1.
  EXPECT_THROW(build_transform(expression_generator("1/(y-1)^2", OpenInterval(0, 3)), 2.0),
               NotLocallyIntegrableError);
  const Transform t = half_over_y_on_0_10();
  EXPECT_THROW(t.u(11.0), DomainError);
  EXPECT_THROW(t.u_prime(-1.0), DomainError);
  EXPECT_THROW(t.u_inv(60.0), RangeError);
  EXPECT_THROW(t.change_base_point(0.0), DomainError);
}

TEST(Transform, OdeResidual) {
  for (const auto& spec : {"const 0.5", "half_over_y", "inv_y_squared_plus_one", "delta_over_y 2"}) {
    const Generator g = parse_builtin(spec);
    const double alpha = default_base_point(g.domain);
    const Transform t = build_transform(g, alpha);
    const double h = 1e-4;
    for (double x : {alpha * 0.5 + 0.5, alpha + 0.25, alpha + 1.0}) {
      const double fd = (t.u(x + h) - 2 * t.u(x) + t.u(x - h)) / (h * h);
      const double ref = 2 * g.f(x) * t.u_prime(x);
      EXPECT_NEAR(fd, ref, 1e-4 * std::max(1.0, std::abs(ref))) << spec << " at " << x;
    }
  }
}

TEST(Transform, TabulatedAgreesWithClosedForm) {
  TransformOptions o;
  o.use_closed_form = false;
  const Transform tab = build_transform(builtin::half_over_y(), 1.0, o);
  EXPECT_EQ(tab.representation(), Transform::Representation::tabulated);
  for (double x : {0.3, 1.0, 2.0, 5.0, 20.0}) EXPECT_NEAR(tab.u(x), 0.5 * x * x - 0.5, 1e-9 * x * x) << x;
}

TEST(Transform, CsvRoundTrip) {
  const Transform t = half_over_y_on_0_10();
  std::stringstream ss;
  t.write_csv(ss);
  EXPECT_EQ(ss.str().substr(0, 11), "x,u,uprime\n");
  const Transform back = Transform::read_csv(ss);
  EXPECT_TRUE(back.imported());
  EXPECT_NEAR(back.base_point(), 1.0, 1e-9);
  for (double x : {0.5, 2.0, 6.0}) EXPECT_NEAR(back.u(x), t.u(x), 1e-6 * std::max(1.0, t.u(x)));
}

TEST(Transform, InvariantReportIsClean) {
  for (const auto& spec : {"const -0.4", "half_over_y", "abs_log_over_y", "neg_inv_(y-1)(y-6)"}) {
    const Generator g = parse_builtin(spec);
    const InvariantReport r = check_invariants(build_transform(g, default_base_point(g.domain)));
    EXPECT_TRUE(r.ok) << spec << ": roundtrip " << r.max_roundtrip_error << " ode " << r.max_ode_residual;
  }
}
