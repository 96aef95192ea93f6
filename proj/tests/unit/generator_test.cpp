#include <cmath>

#include <gtest/gtest.h>

#include "qbsde/errors.hpp"
#include "qbsde/expr.hpp"
#include "qbsde/generator.hpp"
#include "qbsde/terminal.hpp"

using namespace qbsde;

TEST(Expression, Precedence) {
  EXPECT_DOUBLE_EQ(Expression::parse("-y^2")(3.0), -9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1+2*3-4/2")(0.0), 5.0);
  EXPECT_DOUBLE_EQ(Expression::parse("abs(log(exp(-y)))")(2.5), 2.5);
  EXPECT_DOUBLE_EQ(Expression::parse("t*x+1", {"t", "x"})(2.0, 3.0), 7.0);
}

TEST(Expression, ErrorsCarryColumn) {
  try {
    Expression::parse("1 + * y");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Expression::parse("z + 1"), ConfigError);
  EXPECT_THROW(Expression::parse("sin(y)"), ConfigError);
}

TEST(Builtins, ParseAndMetadata) {
  const Generator h = parse_builtin("half_over_y");
  EXPECT_DOUBLE_EQ(h.f(2.0), 0.25);
  EXPECT_EQ(h.domain.lo(), 0.0);
  EXPECT_EQ(h.sign_class, SignClass::nonnegative);
  const Generator n = parse_builtin("neg_inv_(y-1)(y-6)");
  EXPECT_TRUE(n.domain.bounded());
  EXPECT_DOUBLE_EQ(n.f(3.5), 1.0 / 6.25);
  EXPECT_DOUBLE_EQ(parse_builtin("delta_over_y 3").f(2.0), 1.5);
  EXPECT_DOUBLE_EQ(parse_builtin("const -0.25").f(100.0), -0.25);
  EXPECT_THROW(parse_builtin("nope"), ConfigError);
  EXPECT_THROW(parse_builtin("const"), ConfigError);
}

TEST(Builtins, InconsistentMetadataIsRejected) {
  Generator g = builtin::constant(0.5);
  g.sign_class = SignClass::nonpositive;
  EXPECT_THROW(g.validate(), ValidationError);
  Generator b = builtin::constant(0.5);
  b.lower_bound = 1.0;
  b.upper_bound = 0.0;
  EXPECT_THROW(b.validate(), ValidationError);
}

TEST(Builtins, DeclaredBoundsHold) {
  for (const auto& spec : {"half_over_y", "abs_log_over_y", "inv_y_squared_plus_one", "const 2"}) {
    const Generator g = parse_builtin(spec);
    const BoundCheck c = verify_declared_bounds(g, 0.05, 20.0);
    EXPECT_TRUE(c.ok) << spec << ": " << c.message;
  }
  Generator lie = expression_generator("y - 1", OpenInterval(0, 5));
  lie.sign_class = SignClass::nonnegative;
  EXPECT_FALSE(verify_declared_bounds(lie, 0.1, 4.9).ok);
}

TEST(Builtins, RestrictDomain) {
  const Generator g = restrict_domain(builtin::half_over_y(), OpenInterval(0, 10));
  EXPECT_EQ(g.domain.hi(), 10.0);
  EXPECT_THROW(restrict_domain(builtin::half_over_y(), OpenInterval(-1, 1)), ValidationError);
}

TEST(Terminal, Specs) {
  EXPECT_DOUBLE_EQ(parse_terminal("identity")(1.5), 1.5);
  EXPECT_DOUBLE_EQ(parse_terminal("affine 2 1")(1.5), 4.0);
  EXPECT_DOUBLE_EQ(parse_terminal("exp 0.5")(2.0), std::exp(1.0));
  const TerminalMap tp = parse_terminal("two_point 2 5 0");
  EXPECT_TRUE(tp.piecewise_constant());
  EXPECT_EQ(tp(-0.1), 2.0);
  EXPECT_EQ(tp(0.0), 5.0);
  EXPECT_DOUBLE_EQ(parse_terminal("expr x^2 + 1")(2.0), 5.0);
  EXPECT_THROW(parse_terminal("step 1"), ConfigError);
}
