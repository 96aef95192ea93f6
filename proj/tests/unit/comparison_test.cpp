#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "qbsde/comparison.hpp"
#include "qbsde/errors.hpp"

using namespace qbsde;

namespace {

BsdeProblem problem(const Generator& g, double alpha, TerminalMap term) {
  BsdeProblem p;
  p.generator = g;
  p.transform = build_transform(g, alpha);
  p.terminal = std::move(term);
  p.forward = ForwardModel::brownian();
  return p;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

}  // namespace

TEST(Compare, IdenticalProblemsHaveZeroGap) {
  ComparisonCase c;
  c.p1 = c.p2 = problem(builtin::constant(0.5), 0.0, terminal::identity());
  c.f_grid = grid(-3, 3, 31);
  c.condition = ComparisonCondition::a2;
  c.n_paths = 500;
  const ComparisonReport r = compare(c);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_EQ(r.Y1_0, r.Y2_0);
  EXPECT_FALSE(r.strict_checked);
}

TEST(Compare, TwoPointAgainstZeroGenerator) {
  ComparisonCase c;
  c.p1 = problem(restrict_domain(builtin::constant(0.0), OpenInterval(0, 10)), 1.0, terminal::two_point(2, 5, 0));
  c.p2 = problem(restrict_domain(builtin::half_over_y(), OpenInterval(0, 10)), 1.0, terminal::two_point(2, 5, 0));
  c.f_grid = grid(0.1, 9.9, 99);
  c.zeta = 2;
  c.n_paths = 2000;
  const ComparisonReport r = compare(c);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.Y1_0, 3.5, 1e-9);
  EXPECT_NEAR(r.Y2_0, std::sqrt(14.5), 1e-9);
}

TEST(Compare, ConstantGeneratorsUnderA2) {
  ComparisonCase c;
  c.p1 = problem(builtin::constant(0.2), 0.0, terminal::identity());
  c.p2 = problem(builtin::constant(0.5), 0.0, terminal::identity());
  c.f_grid = grid(-5, 5, 11);
  c.condition = ComparisonCondition::a2;
  c.expected_gap = 0.3;
  c.n_paths = 1000;
  const ComparisonReport r = compare(c);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.strict_ok);
  EXPECT_NEAR(r.Y1_0, 0.2, 1e-9);
  EXPECT_NEAR(r.Y2_0, 0.5, 1e-9);
}

TEST(Compare, OrderingEvidenceFailureIsPrecondition) {
  ComparisonCase c;
  c.p1 = problem(builtin::constant(0.5), 0.0, terminal::identity());
  c.p2 = problem(builtin::constant(0.2), 0.0, terminal::identity());
  c.f_grid = grid(-1, 1, 5);
  c.condition = ComparisonCondition::a2;
  EXPECT_THROW(compare(c), PreconditionError);

  ComparisonCase d;
  d.p1 = problem(builtin::constant(0.0), 0.0, terminal::identity());
  d.p2 = problem(builtin::constant(0.5), 0.0, terminal::identity());
  d.f_grid = grid(-1, 1, 5);
  d.condition = ComparisonCondition::a2;  // u_0 is unbounded below
  EXPECT_THROW(compare(d), PreconditionError);
  d.f_grid.clear();
  EXPECT_THROW(compare(d), PreconditionError);
}

TEST(Converse, ConstantGapIsDeterministic) {
  ConverseParams prm;
  prm.n_paths = 2000;
  const ConverseReport r =
      converse_experiment(builtin::constant(0.1), builtin::constant(0.3), 0.0, 1.0, 1.0, 5, prm);
  EXPECT_EQ(r.verdict, ConverseVerdict::contradiction_found);
  for (std::size_t i = 0; i < r.tau.size(); ++i) {
    const double t = r.y1->times[r.tau[i]];
    EXPECT_NEAR(r.gap[i], 0.2 * t, 1e-12);
    EXPECT_GE(r.gap[i], 2 * r.bound[i] - 1e-12);
  }
}

TEST(Converse, RationalGenerators) {
  const Generator f1 = builtin::half_over_y();
  const Generator f2 = builtin::delta_over_y(1.0);
  ConverseParams prm;
  const ConverseReport r = converse_experiment(f1, f2, 0.5, 1.0, 0.2, 2, prm);
  EXPECT_EQ(r.verdict, ConverseVerdict::contradiction_found);
  EXPECT_EQ(r.fraction_ok, 1.0);
  EXPECT_EQ(r.tau.size(), 10000u);
}

TEST(Converse, Preconditions) {
  const Generator f = builtin::constant(0.3);
  EXPECT_THROW(converse_experiment(f, f, 0.0, 1.0, 1.0, 5), PreconditionError);
  EXPECT_THROW(converse_experiment(builtin::constant(0.1), f, 0.0, 0.0, 1.0, 5), PreconditionError);
  EXPECT_THROW(converse_experiment(builtin::half_over_y(), builtin::delta_over_y(1), 0.1, 1, 0.5, 2),
               PreconditionError);
}

TEST(Converse, CsvExport) {
  ConverseParams prm;
  prm.n_paths = 3;
  const ConverseReport r =
      converse_experiment(builtin::constant(0.1), builtin::constant(0.3), 0.0, 1.0, 1.0, 5, prm);
  std::ostringstream os;
  write_converse_csv(os, r);
  EXPECT_EQ(os.str().rfind("path,tau,gap,bound\n", 0), 0u);
}
