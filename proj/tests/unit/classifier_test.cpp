#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qbsde/classifier.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/rng.hpp"
#include "qbsde/transform.hpp"

using namespace qbsde;

namespace {

SpaceReport run(const Generator& g, const TerminalMeta& m) {
  const Transform t = build_transform(g, default_base_point(g.domain));
  return classify(g, m, g.domain.bounded(), t.range());
}

}  // namespace

TEST(Classifier, BoundedDomainGivesBoundedY) {
  TerminalMeta m;
  m.uf_xi_in_L1 = true;
  const SpaceReport r = run(builtin::neg_inv_quadratic(), m);
  EXPECT_TRUE(r.has(Conclusion::solution_exists_unique));
  EXPECT_TRUE(r.has(Conclusion::Y_in_S_inf));
  EXPECT_FALSE(r.has(Conclusion::YZ_in_S_inf_H2BMO_with_range));
}

TEST(Classifier, CompactRangeAddsBmo) {
  TerminalMeta m;
  m.uf_xi_in_L1 = true;
  m.range_subset = ClosedInterval{2, 3};
  const SpaceReport r = run(builtin::neg_inv_quadratic(), m);
  const ReportEntry* e = r.find(Conclusion::YZ_in_S_inf_H2BMO_with_range);
  ASSERT_NE(e, nullptr);
  ASSERT_TRUE(e->y_range.has_value());
  EXPECT_EQ(*e->y_range, (ClosedInterval{2, 3}));
  EXPECT_TRUE(r.has(Conclusion::Y_in_S_inf));
}

TEST(Classifier, BoundedBelowGeneratorGivesSpH2p) {
  TerminalMeta m;
  m.xi_in_L1 = true;
  m.xi_minus_in_Lp = 2;
  m.uf_xi_in_L1 = true;
  const SpaceReport r = run(builtin::inv_y_squared_plus_one(), m);
  const ReportEntry* e = r.find(Conclusion::YZ_in_Sp_H2p);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->p, 2.0);
  EXPECT_FALSE(r.has(Conclusion::Y_in_S_inf));
}

TEST(Classifier, NonnegativeGeneratorGivesYInSp) {
  TerminalMeta m;
  m.xi_in_L1 = true;
  m.xi_minus_in_Lp = 2;
  m.uf_xi_in_Lp = 2;
  m.uf_xi_in_L1 = true;
  const SpaceReport r = run(builtin::abs_log_over_y(), m);
  const ReportEntry* e = r.find(Conclusion::Y_in_Sp);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->p, 2.0);
  // |ln y|/y has no positive lower bound, so the (Y, Z) statement is absent.
  EXPECT_FALSE(r.has(Conclusion::YZ_in_Sp_H2p));
}

TEST(Classifier, NecessaryConditionFires) {
  TerminalMeta m;
  m.uf_xi_in_L1 = false;
  const SpaceReport r = run(builtin::constant(0.5), m);  // V = (-1, inf)
  ASSERT_TRUE(r.has(Conclusion::necessary_L1_violated));
  EXPECT_EQ(r.entries.size(), 1u);
}

TEST(Classifier, UnboundedDomainWithBoundedUfGivesNoSInf) {
  TerminalMeta m;
  m.uf_xi_in_Linf = true;
  const SpaceReport r = run(builtin::constant(0.5), m);
  EXPECT_TRUE(r.has(Conclusion::solution_exists_unique));
  EXPECT_FALSE(r.has(Conclusion::Y_in_S_inf));
  EXPECT_FALSE(r.has(Conclusion::YZ_in_S_inf_H2BMO_with_range));
}

TEST(Classifier, PositiveControlsForSInf) {
  // Bounded D, or a declared compact range, does give S^inf.
  TerminalMeta m;
  m.uf_xi_in_Linf = true;
  EXPECT_TRUE(run(builtin::neg_inv_quadratic(), m).has(Conclusion::Y_in_S_inf));
  m.range_subset = ClosedInterval{-1, 1};
  EXPECT_TRUE(run(builtin::constant(0.5), m).has(Conclusion::YZ_in_S_inf_H2BMO_with_range));
}

TEST(Classifier, StrongerMetadataImpliesWeaker) {
  TerminalMeta weak;
  weak.xi_in_L1 = true;
  weak.xi_minus_in_Lp = 2;
  weak.uf_xi_in_L1 = true;
  TerminalMeta strong = weak;
  strong.xi_minus_in_Lp = 4;
  strong.uf_xi_in_Linf = true;
  const Generator g = builtin::inv_y_squared_plus_one();
  EXPECT_TRUE(run(g, strong).implies(run(g, weak)));
  EXPECT_FALSE(run(g, weak).implies(run(g, strong)));
}

TEST(Classifier, InconsistentMetadataIsRejected) {
  TerminalMeta m;
  m.uf_xi_in_L1 = false;
  m.uf_xi_in_Linf = true;
  EXPECT_THROW(run(builtin::constant(0.5), m), ValidationError);
  TerminalMeta p;
  p.xi_in_Lp = 0.5;
  EXPECT_THROW(run(builtin::constant(0.5), p), ValidationError);
}

TEST(Classifier, ReportFormats) {
  TerminalMeta m;
  m.uf_xi_in_L1 = true;
  const SpaceReport r = run(builtin::neg_inv_quadratic(), m);
  EXPECT_NE(r.to_text().find("Y_in_S_inf | bounded-domain | D_bounded, uf_xi_in_L1"), std::string::npos)
      << r.to_text();
  EXPECT_EQ(r.to_csv().rfind("conclusion,p,range_lo,range_hi,source,trail\n", 0), 0u);
}

TEST(TailDiagnostic, BoundedAboveSamples) {
  const Transform t = build_transform(builtin::constant(0.5), 0.0);
  NormalStream ns(7);
  std::vector<double> xi;
  for (int i = 0; i < 5000; ++i) xi.push_back(std::min(ns(i), 2.0));
  const auto d = check_necessary_condition(t, xi);
  EXPECT_EQ(d.verdict, TailDiagnostic::Verdict::plausibly_L1);
}

TEST(TailDiagnostic, HeavyTailWarns) {
  // e^xi Pareto with index 0.8, so E[u(xi)] = E[e^xi] - 1 is infinite.
  const Transform t = build_transform(builtin::constant(0.5), 0.0);
  NormalStream ns(11);
  std::vector<double> xi;
  for (int i = 0; i < 20000; ++i) xi.push_back(-std::log(ns.uniform(i)) / 0.8);
  const auto d = check_necessary_condition(t, xi);
  EXPECT_EQ(d.verdict, TailDiagnostic::Verdict::heavy_tail_warning) << d.tail_index;
  EXPECT_NEAR(d.tail_index, 0.8, 0.1);
}

TEST(TailDiagnostic, ConstantTerminal) {
  const Transform t = build_transform(builtin::constant(0.5), 0.0);
  const std::vector<double> xi(100, 1.0);
  const auto d = check_necessary_condition(t, xi);
  EXPECT_EQ(d.verdict, TailDiagnostic::Verdict::plausibly_L1);
  EXPECT_NEAR(d.mean, std::exp(1.0) - 1, 1e-12);
}

TEST(TailDiagnostic, InapplicableWhenUnboundedBothSides) {
  const Transform t = build_transform(builtin::constant(0.0), 0.0);
  const std::vector<double> xi{0.0, 1.0};
  EXPECT_THROW(check_necessary_condition(t, xi), InapplicableError);
}
