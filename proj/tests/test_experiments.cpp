#include <gtest/gtest.h>

#include <cmath>

#include "plevy/error.hpp"
#include "plevy/experiments.hpp"

using namespace plevy;

TEST(Monotone, WeakAndStrict) {
  EXPECT_TRUE(weakly_decreasing({4, 3, 2, 1}));
  EXPECT_TRUE(weakly_decreasing({4, 3, 3.2, 1}));   // one bump under 10%
  EXPECT_FALSE(weakly_decreasing({4, 3, 3.4, 1}));  // bump over 10%
  EXPECT_FALSE(weakly_decreasing({4, 3, 3.2, 3.3}));
  EXPECT_TRUE(strictly_decreasing({4, 3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({4, 3, 3, 1}));
}

TEST(Verdicts, RatioFinalAndFloor) {
  SweepReport r;
  r.name = "t";
  r.columns = {"eps", "a", "b", "c"};
  r.gap_columns = {{"a", 0.1, GuardKind::RatioToFirst}, {"b", 0.05, GuardKind::Final}, {"c", 0.1, GuardKind::RatioToFirst, 1e-7}};
  r.add_row({0.4, 1.0, 0.5, 3e-8});
  r.add_row({0.2, 0.3, 0.1, 5e-8});
  r.add_row({0.1, 0.05, 0.04, 2e-8});
  const auto v = verdicts(r);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_TRUE(v[0].pass());
  EXPECT_NEAR(v[0].ratio, 0.05, 1e-15);
  EXPECT_TRUE(v[1].pass());
  EXPECT_EQ(v[1].last, 0.04);
  EXPECT_TRUE(v[2].pass());  // non-monotone but under the floor
  r.add_row({0.05, 0.2, 0.06, 1e-6});
  const auto w = verdicts(r);
  EXPECT_FALSE(w[0].pass());
  EXPECT_FALSE(w[1].pass());
  EXPECT_FALSE(w[2].pass());
}

TEST(Report, RowsColumnsAndCsv) {
  SweepReport r;
  r.name = "demo";
  r.columns = {"eps", "gap"};
  r.add_row({0.5, 1.0 / 3.0});
  EXPECT_THROW(r.add_row({0.1, NAN}), Error);
  EXPECT_THROW(r.add_row({0.1}), Error);
  EXPECT_THROW(r.column("nope"), Error);
  EXPECT_EQ(r.series("gap").size(), 1u);
  EXPECT_EQ(to_csv(r), "eps,gap\n0.5,0.33333333333333331\n");
  const auto j = summary_json(r);
  EXPECT_EQ(j["name"], "demo");
}

TEST(Report, FingerprintIsFnv1a) {
  EXPECT_EQ(fingerprint(""), "cbf29ce484222325");
  EXPECT_EQ(fingerprint("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fingerprint("abc"), fingerprint("abc"));
  EXPECT_NE(fingerprint("abc"), fingerprint("abd"));
}

TEST(Transfer, LinearIsExact) {
  const auto fine = build_grid(Domain::interval(0.0, 1.0), 1.0 / 256, 1.0 / 256);
  const auto coarse = build_grid(Domain::interval(0.0, 1.0), 1.0 / 20, 0.3);
  const auto u = sample(Expression::parse("2*x + 1"), fine);
  const auto t = transfer_1d(u, 1.0, 3.0, coarse);
  for (std::size_t i = 0; i < coarse->size(); ++i) EXPECT_NEAR(t[i], 2.0 * coarse->coord(i, 0) + 1.0, 1e-12);
  GridFunction v = sample(Expression::parse("x"), coarse);
  for (std::size_t i : coarse->collar_nodes()) v[i] = 99.0;
  const auto e = extend_linear_1d(v);
  for (std::size_t i = 0; i < coarse->size(); ++i) EXPECT_NEAR(e[i], coarse->coord(i, 0), 1e-12);
}

TEST(GradientNorm, Quadrature) {
  EXPECT_NEAR(gradient_lp_pow(Expression::parse("x^2"), 2.0, 0.0, 1.0), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(gradient_lp_pow(Expression::parse("sin(pi*x)/pi"), 3.0, 0.0, 1.0), 4.0 / (3.0 * 3.14159265358979323846),
              1e-10);
}

TEST(Settings, SpacingAndFamilies) {
  SweepSettings s;
  const auto k = make_kernel(s, 0.4);
  EXPECT_EQ(k.family(), KernelFamily::Rescaled);
  const auto m = make_model(s, k, 0.4);
  EXPECT_NEAR(m->grid().spacing(0), 1.0 / 64, 1e-15);
  const auto m2 = make_model(s, make_kernel(s, 0.05), 0.05);
  EXPECT_NEAR(m2->grid().spacing(0), 0.05 / 8, 1e-15);
  EXPECT_GE(m2->grid().collar_width(), 0.05);
  s.family = "fractional";
  EXPECT_EQ(make_kernel(s, 0.3).family(), KernelFamily::Fractional);
  s.family = "nonsense";
  EXPECT_THROW(make_kernel(s, 0.3), Error);
}

TEST(Sweeps, AffineDirichletIsExact) {
  SweepSettings s;
  s.ladder = {0.4, 0.2};
  const auto r = dirichlet_convergence(Expression::parse("0"), Expression::parse("x"), s);
  ASSERT_EQ(r.rows.size(), 2u);
  for (double g : r.series("gap_omega")) EXPECT_LT(g, 1e-7);
  for (const auto& v : verdicts(r)) EXPECT_TRUE(v.pass()) << v.column;
}

TEST(Sweeps, BbmRatioApproachesOne) {
  SweepSettings s;
  s.fixed_spacing = 1.0 / 256;
  s.domain = Domain::interval(-1.0, 1.0);
  const auto r = bbm_sweep(Expression::parse("max(0, 1 - abs(x))"), s);
  const auto ratio = r.series("ratio_gap");
  EXPECT_TRUE(strictly_decreasing(ratio));
  EXPECT_LT(ratio.back(), 0.05);
}
