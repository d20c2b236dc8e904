#include <gtest/gtest.h>

#include <cmath>

#include "plevy/error.hpp"
#include "plevy/grid.hpp"
#include "plevy/kernels.hpp"

using namespace plevy;

TEST(Grid, IntervalCounts) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 0.25, 0.5);
  ASSERT_EQ(g->omega_nodes().size(), 4u);
  EXPECT_EQ(g->collar_nodes().size(), 4u);
  const double expect[] = {0.125, 0.375, 0.625, 0.875};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(g->coord(g->omega_nodes()[k], 0), expect[k], 1e-15);
  EXPECT_EQ(g->collar_layers(0), 2);
}

TEST(Grid, RectangleCounts) {
  const auto g = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 1.0), 0.5, 0.5);
  EXPECT_EQ(g->omega_nodes().size(), 4u);
  EXPECT_EQ(g->collar_nodes().size(), 12u);
}

TEST(Grid, RejectsBadSpacing) {
  EXPECT_THROW(build_grid(Domain::interval(0.0, 1.0), 2.0, 2.0), Error);
  EXPECT_THROW(build_grid(Domain::interval(0.0, 1.0), 0.25, 0.1), Error);
  EXPECT_THROW(Domain::interval(1.0, 0.0).validate(), Error);
}

TEST(Grid, NoNodeOnBoundaryAndClassification) {
  const auto g = build_grid(Domain::rectangle(-1.0, 1.0, 0.0, 0.5), 1.0 / 16, 0.2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    EXPECT_GT(g->distance_to_boundary(i), 0.0);
    const auto x = g->point(i);
    const bool inside = x[0] > -1 && x[0] < 1 && x[1] > 0 && x[1] < 0.5;
    EXPECT_EQ(g->in_omega(i), inside);
    EXPECT_EQ(g->distance_to_omega(i) == 0.0, inside);
  }
}

TEST(Grid, LexicographicOrderYFastest) {
  const auto g = build_grid(Domain::rectangle(0.0, 1.0, 0.0, 1.0), 0.5, 0.5);
  for (std::size_t i = 1; i < g->size(); ++i) {
    const auto a = g->index(i - 1), b = g->index(i);
    EXPECT_TRUE(a[0] < b[0] || (a[0] == b[0] && a[1] + 1 == b[1]));
    EXPECT_EQ(g->node_at(b[0], b[1]), i);
  }
}

TEST(Grid, IntegrateConstantGivesMeasure) {
  for (double h : {0.1, 0.03, 1.0 / 7}) {
    const auto g = build_grid(Domain::interval(-0.3, 1.4), h, 0.5);
    EXPECT_NEAR(integrate_over_omega(GridFunction(g, 1.0)), 1.7, 1e-13);
  }
  const auto g2 = build_grid(Domain::rectangle(0.0, 2.0, 0.0, 0.5), 0.1, 0.2);
  EXPECT_NEAR(integrate_over_omega(GridFunction(g2, 1.0)), 1.0, 1e-13);
}

TEST(Grid, BoundaryAdjacency) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 0.25, 0.5);
  int adj = 0;
  for (std::size_t i = 0; i < g->size(); ++i) adj += g->boundary_adjacent(i);
  EXPECT_EQ(adj, 4);
}

TEST(Sample, CoordinatesAndCosine) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 0.25, 0.5);
  const auto u = sample(Expression::parse("x"), g);
  for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(u[i], g->coord(i, 0));
  const auto c = sample(Expression::parse("cos(x)"), g);
  EXPECT_NEAR(c[g->omega_nodes()[0]], 0.99219766722932900, 1e-15);
}

TEST(Sample, PoleReportsNode) {
  const auto g = build_grid(Domain::interval(-1.0, 1.0), 0.5, 0.5);
  EXPECT_NO_THROW(sample(Expression::parse("1/x"), g));
  const auto g2 = build_grid(Domain::interval(-0.75, 1.25), 0.5, 0.5);  // a node at 0
  try {
    sample(Expression::parse("1/x"), g2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Evaluation);
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
}

TEST(GridFunction, Arithmetic) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 0.25, 0.25);
  GridFunction a(g, 2.0), b(g, 3.0);
  const auto c = a + 2.0 * b - a;
  for (double v : c.values()) EXPECT_EQ(v, 6.0);
  a *= 0.5;
  EXPECT_EQ(a[0], 1.0);
  EXPECT_NEAR(lp_norm_pow_omega(GridFunction(g, 2.0), 3.0), 8.0, 1e-14);
  EXPECT_NEAR(integrate_over_collar(GridFunction(g, 1.0)), 0.5, 1e-15);
}

TEST(ChooseCollar, FractionalClosedForm) {
  const Kernel k = Kernel::fractional(ExponentDim(2.0, 1), 0.1);
  const double w = choose_collar(k, 0.01);
  const double threshold = std::pow(10.0, 1.0 / 1.8);  // 0.1 W^{-1.8} <= 0.01
  EXPECT_GE(w, threshold);
  EXPECT_LT(w, threshold * std::pow(2.0, 0.25) + 1e-12);
  EXPECT_EQ(choose_collar(k, 1.0), 1.0);
}

TEST(ChooseCollar, RescaledAndExhaustion) {
  const Kernel r = Kernel::rescaled(BaseProfile::algebraic(ExponentDim(2.0, 1)), 0.05);
  const double w = choose_collar(r, 0.01);
  EXPECT_TRUE(std::isfinite(w));
  EXPECT_LE(tail_mass(r, w), 0.01);
  EXPECT_THROW(choose_collar(Kernel::fractional(ExponentDim(2.0, 1), 0.9), 1e-9), Error);
}
