#include <gtest/gtest.h>

#include <cmath>

#include "plevy/traces.hpp"

using namespace plevy;

TEST(Traces, LocalHyperbolicOracle) {
  // min int u^2 + u'^2 with u(0) = 0, u(1) = 1 is attained by sinh(x)/sinh(1), value coth(1).
  const auto g = build_grid(Domain::interval(0.0, 1.0), 1.0 / 1024, 1.0 / 1024);
  const auto r = local_trace_norm_1d(g, 2.0, {0.0, 1.0});
  EXPECT_NEAR(r.norm, std::sqrt(1.0 / std::tanh(1.0)), 1e-3);
  for (std::size_t i : g->omega_nodes()) {
    const double x = g->coord(i, 0);
    EXPECT_NEAR(r.solution.u[i], std::sinh(x) / std::sinh(1.0), 1e-4);
  }
  EXPECT_EQ(local_trace_norm_1d(g, 3.0, {0.0, 0.0}).norm, 0.0);
}

TEST(Traces, NonlocalZeroDatumAndFeasibility) {
  const ExponentDim pd(2.0, 1);
  const auto m = std::make_shared<const NonlocalModel>(Kernel::rescaled(BaseProfile::indicator(pd), 0.2),
                                                       build_grid(Domain::interval(0.0, 1.0), 1.0 / 64, 0.25));
  EXPECT_EQ(nonlocal_trace_norm(m, GridFunction(m->grid_ptr())).norm, 0.0);
  const auto datum = sample(Expression::parse("x"), m->grid_ptr());
  const auto r = nonlocal_trace_norm(m, datum);
  // The datum itself is an admissible extension.
  EXPECT_LE(r.norm, nonlocal_norm(*m, datum, NormScope::FullSpacePair) + 1e-12);
  EXPECT_GT(r.norm, 0.0);
  for (std::size_t i : m->grid().collar_nodes()) EXPECT_EQ(r.solution.u[i], datum[i]);
  EXPECT_NEAR(nonlocal_norm(*m, r.solution.u, NormScope::FullSpacePair), r.norm, 1e-9);
}

TEST(Traces, RobustLiftingIsHarmonicExtension) {
  const ExponentDim pd(3.0, 1);
  const auto m = std::make_shared<const NonlocalModel>(Kernel::rescaled(BaseProfile::indicator(pd), 0.2),
                                                       build_grid(Domain::interval(0.0, 1.0), 1.0 / 64, 0.25));
  const auto datum = sample(Expression::parse("1 - 2*x"), m->grid_ptr());
  const auto lift = robust_lifting(m, datum);
  for (std::size_t i = 0; i < datum.size(); ++i) EXPECT_NEAR(lift.u[i], datum[i], 1e-7);
}
