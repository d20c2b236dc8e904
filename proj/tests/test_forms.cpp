#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plevy/calculus.hpp"
#include "plevy/forms.hpp"

using namespace plevy;

namespace {

std::shared_ptr<NonlocalModel> model(double p, int d, double eps, double h) {
  const ExponentDim pd(p, d);
  const Domain dom = d == 1 ? Domain::interval(0.0, 1.0) : Domain::rectangle(0.0, 1.0, 0.0, 0.5);
  return std::make_shared<NonlocalModel>(Kernel::rescaled(BaseProfile::indicator(pd), eps),
                                         build_grid(dom, h, eps + h));
}

GridFunction random_fn(const GridPtr& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

}  // namespace

TEST(Forms, PairDecomposition) {
  for (int d : {1, 2})
    for (double p : {1.5, 2.0, 3.0}) {
      const auto m = model(p, d, 0.2, d == 1 ? 1.0 / 32 : 1.0 / 16);
      const auto u = random_fn(m->grid_ptr(), 1), v = random_fn(m->grid_ptr(), 2);
      const double full = energy(FormKind::Full, *m, u, v), reg = energy(FormKind::Regional, *m, u, v);
      const double cr = energy(FormKind::Cross, *m, u, v), plus = energy(FormKind::Plus, *m, u, v);
      const double tol = 1e-11 * (std::abs(full) + std::abs(reg) + std::abs(cr));
      EXPECT_NEAR(full, reg + 2.0 * cr, tol);
      EXPECT_NEAR(plus, reg + cr, tol);
    }
}

TEST(Forms, ConstantsHaveNoEnergyAndLinearInV) {
  const auto m = model(3.0, 1, 0.2, 1.0 / 32);
  const GridFunction c(m->grid_ptr(), 4.2);
  const auto v = random_fn(m->grid_ptr(), 3), w = random_fn(m->grid_ptr(), 4);
  EXPECT_EQ(energy(FormKind::Full, *m, c, v), 0.0);
  const auto u = random_fn(m->grid_ptr(), 5);
  const double lhs = energy(FormKind::Full, *m, u, 2.0 * v + w);
  const double rhs = 2.0 * energy(FormKind::Full, *m, u, v) + energy(FormKind::Full, *m, u, w);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
  // homogeneity of degree p - 1 in u
  EXPECT_NEAR(energy(FormKind::Full, *m, -2.0 * u, v), -4.0 * energy(FormKind::Full, *m, u, v),
              1e-12 * std::abs(rhs));
}

TEST(Forms, EnergyIsNonNegative) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = model(p, 2, 0.25, 1.0 / 16);
    const auto u = random_fn(m->grid_ptr(), 9);
    for (auto k : {FormKind::Full, FormKind::Regional, FormKind::Cross, FormKind::Plus})
      EXPECT_GE(energy(k, *m, u, u), 0.0);
  }
}

TEST(Forms, SandwichOnDiscreteForms) {
  for (double p : {1.5, 2.0, 3.0})
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto m = model(p, 1, 0.2, 1.0 / 32);
      const auto u = random_fn(m->grid_ptr(), 100 + s), v = random_fn(m->grid_ptr(), 200 + s);
      const auto dlt = u - v;
      FormSample fs;
      fs.uu = energy(FormKind::Full, *m, u, u);
      fs.vv = energy(FormKind::Full, *m, v, v);
      fs.u_d = energy(FormKind::Full, *m, u, dlt);
      fs.v_d = energy(FormKind::Full, *m, v, dlt);
      fs.dd = energy(FormKind::Full, *m, dlt, dlt);
      EXPECT_TRUE(check_form_sandwich(p, fs).ok()) << p << " " << s;
    }
}

TEST(LocalNorm, AffineAndConstant) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 1.0 / 64, 1.0 / 64);
  const auto x = sample(Expression::parse("x"), g);
  // ||x||_2^2 by the midpoint rule is 1/3 - h^2/12; the gradient term is K_{1,2} = 1.
  const double h = 1.0 / 64;
  EXPECT_NEAR(local_norm_star(x, 2.0), std::sqrt(4.0 / 3.0 - h * h / 12.0), 1e-12);
  EXPECT_NEAR(local_norm_star(GridFunction(g, 1.0), 3.0), 1.0, 1e-14);
  EXPECT_NEAR(local_energy(x, x, 3.0), 1.0, 1e-12);
  EXPECT_NEAR(energy(FormKind::LocalGradient, nullptr, x, x, 3.0), 1.0, 1e-12);
}

TEST(NonlocalNorm, UniformBoundForCompactlySupported) {
  // E(u,u) <= 2^p (||u||_p^p + ||u'||_p^p) for any p-Levy kernel of unit mass.
  const Expression bump = Expression::parse("max(0, 1 - 16*(x-0.5)^2)^3");
  for (double p : {1.5, 2.0, 3.0})
    for (double eps : {0.4, 0.1}) {
      const auto m = model(p, 1, eps, 1.0 / 256);
      const auto u = sample(bump, m->grid_ptr());
      const double e = energy(FormKind::Full, *m, u, u);
      const double lp = lp_norm_pow_omega(u, p);
      double grad = 0.0;
      const int n = 20000;
      for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        grad += std::pow(std::abs(bump.derivative(0)(t)), p) / n;
      }
      EXPECT_GT(e, 0.0);
      EXPECT_LE(e, std::pow(2.0, p) * (lp + grad));
      EXPECT_NEAR(nonlocal_norm(*m, u, NormScope::FullSpacePair), std::pow(lp + e, 1.0 / p), 1e-12);
    }
}
