#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "plevy/error.hpp"
#include "plevy/parallel.hpp"
#include "plevy/solve.hpp"

using namespace plevy;

namespace {

std::shared_ptr<const NonlocalModel> model(double p, double eps, double h, int d = 1) {
  const ExponentDim pd(p, d);
  const Domain dom = d == 1 ? Domain::interval(0.0, 1.0) : Domain::rectangle(0.0, 1.0, 0.0, 1.0);
  return std::make_shared<const NonlocalModel>(Kernel::rescaled(BaseProfile::indicator(pd), eps),
                                               build_grid(dom, h, eps + h));
}

double max_diff_omega(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i : a.grid().omega_nodes()) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Solve, AffineDataIsReproduced) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = model(p, 0.2, 1.0 / 32);
    const auto g = sample(Expression::parse("2*x - 0.3"), m->grid_ptr());
    const auto sol = solve(Problem::nonlocal_dirichlet(m, GridFunction(m->grid_ptr()), g));
    EXPECT_LT(max_diff_omega(sol.u, g), 1e-7) << p;
  }
}

TEST(Solve, QuadraticCaseMatchesDenseLinearSystem) {
  // Independent assembly of the p = 2 normal equations from the pair weights.
  const auto m = model(2.0, 0.25, 1.0 / 16);
  const Grid& G = m->grid();
  const auto f = sample(Expression::parse("1 + x"), m->grid_ptr());
  const auto g = sample(Expression::parse("cos(3*x)"), m->grid_ptr());
  const auto pr = Problem::nonlocal_dirichlet(m, f, g);
  const auto& om = G.omega_nodes();
  const int n = static_cast<int>(om.size());
  const double w = G.cell_volume();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n; ++a) {
    const int ia = G.index(om[a])[0];
    b(a) = f[om[a]] * w / pr.mu;
    for (std::size_t j = 0; j < G.size(); ++j) {
      if (j == om[a]) continue;
      const double W = m->weights()(G.index(j)[0] - ia);
      A(a, a) += 2.0 * W * w * w;
      if (G.in_omega(j)) {
        const int c = static_cast<int>(std::find(om.begin(), om.end(), j) - om.begin());
        A(a, c) -= 2.0 * W * w * w;
      } else {
        b(a) += 2.0 * W * w * w * g[j];
      }
    }
  }
  const Eigen::VectorXd x = A.ldlt().solve(b);
  const auto sol = solve(pr);
  for (int a = 0; a < n; ++a) EXPECT_NEAR(sol.u[om[a]], x(a), 1e-8 * (1 + std::abs(x(a))));
  for (std::size_t j : G.collar_nodes()) EXPECT_EQ(sol.u[j], g[j]);
}

TEST(Solve, NeumannZeroDataGivesZero) {
  const auto m = model(3.0, 0.2, 1.0 / 32);
  const GridFunction z(m->grid_ptr());
  const auto sol = solve(Problem::nonlocal_neumann(m, z, z));
  for (double v : sol.u.values()) EXPECT_NEAR(v, 0.0, 1e-12);
  const auto reg = solve(Problem::regional_neumann(m, z));
  for (std::size_t i : m->grid().omega_nodes()) EXPECT_NEAR(reg.u[i], 0.0, 1e-12);
}

TEST(Solve, NeumannRejectsIncompatibleData) {
  const auto m = model(2.0, 0.2, 1.0 / 32);
  const GridFunction one(m->grid_ptr(), 1.0), z(m->grid_ptr());
  try {
    Problem::nonlocal_neumann(m, one, z);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
  }
  EXPECT_THROW(Problem::regional_neumann(m, one), Error);
}

TEST(Solve, NeumannSolutionHasZeroMeanAndSmallResidual) {
  const auto m = model(1.5, 0.2, 1.0 / 32);
  const auto f = sample(Expression::parse("cos(pi*x)"), m->grid_ptr());
  const auto sol = solve(Problem::nonlocal_neumann(m, f, GridFunction(m->grid_ptr())));
  EXPECT_NEAR(integrate_over_omega(sol.u), 0.0, 1e-10);
  EXPECT_LE(sol.grad_norm, std::max(SolveConfig{}.grad_tol * sol.grad_scale, sol.noise_floor));
}

TEST(Solve, SingularTiesAreResolved) {
  // Symmetric 2D data and one-partner collar nodes force exact ties in the p < 2 minimiser;
  // the residual still reaches the requested tolerance.
  const auto m = model(1.5, 0.25, 1.0 / 16, 2);
  SolveConfig cfg;
  cfg.grad_tol = 1e-9;
  const auto sol = solve(Problem::nonlocal_dirichlet(m, GridFunction(m->grid_ptr(), 1.0), GridFunction(m->grid_ptr())), cfg);
  EXPECT_LE(sol.grad_norm, 1e-9 * sol.grad_scale);
  const auto g = m->grid_ptr();
  const auto a = g->node_at(5, 9), b = g->node_at(9, 5);  // mirror images across the diagonal
  EXPECT_NEAR(sol.u[a], sol.u[b], 1e-12);
}

TEST(Solve, ScalingCovariance) {
  // f -> c^{p-1} f maps u -> c u when g = 0.
  const double p = 3.0, c = 2.0;
  const auto m = model(p, 0.2, 1.0 / 32);
  const auto f = sample(Expression::parse("1 + sin(4*x)"), m->grid_ptr());
  const GridFunction z(m->grid_ptr());
  const auto a = solve(Problem::nonlocal_dirichlet(m, f, z));
  const auto b = solve(Problem::nonlocal_dirichlet(m, std::pow(c, p - 1.0) * f, z));
  EXPECT_LT(max_diff_omega(c * a.u, b.u), 1e-7);
}

TEST(Solve, EulerLagrangeDefectAndMonotoneHistory) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = model(p, 0.25, 1.0 / 16, 2);
    const auto f = sample(Expression::parse("1"), m->grid_ptr());
    const GridFunction z(m->grid_ptr());
    const auto pr = Problem::nonlocal_dirichlet(m, f, z);
    const auto sol = solve(pr);
    // The defect is bounded by the residual norm (Cauchy-Schwarz).
    const double d1 = euler_lagrange_defect(pr, sol.u, 20, 5);
    EXPECT_LE(d1, std::max(SolveConfig{}.grad_tol * sol.grad_scale, sol.noise_floor)) << p;
    EXPECT_LE(sol.grad_norm, std::max(SolveConfig{}.grad_tol * sol.grad_scale, sol.noise_floor));
    EXPECT_LT(sol.noise_floor, 1e-6 * sol.grad_scale);
    for (std::size_t k = 1; k < sol.j_history.size(); ++k)
      EXPECT_LE(sol.j_history[k], sol.j_history[k - 1] + 1e-14 * std::abs(sol.j_history[k - 1]));
    EXPECT_NEAR(functional_value(pr, sol.u), sol.j, 1e-12 * (1 + std::abs(sol.j)));
    auto bumped = sol.u;
    bumped[m->grid().omega_nodes()[3]] += 1e-3;
    EXPECT_GT(functional_value(pr, bumped), sol.j);
  }
}

TEST(Solve, ConstraintViolationAndIterationLimit) {
  const auto m = model(2.0, 0.2, 1.0 / 32);
  const auto f = sample(Expression::parse("1"), m->grid_ptr());
  const GridFunction z(m->grid_ptr());
  const auto pr = Problem::nonlocal_dirichlet(m, f, z);
  EXPECT_THROW(functional_value(pr, GridFunction(m->grid_ptr(), 1.0)), Error);
  SolveConfig cfg;
  cfg.max_iter = 1;
  try {
    solve(pr, cfg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Solver);
  }
}

TEST(Solve, LocalProblems) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 1.0 / 64, 1.0 / 64);
  const GridFunction z(g);
  const auto lin = solve(Problem::local_dirichlet(g, 3.0, z, {0.0, 1.0}));
  for (std::size_t i : g->omega_nodes()) EXPECT_NEAR(lin.u[i], g->coord(i, 0), 1e-8);
  // -u'' = 2 with u(0) = u(1) = 0 gives x(1-x). The half-cell boundary faces make the
  // discrete solution x(1-x) + h^2/4: interior rows are exact for quadratics and the
  // first cell balance reads 3/2 + 2c/h^2 = 2.
  const double h = 1.0 / 64;
  const auto quad = solve(Problem::local_dirichlet(g, 2.0, GridFunction(g, 2.0), {0.0, 0.0}));
  for (std::size_t i : g->omega_nodes()) {
    const double x = g->coord(i, 0);
    EXPECT_NEAR(quad.u[i], x * (1 - x) + 0.25 * h * h, 1e-10);
  }
  // -u'' = 0 with unit outward flux at both ends is incompatible.
  EXPECT_THROW(Problem::local_neumann(g, 2.0, z, {1.0, 1.0}), Error);
  const auto neu = solve(Problem::local_neumann(g, 2.0, z, {-1.0, 1.0}));
  for (std::size_t i : g->omega_nodes()) EXPECT_NEAR(neu.u[i], g->coord(i, 0) - 0.5, 1e-8);
}

TEST(Solve, ThreadCountDoesNotChangeResult) {
  const auto m = model(3.0, 0.25, 1.0 / 16, 2);
  const auto f = sample(Expression::parse("1 + x*y"), m->grid_ptr());
  const auto pr = Problem::nonlocal_dirichlet(m, f, GridFunction(m->grid_ptr()));
  set_threads(1);
  const auto a = solve(pr);
  set_threads(4);
  const auto b = solve(pr);
  set_threads(1);
  for (std::size_t i = 0; i < a.u.size(); ++i) ASSERT_EQ(a.u[i], b.u[i]);
}
