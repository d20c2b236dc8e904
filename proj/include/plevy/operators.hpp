#pragma once

#include <array>
#include <cstddef>

#include "plevy/expression.hpp"
#include "plevy/forms.hpp"

namespace plevy {

struct PointEval {
  std::array<double, 2> location{0.0, 0.0};
  double value = 0.0;
  /// 2^p ||u||_inf^{p-1} tail_mass(W): interaction dropped beyond the collar.
  double tail_bound = 0.0;
  /// Grid spacing along x.
  double resolution = 0.0;
};

/// L u(x) = 2 sum_{y != x} psi(u(x) - u(y)) W(x - y) w_y at an Omega node.
PointEval apply_L(const NonlocalModel& m, const GridFunction& u, std::size_t node);
/// N u(y) = 2 sum_{x in Omega} psi(u(y) - u(x)) W(y - x) w_x at a collar node.
PointEval apply_N(const NonlocalModel& m, const GridFunction& u, std::size_t node);

/// L u on every Omega node and N u on every collar node, in one grid function.
GridFunction apply_L_and_N(const NonlocalModel& m, const GridFunction& u);

/// div(|grad u|^{p-2} grad u)(x) from exact symbolic derivatives of u.
/// For 1 < p < 2 a vanishing gradient raises Error(Precondition).
double local_pLaplacian(const ExponentDim& pd, const Expression& u, std::array<double, 2> x);

struct BoundCertificate {
  double value = 0.0;  ///< |L u(x)| from the grid
  double bound = 0.0;  ///< right-hand side of the radial pointwise estimate
  double tail_term = 0.0;
  double moment_term = 0.0;
  double delta = 0.0;
  bool holds = false;
};

/// Evaluates the radial pointwise estimate
///   |Lu(x)| <= 2^p ||u||_inf^{p-1} int_{|h|>=delta} nu
///            + 2^{p+1} p (||u||_{C^2(B_delta)} K_{d,p-2} |grad u(x)|^{p-2}
///                         + ||u||_{C^2(B_delta)}^{max(1,p-1)}) int_{|h|<delta} |h|^p nu
/// with K_{d,p-2} = ((d+p-2)/(p-1)) K_{d,p}. Suprema are sampled: ||u||_inf on the
/// grid, the C^2 norm on a lattice in the closed ball.
BoundCertificate pointwise_bound_certificate(const NonlocalModel& m, const Expression& u, std::size_t node,
                                             double delta);

struct GaussGreen {
  double form = 0.0;      ///< E(phi, v) over Full pairs
  double interior = 0.0;  ///< sum_Omega w v L phi
  double exterior = 0.0;  ///< sum_collar w v N phi
  double residual = 0.0;
  double scale = 0.0;     ///< sum of magnitudes of all contributions
};

GaussGreen gauss_green(const NonlocalModel& m, const GridFunction& phi, const GridFunction& v);
inline double gauss_green_residual(const NonlocalModel& m, const GridFunction& phi, const GridFunction& v) {
  return gauss_green(m, phi, v).residual;
}

}  // namespace plevy
