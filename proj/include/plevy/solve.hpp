#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "plevy/forms.hpp"

namespace plevy {

enum class Variant { NonlocalDirichlet, NonlocalNeumann, RegionalNeumann, LocalDirichlet, LocalNeumann };

const char* to_string(Variant v);

/// A discrete minimisation problem
///   J(v) = (mu/p) E(v,v) + (lambda/p) ||v||_{L^p(Omega)}^p - <f, v - g>_Omega - <g, v>_collar - g0 v(0) - g1 v(1)
/// with the pieces that apply to the variant:
///  - NonlocalDirichlet: E = Full form, v = g on the collar, linear term <f, v - g>_Omega.
///  - NonlocalNeumann:   E = Full form, v free everywhere, linear terms <f,v>_Omega + <g,v>_collar,
///                       zero Omega-mean representative.
///  - RegionalNeumann:   E = Regional form on Omega nodes, linear term <f,v>_Omega, zero mean.
///  - LocalDirichlet:    E = cell-centred finite-volume gradient form on Omega (d = 1) with the
///                       boundary values attached through half cells.
///  - LocalNeumann:      same form without boundary faces; boundary fluxes g0 (at x = a, paired
///                       with the first Omega node) and g1 (at x = b, last Omega node); zero mean.
struct Problem {
  Variant variant = Variant::NonlocalDirichlet;
  double p = 2.0;
  std::shared_ptr<const NonlocalModel> model;  ///< nonlocal variants
  GridPtr grid;
  GridFunction f;  ///< read on Omega nodes
  GridFunction g;  ///< Dirichlet: values (collar = constraint); Neumann: collar density
  std::array<double, 2> boundary{0.0, 0.0};  ///< local Dirichlet values or local Neumann fluxes
  double mu = 1.0;      ///< weight of the energy
  double lambda = 0.0;  ///< weight of the L^p(Omega) term

  static Problem nonlocal_dirichlet(std::shared_ptr<const NonlocalModel> m, GridFunction f, GridFunction g);
  static Problem nonlocal_neumann(std::shared_ptr<const NonlocalModel> m, GridFunction f, GridFunction g);
  static Problem regional_neumann(std::shared_ptr<const NonlocalModel> m, GridFunction f);
  /// 1D only; `values` are u(a), u(b).
  static Problem local_dirichlet(GridPtr grid, double p, GridFunction f, std::array<double, 2> values);
  /// 1D only; `fluxes` are |u'|^{p-2} u' n at a and b.
  static Problem local_neumann(GridPtr grid, double p, GridFunction f, std::array<double, 2> fluxes);

  bool is_local() const { return variant == Variant::LocalDirichlet || variant == Variant::LocalNeumann; }
  bool is_dirichlet() const { return variant == Variant::NonlocalDirichlet || variant == Variant::LocalDirichlet; }
  /// Throws Error(Validation) on incompatible Neumann data or non-finite data.
  void validate() const;
};

struct SolveConfig {
  double grad_tol = 1e-10;  ///< relative to the initial residual norm
  double j_tol = 1e-15;     ///< relative J change treated as stagnation
  int max_iter = 4000;
  int memory = 12;
  /// Regularisation factors for 1 < p < 2, multiplied by the data scale; must end at 0.
  std::vector<double> schedule{1e-2, 1e-4, 1e-6, 0.0};
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  /// Iterations between rebuilds of the preconditioner for p != 2.
  int refresh = 10;
  /// Nearest lattice offsets kept in the preconditioner.
  int precond_reach = 48;
  std::uint64_t seed = 20240531;
};

struct StageRecord {
  double delta = 0.0;
  int iterations = 0;
  double j = 0.0;
  double grad_norm = 0.0;
};

struct Solution {
  GridFunction u;
  double j = 0.0;
  double grad_norm = 0.0;
  /// Initial residual norm.
  double grad_scale = 0.0;
  /// Rounding error of the residual evaluation at u. Success means
  /// grad_norm <= max(grad_tol * grad_scale, noise_floor).
  double noise_floor = 0.0;
  int iterations = 0;
  /// |J_0(u) - J_{delta_last}(u_last)| across the final regularised stage.
  double regularization_residual = 0.0;
  std::vector<StageRecord> stages;
  /// J after every accepted step of the final stage.
  std::vector<double> j_history;
};

/// Minimises the problem's functional. Throws Error(Solver) when max_iter is hit.
Solution solve(const Problem& prob, const SolveConfig& cfg = {});

/// J at an admissible v. Throws Error(Validation) when v violates the Dirichlet constraint.
double functional_value(const Problem& prob, const GridFunction& v);

/// Largest |<grad J(u), w>| / ||w|| over n random admissible directions w.
double euler_lagrange_defect(const Problem& prob, const GridFunction& u, int n, std::uint64_t seed);

/// Residual grad J(u) / w on the unknown nodes (zero elsewhere).
GridFunction residual(const Problem& prob, const GridFunction& u);

}  // namespace plevy
