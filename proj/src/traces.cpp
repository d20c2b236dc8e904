#include "plevy/traces.hpp"

#include <cmath>

#include "plevy/error.hpp"

namespace plevy {

TraceResult nonlocal_trace_norm(std::shared_ptr<const NonlocalModel> m, const GridFunction& datum,
                                const SolveConfig& cfg) {
  const double p = m->p();
  GridFunction g(m->grid_ptr());
  for (std::size_t i : m->grid().collar_nodes()) g[i] = datum[i];
  Problem pr = Problem::nonlocal_dirichlet(m, GridFunction(m->grid_ptr()), g);
  pr.mu = 1.0;
  pr.lambda = 1.0;
  TraceResult r;
  r.solution = solve(pr, cfg);
  r.norm = std::pow(std::max(p * r.solution.j, 0.0), 1.0 / p);
  return r;
}

TraceResult local_trace_norm_1d(GridPtr grid, double p, std::array<double, 2> values, const SolveConfig& cfg) {
  require(grid->dim() == 1, ErrorKind::Validation, "local trace norms are computed in one dimension");
  Problem pr = Problem::local_dirichlet(grid, p, GridFunction(grid), values);
  pr.mu = k_const(ExponentDim(p, 1));
  pr.lambda = 1.0;
  TraceResult r;
  r.solution = solve(pr, cfg);
  r.norm = std::pow(std::max(p * r.solution.j, 0.0), 1.0 / p);
  return r;
}

Solution robust_lifting(std::shared_ptr<const NonlocalModel> m, const GridFunction& datum, const SolveConfig& cfg) {
  GridFunction g(m->grid_ptr());
  for (std::size_t i : m->grid().collar_nodes()) g[i] = datum[i];
  return solve(Problem::nonlocal_dirichlet(m, GridFunction(m->grid_ptr()), g), cfg);
}

}  // namespace plevy
