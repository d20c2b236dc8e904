#pragma once

#include <array>
#include <vector>

#include "plevy/solve.hpp"

namespace plevy {

struct TraceResult {
  double norm = 0.0;
  Solution solution;
};

/// inf { ||u||_{W(Omega|R^d)} : u = datum on the collar }, computed by minimising
/// (1/p)(||u||_p^p + E(u,u)) over Omega values. The datum is read on collar nodes.
TraceResult nonlocal_trace_norm(std::shared_ptr<const NonlocalModel> m, const GridFunction& datum,
                                const SolveConfig& cfg = {});

/// inf { (||u||_p^p + K_{1,p} ||u'||_p^p)^{1/p} : u(a) = g0, u(b) = g1 } on the
/// cell-centred grid, the endpoint values entering through half cells.
TraceResult local_trace_norm_1d(GridPtr grid, double p, std::array<double, 2> values, const SolveConfig& cfg = {});

/// The energy-minimal extension of collar data: nonlocal Dirichlet solution with f = 0.
Solution robust_lifting(std::shared_ptr<const NonlocalModel> m, const GridFunction& datum,
                        const SolveConfig& cfg = {});

}  // namespace plevy
