#pragma once

// Neighbour enumeration shared by forms, operators and solvers. Partners are
// visited in a fixed order so that every row sum is reproducible.

#include <cstddef>

#include "plevy/grid.hpp"
#include "plevy/lattice.hpp"

namespace plevy::detail {

template <class F>
inline void for_each_partner(const Grid& g, const LatticeWeights& W, std::size_t i, F&& f) {
  if (g.dim() == 1) {
    const long n = static_cast<long>(g.size());
    const long ii = static_cast<long>(i);
    const int R = W.reach(0);
    for (int k = 1; k <= R; ++k) {
      const double w = W(k);
      if (w == 0.0) continue;
      if (ii - k >= 0) f(static_cast<std::size_t>(ii - k), w);
      if (ii + k < n) f(static_cast<std::size_t>(ii + k), w);
    }
    return;
  }
  const auto ix = g.index(i);
  const int nx = g.nodes_along(0), ny = g.nodes_along(1);
  const int R0 = W.reach(0), R1 = W.reach(1);
  for (int dx = -R0; dx <= R0; ++dx) {
    const int jx = ix[0] + dx;
    if (jx < 0 || jx >= nx) continue;
    for (int dy = -R1; dy <= R1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      const int jy = ix[1] + dy;
      if (jy < 0 || jy >= ny) continue;
      const double w = W(dx, dy);
      if (w == 0.0) continue;
      f(g.node_at(jx, jy), w);
    }
  }
}

}  // namespace plevy::detail
