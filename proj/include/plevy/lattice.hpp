#pragma once

#include <vector>

#include "plevy/grid.hpp"
#include "plevy/kernels.hpp"

namespace plevy {

/// How a kernel is turned into pair weights on a uniform grid.
///  CellAveraged: W_k = (1/|cell|) int_{cell_k} m nu / m(|k h|) with m(r) = 1 ^ r^p,
///                and the p-moment of the cell at the origin handed to the
///                nearest axis neighbours.
///  PointSampled: W_k = nu(|k h|).
enum class KernelQuadrature { CellAveraged, PointSampled };

/// Symmetric pair weights W(dx, dy) standing in for nu(x - y) on a grid.
/// Every discrete form, operator and solver shares one table, which keeps the
/// discrete Gauss-Green identity exact.
class LatticeWeights {
 public:
  LatticeWeights(const Kernel& k, const Grid& g, KernelQuadrature mode = KernelQuadrature::CellAveraged);

  double operator()(int dx, int dy = 0) const {
    const int ax = dx < 0 ? -dx : dx, ay = dy < 0 ? -dy : dy;
    if (ax > reach_[0] || ay > reach_[1]) return 0.0;
    return w_[static_cast<std::size_t>(ax) * static_cast<std::size_t>(reach_[1] + 1) + static_cast<std::size_t>(ay)];
  }
  /// Largest offset along an axis with a possibly nonzero weight.
  int reach(int axis) const { return reach_[static_cast<std::size_t>(axis)]; }
  int dim() const { return d_; }
  KernelQuadrature mode() const { return mode_; }
  /// Tail mass of the kernel beyond the collar width.
  double neglected_tail() const { return neglected_tail_; }

 private:
  int d_;
  KernelQuadrature mode_;
  std::array<int, 2> reach_{0, 0};
  std::vector<double> w_;
  double neglected_tail_ = 0.0;
};

}  // namespace plevy
