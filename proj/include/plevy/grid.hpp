#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "plevy/expression.hpp"

namespace plevy {

/// Axis-aligned box Omega: an interval (d = 1) or a rectangle (d = 2).
struct Domain {
  int d = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  static Domain interval(double a, double b);
  static Domain rectangle(double x0, double x1, double y0, double y1);
  double extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
  double measure() const;
  void validate() const;
};

enum class NodeClass : unsigned char { Omega, Collar };

/// Cell-centred uniform grid over Omega enlarged by a collar of width >= W on
/// every side. Nodes are ordered lexicographically in (x, y) with y fastest.
/// No node lies on the boundary of Omega.
class Grid {
 public:
  int dim() const { return d_; }
  std::size_t size() const { return cls_.size(); }
  double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double cell_volume() const { return cell_volume_; }
  double collar_width() const { return collar_; }
  const Domain& domain() const { return domain_; }

  /// Node counts per axis over the whole enlarged box.
  int nodes_along(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  /// Number of collar layers on each side of Omega, per axis.
  int collar_layers(int axis) const { return m_[static_cast<std::size_t>(axis)]; }

  NodeClass node_class(std::size_t i) const { return cls_[i]; }
  bool in_omega(std::size_t i) const { return cls_[i] == NodeClass::Omega; }
  /// Omega node with a collar neighbour, or collar node with an Omega neighbour.
  bool boundary_adjacent(std::size_t i) const { return adjacent_[i] != 0; }

  /// Integer lattice position of node i (axis index along x and y).
  std::array<int, 2> index(std::size_t i) const;
  std::size_t node_at(int ix, int iy = 0) const;
  double coord(std::size_t i, int axis) const;
  std::array<double, 2> point(std::size_t i) const;

  const std::vector<std::size_t>& omega_nodes() const { return omega_; }
  const std::vector<std::size_t>& collar_nodes() const { return collar_nodes_; }

  /// Distance from node i to the closed set Omega-bar (0 inside Omega).
  double distance_to_omega(std::size_t i) const;
  /// Distance from node i to the boundary of Omega.
  double distance_to_boundary(std::size_t i) const;

 private:
  friend std::shared_ptr<const Grid> build_grid(const Domain&, double, double);
  Grid() = default;

  int d_ = 1;
  Domain domain_;
  std::array<double, 2> h_{1.0, 1.0};
  std::array<int, 2> n_{1, 1};
  std::array<int, 2> m_{0, 0};
  std::array<double, 2> origin_{0.0, 0.0};
  double cell_volume_ = 1.0;
  double collar_ = 0.0;
  std::vector<NodeClass> cls_;
  std::vector<unsigned char> adjacent_;
  std::vector<std::size_t> omega_;
  std::vector<std::size_t> collar_nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the grid. The number of Omega cells per axis is round(extent / spacing)
/// (the per-axis spacing is then adjusted to fit exactly) and the collar holds
/// ceil(collar / h) layers per side. Throws when spacing exceeds an extent or
/// collar < spacing.
GridPtr build_grid(const Domain& dom, double spacing, double collar);

class Kernel;

/// Smallest W on the ladder 2^{j/4}, j = 0, 1, ..., with tail_mass(k, W) <= tau_tail.
/// Throws Error(Range) once W would exceed 1e4.
double choose_collar(const Kernel& k, double tau_tail);

/// Real values attached to every node of a grid.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid, double fill = 0.0);
  GridFunction(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);

  /// Throws unless every value is finite.
  void check_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Node-wise evaluation; non-finite values raise Error(Evaluation) naming the node.
GridFunction sample(const Expression& e, const GridPtr& g);

/// Midpoint-rule integral of f over Omega nodes.
double integrate_over_omega(const GridFunction& f);
/// Midpoint-rule integral over collar nodes.
double integrate_over_collar(const GridFunction& f);
/// ||f||_{L^p(Omega)}^p.
double lp_norm_pow_omega(const GridFunction& f, double p);

}  // namespace plevy
