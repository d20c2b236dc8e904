#include "plevy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plevy/error.hpp"
#include "plevy/kernels.hpp"

namespace plevy {

Domain Domain::interval(double a, double b) {
  Domain d;
  d.d = 1;
  d.lo = {a, 0.0};
  d.hi = {b, 0.0};
  d.validate();
  return d;
}

Domain Domain::rectangle(double x0, double x1, double y0, double y1) {
  Domain d;
  d.d = 2;
  d.lo = {x0, y0};
  d.hi = {x1, y1};
  d.validate();
  return d;
}

double Domain::measure() const {
  double m = extent(0);
  if (d == 2) m *= extent(1);
  return m;
}

void Domain::validate() const {
  require(d == 1 || d == 2, ErrorKind::Domain, "domain dimension must be 1 or 2");
  for (int a = 0; a < d; ++a) {
    require(std::isfinite(lo[a]) && std::isfinite(hi[a]) && hi[a] > lo[a], ErrorKind::Domain,
            "domain box must have nonempty interior");
  }
}

double Grid::coord(std::size_t i, int axis) const {
  const auto ix = index(i);
  return origin_[axis] + (ix[axis] + 0.5) * h_[axis];
}

std::array<double, 2> Grid::point(std::size_t i) const {
  return {coord(i, 0), d_ == 2 ? coord(i, 1) : 0.0};
}

std::array<int, 2> Grid::index(std::size_t i) const {
  if (d_ == 1) return {static_cast<int>(i), 0};
  const auto ny = static_cast<std::size_t>(n_[1]);
  return {static_cast<int>(i / ny), static_cast<int>(i % ny)};
}

std::size_t Grid::node_at(int ix, int iy) const {
  if (d_ == 1) return static_cast<std::size_t>(ix);
  return static_cast<std::size_t>(ix) * static_cast<std::size_t>(n_[1]) + static_cast<std::size_t>(iy);
}

double Grid::distance_to_omega(std::size_t i) const {
  double s = 0.0;
  for (int a = 0; a < d_; ++a) {
    const double c = coord(i, a);
    const double out = std::max({domain_.lo[a] - c, c - domain_.hi[a], 0.0});
    s += out * out;
  }
  return std::sqrt(s);
}

double Grid::distance_to_boundary(std::size_t i) const {
  if (!in_omega(i)) return distance_to_omega(i);
  double m = INFINITY;
  for (int a = 0; a < d_; ++a) {
    const double c = coord(i, a);
    m = std::min({m, c - domain_.lo[a], domain_.hi[a] - c});
  }
  return m;
}

GridPtr build_grid(const Domain& dom, double spacing, double collar) {
  dom.validate();
  require(spacing > 0.0 && std::isfinite(spacing), ErrorKind::Domain, "grid spacing must be positive");
  require(collar >= spacing, ErrorKind::Domain, "collar width must be at least the grid spacing");
  std::shared_ptr<Grid> g(new Grid());
  g->d_ = dom.d;
  g->domain_ = dom;
  g->collar_ = collar;
  g->cell_volume_ = 1.0;
  std::array<int, 2> inner{1, 1};
  for (int a = 0; a < dom.d; ++a) {
    const double ext = dom.extent(a);
    require(spacing <= ext * (1.0 + 1e-12), ErrorKind::Domain, "grid spacing exceeds the domain extent");
    const int n = std::max(1, static_cast<int>(std::lround(ext / spacing)));
    const double h = ext / n;
    const int m = static_cast<int>(std::ceil(collar / h - 1e-9));
    g->h_[a] = h;
    g->m_[a] = m;
    g->n_[a] = n + 2 * m;
    g->origin_[a] = dom.lo[a] - m * h;
    g->cell_volume_ *= h;
    inner[a] = n;
  }
  const std::size_t total = static_cast<std::size_t>(g->n_[0]) * static_cast<std::size_t>(dom.d == 2 ? g->n_[1] : 1);
  g->cls_.resize(total);
  g->adjacent_.assign(total, 0);
  auto inside = [&](int ix, int iy) {
    const bool xin = ix >= g->m_[0] && ix < g->m_[0] + inner[0];
    if (dom.d == 1) return xin;
    return xin && iy >= g->m_[1] && iy < g->m_[1] + inner[1];
  };
  const int ny = dom.d == 2 ? g->n_[1] : 1;
  for (int ix = 0; ix < g->n_[0]; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const std::size_t i = g->node_at(ix, iy);
      const bool in = inside(ix, iy);
      g->cls_[i] = in ? NodeClass::Omega : NodeClass::Collar;
      (in ? g->omega_ : g->collar_nodes_).push_back(i);
      const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (int k = 0; k < (dom.d == 2 ? 4 : 2); ++k) {
        const int jx = nb[k][0], jy = nb[k][1];
        if (jx < 0 || jx >= g->n_[0] || jy < 0 || jy >= ny) continue;
        if (inside(jx, jy) != in) g->adjacent_[i] = 1;
      }
    }
  }
  return g;
}

double choose_collar(const Kernel& k, double tau_tail) {
  require(tau_tail > 0.0 && tau_tail <= 1.0, ErrorKind::Range, "tail tolerance must lie in (0, 1]");
  for (int j = 0;; ++j) {
    const double w = std::exp2(0.25 * j);
    if (w > 1e4) break;
    if (tail_mass(k, w) <= tau_tail) return w;
  }
  raise(ErrorKind::Range, "no collar width up to 1e4 meets the tail tolerance; handle the tail analytically");
}

GridFunction::GridFunction(GridPtr grid, double fill) : grid_(std::move(grid)) {
  require(grid_ != nullptr, ErrorKind::Precondition, "grid function needs a grid");
  values_.assign(grid_->size(), fill);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, ErrorKind::Precondition, "grid function needs a grid");
  require(values_.size() == grid_->size(), ErrorKind::Precondition, "grid function length does not match grid");
}

static void same_grid(const GridFunction& a, const GridFunction& b) {
  require(&a.grid() == &b.grid(), ErrorKind::Precondition, "grid functions live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

void GridFunction::check_finite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "non-finite value at node " << i;
      raise(ErrorKind::Evaluation, os.str());
    }
  }
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction sample(const Expression& e, const GridPtr& g) {
  require(e.arity() <= g->dim(), ErrorKind::Validation, "expression uses y on a one-dimensional grid");
  GridFunction out(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto pt = g->point(i);
    try {
      out[i] = e.evaluate(std::span<const double>(pt.data(), static_cast<std::size_t>(g->dim())));
    } catch (const Error& err) {
      std::ostringstream os;
      os.precision(17);
      os << err.what() << " at node (" << pt[0];
      if (g->dim() == 2) os << ", " << pt[1];
      os << ")";
      raise(ErrorKind::Evaluation, os.str());
    }
  }
  return out;
}

namespace {
double sum_over(const GridFunction& f, const std::vector<std::size_t>& nodes) {
  double s = 0.0, c = 0.0;
  for (std::size_t i : nodes) {
    const double y = f[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s * f.grid().cell_volume();
}
}  // namespace

double integrate_over_omega(const GridFunction& f) { return sum_over(f, f.grid().omega_nodes()); }
double integrate_over_collar(const GridFunction& f) { return sum_over(f, f.grid().collar_nodes()); }

double lp_norm_pow_omega(const GridFunction& f, double p) {
  GridFunction a(f.grid_ptr());
  for (std::size_t i : f.grid().omega_nodes()) a[i] = std::pow(std::abs(f[i]), p);
  return integrate_over_omega(a);
}

}  // namespace plevy
