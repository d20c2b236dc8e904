#include "plevy/forms.hpp"

#include <cmath>
#include <vector>

#include "pairs.hpp"
#include "plevy/calculus.hpp"
#include "plevy/error.hpp"
#include "plevy/parallel.hpp"

namespace plevy {

const char* to_string(FormKind k) {
  switch (k) {
    case FormKind::Full: return "full";
    case FormKind::Regional: return "regional";
    case FormKind::Cross: return "cross";
    case FormKind::Plus: return "plus";
    case FormKind::LocalGradient: return "local";
  }
  return "full";
}

NonlocalModel::NonlocalModel(Kernel k, GridPtr g, KernelQuadrature mode)
    : kernel_(std::move(k)), grid_(std::move(g)) {
  require(grid_ != nullptr, ErrorKind::Precondition, "model needs a grid");
  weights_ = std::make_shared<const LatticeWeights>(kernel_, *grid_, mode);
}

namespace detail {

bool row_active(FormKind kind, const Grid& g, std::size_t i) {
  return kind == FormKind::Full || g.in_omega(i);
}

bool partner_active(FormKind kind, const Grid& g, std::size_t i, std::size_t j) {
  switch (kind) {
    case FormKind::Full: return g.in_omega(i) || g.in_omega(j);
    case FormKind::Regional: return g.in_omega(j);
    case FormKind::Cross: return !g.in_omega(j);
    case FormKind::Plus: return true;
    case FormKind::LocalGradient: return false;
  }
  return false;
}

}  // namespace detail

namespace {

void same_grid(const NonlocalModel& m, const GridFunction& u, const GridFunction& v) {
  require(&u.grid() == &m.grid() && &v.grid() == &m.grid(), ErrorKind::Precondition,
          "grid functions and model live on different grids");
}

}  // namespace

double energy(FormKind kind, const NonlocalModel& m, const GridFunction& u, const GridFunction& v) {
  require(kind != FormKind::LocalGradient, ErrorKind::Precondition, "local form takes no kernel");
  same_grid(m, u, v);
  const Grid& g = m.grid();
  const LatticeWeights& W = m.weights();
  const double p = m.p();
  std::vector<double> rows(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t i) {
    if (!detail::row_active(kind, g, i)) return;
    const double ui = u[i], vi = v[i];
    double s = 0.0;
    detail::for_each_partner(g, W, i, [&](std::size_t j, double w) {
      if (!detail::partner_active(kind, g, i, j)) return;
      s += psi(p, ui - u[j]) * (vi - v[j]) * w;
    });
    rows[i] = s;
  });
  const double cv = g.cell_volume();
  return kahan_sum(rows.data(), rows.size()) * cv * cv;
}

namespace {

// Forward difference along `axis` at Omega node i; backward at the last node.
double fd(const GridFunction& u, std::size_t i, int axis) {
  const Grid& g = u.grid();
  auto ix = g.index(i);
  auto fwd = ix;
  fwd[static_cast<std::size_t>(axis)] += 1;
  const double h = g.spacing(axis);
  if (fwd[static_cast<std::size_t>(axis)] < g.nodes_along(axis)) {
    const std::size_t j = g.node_at(fwd[0], fwd[1]);
    if (g.in_omega(j)) return (u[j] - u[i]) / h;
  }
  auto bwd = ix;
  bwd[static_cast<std::size_t>(axis)] -= 1;
  const std::size_t j = g.node_at(bwd[0], bwd[1]);
  require(g.in_omega(j), ErrorKind::Precondition, "one-cell-wide domain has no difference stencil");
  return (u[i] - u[j]) / h;
}

}  // namespace

double local_energy(const GridFunction& u, const GridFunction& v, double p) {
  require(&u.grid() == &v.grid(), ErrorKind::Precondition, "grid functions live on different grids");
  const Grid& g = u.grid();
  const auto& om = g.omega_nodes();
  std::vector<double> rows(om.size(), 0.0);
  for (std::size_t k = 0; k < om.size(); ++k) {
    const std::size_t i = om[k];
    double gu[2] = {0.0, 0.0}, gv[2] = {0.0, 0.0};
    double n2 = 0.0, dot = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      gu[a] = fd(u, i, a);
      gv[a] = fd(v, i, a);
      n2 += gu[a] * gu[a];
      dot += gu[a] * gv[a];
    }
    rows[k] = n2 == 0.0 ? 0.0 : std::pow(n2, 0.5 * (p - 2.0)) * dot;
  }
  return kahan_sum(rows.data(), rows.size()) * g.cell_volume();
}

double energy(FormKind kind, const NonlocalModel* m, const GridFunction& u, const GridFunction& v, double p) {
  if (kind == FormKind::LocalGradient) return local_energy(u, v, p);
  require(m != nullptr, ErrorKind::Precondition, "nonlocal form needs a kernel");
  return energy(kind, *m, u, v);
}

double nonlocal_norm(const NonlocalModel& m, const GridFunction& u, NormScope scope) {
  const FormKind k = scope == NormScope::FullSpacePair ? FormKind::Full : FormKind::Regional;
  const double e = energy(k, m, u, u);
  return std::pow(lp_norm_pow_omega(u, m.p()) + std::max(e, 0.0), 1.0 / m.p());
}

double local_norm_star(const GridFunction& u, double p) {
  const Grid& g = u.grid();
  const double K = k_const(ExponentDim(p, g.dim()));
  return std::pow(lp_norm_pow_omega(u, p) + K * std::max(local_energy(u, u, p), 0.0), 1.0 / p);
}

}  // namespace plevy
