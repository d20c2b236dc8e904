#include "plevy/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pairs.hpp"
#include "plevy/calculus.hpp"
#include "plevy/error.hpp"
#include "plevy/parallel.hpp"

namespace plevy {

namespace {

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double row_flux(const NonlocalModel& m, const GridFunction& u, std::size_t i, bool omega_only) {
  const Grid& g = m.grid();
  const double p = m.p();
  const double ui = u[i];
  double s = 0.0;
  detail::for_each_partner(g, m.weights(), i, [&](std::size_t j, double w) {
    if (omega_only && !g.in_omega(j)) return;
    s += psi(p, ui - u[j]) * w;
  });
  return 2.0 * s * g.cell_volume();
}

PointEval make_eval(const NonlocalModel& m, const GridFunction& u, std::size_t node, double value) {
  PointEval e;
  e.location = m.grid().point(node);
  e.value = value;
  e.tail_bound = std::pow(2.0, m.p()) * std::pow(sup_norm(u), m.p() - 1.0) * m.weights().neglected_tail();
  e.resolution = m.grid().spacing(0);
  return e;
}

}  // namespace

PointEval apply_L(const NonlocalModel& m, const GridFunction& u, std::size_t node) {
  require(&u.grid() == &m.grid(), ErrorKind::Precondition, "function and model live on different grids");
  require(node < m.grid().size() && m.grid().in_omega(node), ErrorKind::Domain, "L is evaluated at Omega nodes");
  return make_eval(m, u, node, row_flux(m, u, node, false));
}

PointEval apply_N(const NonlocalModel& m, const GridFunction& u, std::size_t node) {
  require(&u.grid() == &m.grid(), ErrorKind::Precondition, "function and model live on different grids");
  require(node < m.grid().size() && !m.grid().in_omega(node), ErrorKind::Domain, "N is evaluated at collar nodes");
  return make_eval(m, u, node, row_flux(m, u, node, true));
}

GridFunction apply_L_and_N(const NonlocalModel& m, const GridFunction& u) {
  require(&u.grid() == &m.grid(), ErrorKind::Precondition, "function and model live on different grids");
  GridFunction out(m.grid_ptr());
  const Grid& g = m.grid();
  parallel_for(g.size(), [&](std::size_t i) { out[i] = row_flux(m, u, i, !g.in_omega(i)); });
  return out;
}

double local_pLaplacian(const ExponentDim& pd, const Expression& u, std::array<double, 2> x) {
  const double p = pd.p();
  const int d = pd.d();
  std::span<const double> pt(x.data(), static_cast<std::size_t>(d));
  double grad[2] = {0.0, 0.0}, hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int a = 0; a < d; ++a) {
    const Expression da = u.derivative(a);
    grad[a] = da.evaluate(pt);
    for (int b = 0; b < d; ++b) hess[a][b] = da.derivative(b).evaluate(pt);
  }
  const double n2 = grad[0] * grad[0] + grad[1] * grad[1];
  double lap = 0.0, quad = 0.0;
  for (int a = 0; a < d; ++a) {
    lap += hess[a][a];
    for (int b = 0; b < d; ++b) quad += grad[a] * hess[a][b] * grad[b];
  }
  if (n2 == 0.0) {
    require(p >= 2.0, ErrorKind::Precondition, "p-Laplacian with p < 2 is singular where the gradient vanishes");
    return p == 2.0 ? lap : 0.0;
  }
  // |g|^{p-2} tr H + (p-2) |g|^{p-4} g.H.g
  return std::pow(n2, 0.5 * (p - 2.0)) * lap + (p - 2.0) * std::pow(n2, 0.5 * (p - 4.0)) * quad;
}

BoundCertificate pointwise_bound_certificate(const NonlocalModel& m, const Expression& u, std::size_t node,
                                             double delta) {
  require(delta > 0.0 && delta < 1.0, ErrorKind::Precondition, "delta must lie in (0, 1)");
  const Grid& g = m.grid();
  const double p = m.p();
  const int d = g.dim();
  const auto x = g.point(node);
  GridFunction ug = sample(u, m.grid_ptr());
  const double uinf = sup_norm(ug);

  std::vector<Expression> d1, d2;
  for (int a = 0; a < d; ++a) {
    d1.push_back(u.derivative(a));
    for (int b = 0; b < d; ++b) d2.push_back(d1.back().derivative(b));
  }
  auto c2_at = [&](std::array<double, 2> z) {
    std::span<const double> pt(z.data(), static_cast<std::size_t>(d));
    double v = std::abs(u.evaluate(pt));
    for (const auto& e : d1) v = std::max(v, std::abs(e.evaluate(pt)));
    for (const auto& e : d2) v = std::max(v, std::abs(e.evaluate(pt)));
    return v;
  };
  double c2 = 0.0;
  const int n = d == 1 ? 400 : 40;
  for (int i = 0; i <= n; ++i) {
    const double a = -delta + 2.0 * delta * i / n;
    if (d == 1) {
      c2 = std::max(c2, c2_at({x[0] + a, 0.0}));
      continue;
    }
    for (int j = 0; j <= n; ++j) {
      const double b = -delta + 2.0 * delta * j / n;
      if (a * a + b * b <= delta * delta) c2 = std::max(c2, c2_at({x[0] + a, x[1] + b}));
    }
  }
  std::span<const double> pt(x.data(), static_cast<std::size_t>(d));
  double gn2 = 0.0;
  for (const auto& e : d1) gn2 += std::pow(e.evaluate(pt), 2);
  const double gn = std::sqrt(gn2);
  require(p >= 2.0 || gn > 0.0, ErrorKind::Precondition, "estimate needs a nonzero gradient when p < 2");
  require(std::isfinite(uinf) && std::isfinite(c2), ErrorKind::Precondition, "u must be bounded with bounded C^2 norm");

  const ExponentDim pd(p, d);
  const double k_pm2 = (d + p - 2.0) / (p - 1.0) * k_const(pd);
  const double grad_factor = (p == 2.0 || gn > 0.0) ? std::pow(gn, p - 2.0) : 0.0;
  BoundCertificate c;
  c.delta = delta;
  c.value = std::abs(apply_L(m, ug, node).value);
  c.tail_term = std::pow(2.0, p) * std::pow(uinf, p - 1.0) * tail_mass(m.kernel(), delta);
  c.moment_term = std::pow(2.0, p + 1.0) * p *
                  (c2 * k_pm2 * grad_factor + std::pow(c2, std::max(1.0, p - 1.0))) *
                  inner_moment(m.kernel(), delta);
  c.bound = c.tail_term + c.moment_term;
  c.holds = c.value <= c.bound * (1.0 + 1e-12);
  return c;
}

GaussGreen gauss_green(const NonlocalModel& m, const GridFunction& phi, const GridFunction& v) {
  GaussGreen r;
  r.form = energy(FormKind::Full, m, phi, v);
  const GridFunction ln = apply_L_and_N(m, phi);
  const Grid& g = m.grid();
  std::vector<double> in(g.size(), 0.0), ex(g.size(), 0.0), mag(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = v[i] * ln[i] * g.cell_volume();
    (g.in_omega(i) ? in : ex)[i] = t;
    mag[i] = std::abs(t);
  }
  r.interior = kahan_sum(in.data(), in.size());
  r.exterior = kahan_sum(ex.data(), ex.size());
  r.residual = std::abs(r.form - r.interior - r.exterior);
  r.scale = kahan_sum(mag.data(), mag.size()) + std::abs(r.form);
  return r;
}

}  // namespace plevy
