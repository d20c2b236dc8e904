#include "plevy/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plevy/error.hpp"

namespace plevy {

PConstants PConstants::of(double p) {
  require(p > 1.0, ErrorKind::Domain, "exponent p must exceed 1");
  PConstants k;
  k.p = p;
  if (p >= 2.0) {
    k.kappa = p - 1.0;
    k.kappa_prime = std::min(0.5, std::exp2(2.0 - p));
  } else {
    k.kappa = std::exp2(2.0 - p) * (3.0 - p);
    k.kappa_prime = p - 1.0;
  }
  k.alpha = std::max(1.0, p / 2.0) - 1.0;
  k.beta = std::min(1.0, p / 2.0) - 1.0;
  k.c = std::exp2(p * (p - 2.0) / 2.0) * std::pow(k.kappa, p / 2.0);
  k.c_prime = std::exp2(-p * (2.0 - p) / 2.0) * std::pow(k.kappa_prime, p / 2.0);
  return k;
}

double psi(double p, double t) {
  if (p == 2.0) return t;
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  const double m = (a < 1e-6 || a > 1e6) ? std::exp((p - 1.0) * std::log(a)) : std::pow(a, p - 1.0);
  return std::copysign(m, t);
}

double psi_reg(double p, double t, double delta) {
  if (delta == 0.0) return psi(p, t);
  return std::pow(t * t + delta * delta, 0.5 * (p - 2.0)) * t;
}

double psi_reg_derivative(double p, double t, double delta) {
  if (p == 2.0) return 1.0;
  const double s = t * t + delta * delta;
  if (s == 0.0) return p > 2.0 ? 0.0 : INFINITY;
  // d/dt [s^{(p-2)/2} t] = s^{(p-4)/2} ((p-1) t^2 + delta^2)
  return std::pow(s, 0.5 * (p - 4.0)) * ((p - 1.0) * t * t + delta * delta);
}

bool ViolationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.ok; });
}

namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::vector<double> vpsi(double p, std::span<const double> x) {
  const double n = norm(x);
  std::vector<double> out(x.size(), 0.0);
  if (n == 0.0) return out;
  const double f = std::pow(n, p - 2.0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * x[i];
  return out;
}

// `terms` is the size of the quantities cancelled while forming lhs or rhs;
// the rounding allowance is taken relative to it.
InequalityCheck le(std::string name, double lhs, double rhs, double terms = 0.0) {
  InequalityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), terms, 1.0});
  c.ok = std::isfinite(lhs) && std::isfinite(rhs) ? lhs <= rhs + 1e-12 * scale : false;
  return c;
}

}  // namespace

ViolationReport check_simons(double p, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::Precondition, "vectors must have equal length");
  const auto k = PConstants::of(p);
  const auto px = vpsi(p, x), py = vpsi(p, y);
  std::vector<double> dpsi(x.size()), dxy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    dpsi[i] = px[i] - py[i];
    dxy[i] = x[i] - y[i];
  }
  const double lhs_up = norm(dpsi);
  const double inner = std::inner_product(dpsi.begin(), dpsi.end(), dxy.begin(), 0.0);
  const double dn = norm(dxy), sn = norm(x) + norm(y);
  const double terms = (norm(px) + norm(py)) * sn;
  ViolationReport r;
  if (p >= 2.0) {
    r.checks.push_back(le("upper_degenerate", lhs_up, k.kappa * dn * std::pow(sn, p - 2.0)));
    r.checks.push_back(le("lower_degenerate", k.kappa_prime * std::pow(dn, p), inner, terms));
  } else {
    r.checks.push_back(le("upper_singular", lhs_up, k.kappa * std::pow(dn, p - 1.0)));
    const double rhs = sn == 0.0 ? 0.0 : k.kappa_prime * dn * dn * std::pow(sn, p - 2.0);
    r.checks.push_back(le("lower_singular", rhs, inner, terms));
  }
  return r;
}

ViolationReport check_taylor(double p, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::Precondition, "vectors must have equal length");
  const auto k = PConstants::of(p);
  std::vector<double> xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] + y[i];
  const auto px = vpsi(p, x);
  const double nx = norm(x), ny = norm(y);
  const double mid = std::pow(norm(xy), p) - std::pow(nx, p) -
                     p * std::inner_product(px.begin(), px.end(), y.begin(), 0.0);
  const double terms = std::pow(norm(xy), p) + std::pow(nx, p) + p * std::pow(nx, p - 1.0) * ny;
  ViolationReport r;
  const double upper = p * k.kappa * std::pow(ny, std::min(p, 2.0)) * std::pow(ny + nx, std::max(p - 2.0, 0.0));
  r.checks.push_back(le("taylor_upper", mid, upper, terms));
  double lower;
  if (p >= 2.0) {
    // For p > 2 the factor p/2 in front is too large (p = 4, x = -1/3, y = 1
    // breaks it); kappa'_p |y|^p is what the integral representation gives.
    lower = k.kappa_prime * std::pow(ny, p);
  } else {
    lower = ny == 0.0 ? 0.0 : 0.5 * p * k.kappa_prime * ny * ny * std::pow(ny + nx, p - 2.0);
  }
  r.checks.push_back(le("taylor_lower", lower, mid, terms));
  return r;
}

ViolationReport check_form_sandwich(double p, const FormSample& s) {
  const auto k = PConstants::of(p);
  const double D = s.u_d - s.v_d;
  const double S = s.uu + s.vv;
  ViolationReport r;
  if (p >= 2.0) {
    r.checks.push_back(le("form_lower_degenerate", k.kappa_prime * s.dd, D));
    r.checks.push_back(le("form_upper_degenerate", std::pow(std::max(D, 0.0), p / 2.0),
                          k.c * s.dd * std::pow(S, (p - 2.0) / 2.0)));
  } else {
    r.checks.push_back(le("form_upper_singular", D, k.kappa * s.dd));
    r.checks.push_back(le("form_lower_singular", k.c_prime * s.dd * std::pow(S, (p - 2.0) / 2.0),
                          std::pow(std::max(D, 0.0), p / 2.0)));
  }
  // Mixed forms; a zero denominator only occurs when u = v = 0 and is skipped.
  if (S > 0.0) {
    const double Dp = std::max(D, 0.0);
    r.checks.push_back(le("form_upper_mixed", std::pow(Dp, k.alpha + 1.0) / std::pow(S, k.alpha),
                          std::exp2(p * k.alpha) * std::pow(k.kappa, k.alpha + 1.0) * s.dd));
    r.checks.push_back(le("form_lower_mixed", std::exp2(p * k.beta) * std::pow(k.kappa_prime, k.beta + 1.0) * s.dd,
                          std::pow(Dp, k.beta + 1.0) / std::pow(S, k.beta)));
  }
  return r;
}

double zeta(double p, double t) {
  require(t != 0.0, ErrorKind::Precondition, "zeta is evaluated at t != 0");
  const int n = static_cast<int>(std::floor(p));
  // sum_{k=1}^{n} binom(p,k) t^k; the k = 0 term is folded into expm1 below.
  double poly = 0.0, binom = 1.0, tk = 1.0;
  for (int k = 1; k <= n; ++k) {
    binom *= (p - (k - 1)) / k;
    tk *= t;
    poly += binom * tk;
  }
  double head;
  if (t > -1.0) {
    head = std::expm1(p * std::log1p(t)) - poly;
  } else {
    head = std::pow(std::abs(1.0 + t), p) - 1.0 - poly;
  }
  return head / std::pow(std::abs(t), p);
}

ZetaTable zeta_profile(double p, std::span<const double> t_samples) {
  ZetaTable tab;
  for (double t : t_samples) {
    const double z = zeta(p, t);
    tab.rows.push_back({t, z});
    tab.max_abs = std::max(tab.max_abs, std::abs(z));
  }
  return tab;
}

}  // namespace plevy
