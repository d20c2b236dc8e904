#include "plevy/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "plevy/error.hpp"

namespace plevy {

namespace {

using GL = boost::math::quadrature::gauss<double, 10>;

// int_u^v f(r) dr in the variable t = ln r with m equal panels.
double log_panels(const std::function<double(double)>& f, double u, double v, int m) {
  const double t0 = std::log(u), t1 = std::log(v);
  const double dt = (t1 - t0) / m;
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double a = t0 + j * dt, b = (j + 1 == m) ? t1 : a + dt;
    s += GL::integrate([&](double t) { const double r = std::exp(t); return f(r) * r; }, a, b);
  }
  return s;
}

double segment(const std::function<double(double)>& f, double u, double v, const RadialQuadrature& q) {
  int m = std::max(1, static_cast<int>(std::ceil(2.0 * std::log10(v / u))));
  double prev = log_panels(f, u, v, m);
  for (int it = 0; it < q.max_refine; ++it) {
    m *= 2;
    const double cur = log_panels(f, u, v, m);
    if (std::abs(cur - prev) <= q.tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  raise(ErrorKind::Integrability, "radial quadrature did not converge on a segment");
}

// Fitted exponent alpha of f(r) ~ C r^alpha between r1 < r2.
double fitted_exponent(double f1, double f2, double r1, double r2) {
  return std::log(f2 / f1) / std::log(r2 / r1);
}

}  // namespace

double radial_integral(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& breaks, const RadialQuadrature& q) {
  require(a >= 0.0 && b > a, ErrorKind::Precondition, "radial integral needs 0 <= a < b");
  double bmin = INFINITY, bmax = 0.0;
  for (double r : breaks) {
    if (r > 0.0 && std::isfinite(r)) {
      bmin = std::min(bmin, r);
      bmax = std::max(bmax, r);
    }
  }
  const bool open_lo = a == 0.0, open_hi = std::isinf(b);
  double lo = a, hi = b;
  if (open_lo) lo = std::min(q.r_min, std::isfinite(bmin) ? 1e-4 * bmin : q.r_min);
  if (open_hi) hi = std::max({q.r_max, 1e4 * bmax, 1e4 * lo});
  if (!open_hi && open_lo) lo = std::min(lo, 1e-4 * b);
  std::vector<double> knots{lo, hi};
  for (double r : breaks)
    if (r > lo && r < hi) knots.push_back(r);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) total += segment(f, knots[i], knots[i + 1], q);

  if (open_lo) {
    const double f1 = f(lo), f2 = f(4.0 * lo);
    if (f1 != 0.0) {
      require(f2 != 0.0 && std::signbit(f1) == std::signbit(f2), ErrorKind::Integrability,
              "integrand changes sign near the origin");
      const double alpha = fitted_exponent(f1, f2, lo, 4.0 * lo) + 1.0;
      if (!(alpha > 1e-3)) raise(ErrorKind::Integrability, "integrand is not integrable at the origin");
      total += f1 * lo / alpha;
    }
  }
  if (open_hi) {
    const double f1 = f(0.25 * hi), f2 = f(hi);
    if (f2 != 0.0) {
      require(f1 != 0.0 && std::signbit(f1) == std::signbit(f2), ErrorKind::Integrability,
              "integrand changes sign in the far field");
      const double beta = -fitted_exponent(f1, f2, 0.25 * hi, hi) - 1.0;
      if (!(beta > 1e-3)) raise(ErrorKind::Integrability, "integrand is not integrable at infinity");
      total += f2 * hi / beta;
    }
  }
  if (!std::isfinite(total)) raise(ErrorKind::Integrability, "radial integral is not finite");
  return total;
}

namespace {

double radial_mass(const ExponentDim& pd, const std::function<double(double)>& nu, std::vector<double> breaks,
                   double support, const RadialQuadrature& q) {
  const double p = pd.p();
  const int d = pd.d();
  breaks.push_back(1.0);
  auto f = [&](double r) { return std::min(1.0, std::pow(r, p)) * nu(r) * std::pow(r, d - 1); };
  return sphere_area(d) * radial_integral(f, 0.0, support, breaks, q);
}

}  // namespace

BaseProfile::BaseProfile(const ExponentDim& pd, std::function<double(double)> nu, std::vector<double> breaks,
                         double support, std::string name)
    : pd_(pd), nu_(std::move(nu)), breaks_(std::move(breaks)), support_(support), name_(std::move(name)) {}

BaseProfile BaseProfile::indicator(const ExponentDim& pd) {
  const double c = (pd.p() + pd.d()) / sphere_area(pd.d());
  return BaseProfile(pd, [c](double r) { return r <= 1.0 ? c : 0.0; }, {1.0}, 1.0, "indicator");
}

BaseProfile BaseProfile::algebraic(const ExponentDim& pd) {
  const double e = pd.d() + pd.p() + 1.0;
  return from_function(pd, [e](double r) { return std::pow(1.0 + r, -e); }, {1.0}, INFINITY, "algebraic", true);
}

BaseProfile BaseProfile::from_function(const ExponentDim& pd, std::function<double(double)> nu,
                                       std::vector<double> breaks, double support, std::string name,
                                       bool normalize) {
  require(support > 0.0, ErrorKind::Precondition, "base profile support must be positive");
  BaseProfile b(pd, std::move(nu), std::move(breaks), support, std::move(name));
  const double m = radial_mass(pd, b.nu_, b.breaks_, support, {});
  if (normalize) {
    require(m > 0.0, ErrorKind::Precondition, "base profile has zero mass");
    b.c_ = 1.0 / m;
  } else if (std::abs(m - 1.0) > 1e-6) {
    std::ostringstream os;
    os.precision(12);
    os << "base profile is not p-Levy normalised: mass = " << m;
    raise(ErrorKind::Precondition, os.str());
  }
  return b;
}

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Fractional: return "fractional";
    case KernelFamily::Rescaled: return "rescaled";
    case KernelFamily::Custom: return "custom";
  }
  return "custom";
}

Kernel Kernel::fractional(const ExponentDim& pd, double eps) {
  const double a = a_scaling(pd, eps);
  const double expo = pd.d() + (1.0 - eps) * pd.p();
  const double sp = (1.0 - eps) * pd.p();
  Kernel k(pd);
  k.family_ = KernelFamily::Fractional;
  k.eps_ = eps;
  k.profile_ = [a, expo](double r) { return a * std::pow(r, -expo); };
  k.tail_ = [eps, sp](double delta) -> std::optional<double> { return eps * std::pow(delta, -sp); };
  k.name_ = "fractional";
  return k;
}

Kernel Kernel::rescaled(const BaseProfile& base, double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::Range, "eps must lie in (0, 1)");
  const ExponentDim& pd = base.pd();
  const double p = pd.p();
  const int d = pd.d();
  const double inner = std::pow(eps, -d - p), outer = std::pow(eps, -d);
  Kernel k(pd);
  k.family_ = KernelFamily::Rescaled;
  k.eps_ = eps;
  k.profile_ = [base, eps, inner, outer, p](double r) {
    const double b = base(r / eps);
    if (b == 0.0) return 0.0;
    if (r <= eps) return inner * b;
    if (r <= 1.0) return outer * std::pow(r, -p) * b;
    return outer * b;
  };
  k.breaks_ = {eps, 1.0};
  for (double r : base.breaks()) k.breaks_.push_back(eps * r);
  k.support_ = eps * base.support();
  if (std::isfinite(k.support_)) k.breaks_.push_back(k.support_);
  if (base.name() == "indicator") {
    const double c = (p + d) / sphere_area(d);
    k.tail_ = [c, eps, inner, d](double delta) -> std::optional<double> {
      if (delta >= eps) return 0.0;
      return sphere_area(d) * c * inner * (std::pow(eps, d) - std::pow(delta, d)) / d;
    };
  }
  k.name_ = "rescaled-" + base.name();
  return k;
}

Kernel Kernel::custom(const ExponentDim& pd, std::function<double(double)> nu, std::vector<double> breaks,
                      double support, std::string name) {
  Kernel k(pd);
  k.profile_ = std::move(nu);
  k.breaks_ = std::move(breaks);
  k.support_ = support;
  if (std::isfinite(support)) k.breaks_.push_back(support);
  k.name_ = std::move(name);
  return k;
}

Kernel Kernel::scaled(double c) const {
  require(c > 0.0 && std::isfinite(c), ErrorKind::Precondition, "kernel scale must be positive");
  Kernel k = *this;
  k.scale_ *= c;
  return k;
}

double Kernel::at(double hx, double hy) const { return (*this)(std::hypot(hx, hy)); }

std::optional<double> Kernel::tail_closed_form(double delta) const {
  if (!tail_) return std::nullopt;
  auto t = tail_(delta);
  if (t) *t *= scale_;
  return t;
}

double plevy_mass(const Kernel& k, const RadialQuadrature& q) {
  return radial_mass(k.pd(), [&k](double r) { return k(r); }, k.breaks(), k.support(), q);
}

double tail_mass_quadrature(const Kernel& k, double delta, const RadialQuadrature& q) {
  require(delta > 0.0, ErrorKind::Precondition, "tail radius must be positive");
  if (delta >= k.support()) return 0.0;
  const int d = k.pd().d();
  auto f = [&](double r) { return k(r) * std::pow(r, d - 1); };
  return sphere_area(d) * radial_integral(f, delta, k.support(), k.breaks(), q);
}

double tail_mass(const Kernel& k, double delta, const RadialQuadrature& q) {
  require(delta > 0.0, ErrorKind::Precondition, "tail radius must be positive");
  if (auto t = k.tail_closed_form(delta)) return *t;
  return tail_mass_quadrature(k, delta, q);
}

double inner_moment(const Kernel& k, double delta, const RadialQuadrature& q) {
  require(delta > 0.0, ErrorKind::Precondition, "moment radius must be positive");
  const int d = k.pd().d();
  const double p = k.pd().p();
  auto f = [&](double r) { return std::pow(r, p + d - 1) * k(r); };
  return sphere_area(d) * radial_integral(f, 0.0, std::min(delta, k.support()), k.breaks(), q);
}

}  // namespace plevy
