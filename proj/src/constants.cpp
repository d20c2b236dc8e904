#include "plevy/constants.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "plevy/error.hpp"

namespace plevy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCosineExclusion = 1e-3;
constexpr double kCrossCheckTol = 1e-9;

void check_s(double s) {
  // Closed range with a rounding allowance so that s = 1 - 1e-4 is accepted.
  const double slack = 1e-12;
  if (!(s >= kFracSMargin - slack && s <= 1.0 - kFracSMargin + slack)) {
    std::ostringstream os;
    os << "fractional order s=" << s << " outside [" << kFracSMargin << ", " << 1.0 - kFracSMargin << "]";
    raise(ErrorKind::Range, os.str());
  }
}

}  // namespace

ExponentDim::ExponentDim(double p, int d) : p_(p), d_(d) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::Domain, "exponent p must satisfy 1 < p < inf");
  require(d == 1 || d == 2, ErrorKind::Domain, "dimension d must be 1 or 2");
}

double log_gamma(double x) {
  require(std::isfinite(x) && x > 0.0, ErrorKind::Domain, "log_gamma requires a finite positive argument");
  return boost::math::lgamma(x);
}

double sphere_area(int d) {
  require(d >= 1, ErrorKind::Domain, "sphere_area requires d >= 1");
  const double half = 0.5 * d;
  return 2.0 * std::exp(half * std::log(kPi) - log_gamma(half));
}

double k_const_general(int d, double q) {
  require(d >= 1, ErrorKind::Domain, "k_const requires d >= 1");
  require(q > -1.0, ErrorKind::Domain, "k_const requires q > -1");
  if (d == 1) return 1.0;  // |w_1|^q = 1 on S^0
  const double lg = log_gamma(0.5 * d) + log_gamma(0.5 * (q + 1.0)) - log_gamma(0.5 * (d + q)) - log_gamma(0.5);
  return std::exp(lg);
}

double k_const(const ExponentDim& pd) { return k_const_general(pd.d(), pd.p()); }

double c_frac_gamma_form(const ExponentDim& pd, double s) {
  check_s(s);
  const double d = pd.d();
  const double p = pd.p();
  // |Gamma(-s)| = Gamma(1-s)/s on (0,1)
  const double log_abs_gamma_minus_s = log_gamma(1.0 - s) - std::log(s);
  const double lg = 2.0 * s * std::log(2.0) + log_gamma(0.5 * (d + s * p)) + log_gamma(s + 0.5) +
                    log_gamma(2.0 * (1.0 - s)) - 0.5 * d * std::log(kPi) - log_abs_gamma_minus_s -
                    log_gamma(0.5 * (s * p + 1.0)) - log_gamma(p * (1.0 - s));
  return std::exp(lg);
}

double c_frac_cosine_form(const ExponentDim& pd, double s) {
  check_s(s);
  require(std::abs(s - 0.5) > kCosineExclusion, ErrorKind::Domain,
          "cosine form of C_{d,p,s} is indeterminate near s = 1/2");
  const double d = pd.d();
  const double p = pd.p();
  // (1-2s) and cos(s pi) share their sign on (0,1)
  const double ratio = std::abs((1.0 - 2.0 * s) / std::cos(s * kPi));
  const double lg = std::log(s) + std::log(ratio) + log_gamma(0.5 * (d + s * p)) - 0.5 * (d - 1.0) * std::log(kPi) -
                    log_gamma(0.5 * (s * p + 1.0)) - log_gamma(p * (1.0 - s));
  return std::exp(lg);
}

double c_frac(const ExponentDim& pd, double s) {
  const double value = c_frac_gamma_form(pd, s);
  if (std::abs(s - 0.5) > kCosineExclusion) {
    const double other = c_frac_cosine_form(pd, s);
    const double rel = std::abs(value - other) / std::abs(value);
    if (rel > kCrossCheckTol) {
      std::ostringstream os;
      os.precision(17);
      os << "C_{d,p,s} expressions disagree at d=" << pd.d() << " p=" << pd.p() << " s=" << s << ": " << value
         << " vs " << other;
      raise(ErrorKind::Consistency, os.str());
    }
  }
  return value;
}

double c_tilde(const ExponentDim& pd, double s) {
  check_s(s);
  if (s * pd.p() >= 1.0) return c_frac(pd, s);
  return c_frac(ExponentDim(2.0, pd.d()), 0.5 * s * pd.p());
}

double a_scaling(const ExponentDim& pd, double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::Range, "a_scaling requires eps in (0,1)");
  return pd.p() * eps * (1.0 - eps) / sphere_area(pd.d());
}

}  // namespace plevy
