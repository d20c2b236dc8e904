#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plevy/constants.hpp"

namespace plevy {

/// Controls the one-dimensional radial quadrature used for kernel masses.
struct RadialQuadrature {
  double r_min = 1e-8;
  double r_max = 1e8;
  double tol = 1e-10;
  int max_refine = 14;
};

/// Integral of f over [a, b] (a >= 0, b may be +inf). Works in the variable
/// ln r with Gauss-Legendre panels split at `breaks`; the pieces [0, r_min]
/// and [r_max, inf) are closed with a fitted power law. A fitted exponent that
/// makes either end divergent raises Error(Integrability).
double radial_integral(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& breaks, const RadialQuadrature& q = {});

/// A radial profile nu with |S^{d-1}| int (1 ^ r^p) nu(r) r^{d-1} dr = 1.
class BaseProfile {
 public:
  /// nu = ((p + d) / |S^{d-1}|) 1_{|u| <= 1}.
  static BaseProfile indicator(const ExponentDim& pd);
  /// nu proportional to (1 + |u|)^{-(d + p + 1)}, normalised by quadrature.
  static BaseProfile algebraic(const ExponentDim& pd);
  /// Wraps a user profile. With normalize = false the mass must already be 1
  /// to within 1e-6, otherwise Error(Precondition) reports the mass found.
  static BaseProfile from_function(const ExponentDim& pd, std::function<double(double)> nu,
                                   std::vector<double> breaks, double support, std::string name,
                                   bool normalize = false);

  double operator()(double r) const { return c_ * nu_(r); }
  const ExponentDim& pd() const { return pd_; }
  /// Radius beyond which nu vanishes (+inf if unbounded).
  double support() const { return support_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::string& name() const { return name_; }

 private:
  BaseProfile(const ExponentDim& pd, std::function<double(double)> nu, std::vector<double> breaks, double support,
              std::string name);
  ExponentDim pd_;
  std::function<double(double)> nu_;
  double c_ = 1.0;
  std::vector<double> breaks_;
  double support_;
  std::string name_;
};

enum class KernelFamily { Fractional, Rescaled, Custom };

const char* to_string(KernelFamily f);

/// Radial p-Levy kernel nu(h) = profile(|h|). Immutable and cheap to copy.
class Kernel {
 public:
  /// a_{eps,d,p} |h|^{-d-(1-eps)p}.
  static Kernel fractional(const ExponentDim& pd, double eps);
  /// The three-piece rescaling of a normalised base profile.
  static Kernel rescaled(const BaseProfile& base, double eps);
  static Kernel custom(const ExponentDim& pd, std::function<double(double)> nu, std::vector<double> breaks,
                       double support = std::numeric_limits<double>::infinity(), std::string name = "custom");

  /// Returns c * nu with the same family metadata.
  Kernel scaled(double c) const;

  double operator()(double r) const { return scale_ * profile_(r); }
  double at(double hx, double hy = 0.0) const;

  KernelFamily family() const { return family_; }
  const ExponentDim& pd() const { return pd_; }
  /// eps of the family (NaN for custom kernels).
  double eps() const { return eps_; }
  double scale() const { return scale_; }
  double support() const { return support_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::string& name() const { return name_; }

  /// Closed-form tail int_{|h| > delta} nu, where one is known.
  std::optional<double> tail_closed_form(double delta) const;

 private:
  Kernel(const ExponentDim& pd) : pd_(pd) {}
  ExponentDim pd_;
  KernelFamily family_ = KernelFamily::Custom;
  double eps_ = std::numeric_limits<double>::quiet_NaN();
  double scale_ = 1.0;
  std::function<double(double)> profile_;
  std::function<std::optional<double>(double)> tail_;
  std::vector<double> breaks_;
  double support_ = std::numeric_limits<double>::infinity();
  std::string name_;
};

inline Kernel fractional_kernel(const ExponentDim& pd, double eps) { return Kernel::fractional(pd, eps); }
inline Kernel rescaled_kernel(const BaseProfile& base, double eps) { return Kernel::rescaled(base, eps); }

/// int (1 ^ |h|^p) nu(h) dh by radial quadrature.
double plevy_mass(const Kernel& k, const RadialQuadrature& q = {});
/// int_{|h| > delta} nu(h) dh; closed form when available.
double tail_mass(const Kernel& k, double delta, const RadialQuadrature& q = {});
/// Same, always by quadrature.
double tail_mass_quadrature(const Kernel& k, double delta, const RadialQuadrature& q = {});
/// int_{|h| < delta} |h|^p nu(h) dh.
double inner_moment(const Kernel& k, double delta, const RadialQuadrature& q = {});

}  // namespace plevy
