#pragma once

// Universal constants attached to p-Levy kernels: the spherical p-moment
// K_{d,p}, the fractional p-Laplacian normalisation C_{d,p,s} and its
// piecewise variant, and the fractional-kernel scaling a_{eps,d,p}.
// Gamma ratios are formed in log space.

namespace plevy {

/// Integrability exponent p > 1 together with the spatial dimension d in {1, 2}.
class ExponentDim {
 public:
  ExponentDim(double p, int d);

  double p() const { return p_; }
  int d() const { return d_; }
  /// Conjugate exponent p' = p / (p - 1).
  double conjugate() const { return p_ / (p_ - 1.0); }

 private:
  double p_;
  int d_;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Surface measure of the unit sphere S^{d-1} in R^d; any d >= 1.
double sphere_area(int d);

/// K_{d,q} = Gamma(d/2) Gamma((q+1)/2) / (Gamma((d+q)/2) Gamma(1/2)) for q > -1,
/// the normalised spherical average of |w_d|^q.
double k_const_general(int d, double q);
double k_const(const ExponentDim& pd);

/// Lower and upper admissible s for the direct evaluation of C_{d,p,s}.
inline constexpr double kFracSMargin = 1e-4;

/// C_{d,p,s} from the all-Gamma expression. Whenever |s - 1/2| > 1e-3 the
/// cosine expression is evaluated too and the two must agree to 1e-9 relative.
double c_frac(const ExponentDim& pd, double s);

/// The cosine expression s(1-2s)Gamma((d+sp)/2) / (pi^{(d-1)/2} Gamma((sp+1)/2)
/// Gamma(p(1-s)) cos(s pi)). Undefined (0/0) at s = 1/2; rejected within 1e-3.
double c_frac_cosine_form(const ExponentDim& pd, double s);

/// The all-Gamma expression without the cross-check.
double c_frac_gamma_form(const ExponentDim& pd, double s);

/// C~_{d,p,s}: C_{d,p,s} if sp >= 1, otherwise C_{d,2,sp/2}.
double c_tilde(const ExponentDim& pd, double s);

/// a_{eps,d,p} = p eps (1 - eps) / |S^{d-1}|.
double a_scaling(const ExponentDim& pd, double eps);

}  // namespace plevy
