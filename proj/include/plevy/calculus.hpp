#pragma once

#include <span>
#include <string>
#include <vector>

namespace plevy {

/// Constants of the elementary p-inequalities and of the form sandwich.
/// At p = 2 the p >= 2 branch is used (kappa'_2 = 1/2).
struct PConstants {
  double p = 2.0;
  double kappa = 1.0;
  double kappa_prime = 0.5;
  double alpha = 0.0;  ///< max(1, p/2) - 1
  double beta = 0.0;   ///< min(1, p/2) - 1
  double c = 1.0;      ///< 2^{p(p-2)/2} kappa^{p/2}, used for p >= 2
  double c_prime = 1.0;  ///< 2^{-p(2-p)/2} kappa'^{p/2}, used for 1 < p < 2

  static PConstants of(double p);
};

/// psi(t) = |t|^{p-2} t, psi(0) = 0.
double psi(double p, double t);
/// (t^2 + delta^2)^{(p-2)/2} t; equals psi when delta = 0.
double psi_reg(double p, double t, double delta);
/// d/dt psi_reg (for delta = 0 and t = 0 with p < 2 this is +inf).
double psi_reg_derivative(double p, double t, double delta);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs for "lhs <= rhs" checks.
  double margin = 0.0;
  bool ok = true;
};

struct ViolationReport {
  std::vector<InequalityCheck> checks;
  bool ok() const;
};

/// The two elementary inequalities of the applicable p-branch for vectors x, y:
/// an upper bound on |psi(x) - psi(y)| and a lower bound on (psi(x) - psi(y)).(x - y).
ViolationReport check_simons(double p, std::span<const double> x, std::span<const double> y);

/// Upper and lower bounds on |x+y|^p - |x|^p - p|x|^{p-2} x.y.
ViolationReport check_taylor(double p, std::span<const double> x, std::span<const double> y);

/// Values entering the linearisation sandwich for a form E:
/// E(u,u), E(v,v), E(u,u-v), E(v,u-v), E(u-v,u-v).
struct FormSample {
  double uu = 0.0, vv = 0.0, u_d = 0.0, v_d = 0.0, dd = 0.0;
};

/// Both p-branch estimates plus the mixed alpha/beta estimates.
ViolationReport check_form_sandwich(double p, const FormSample& s);

struct ZetaRow {
  double t = 0.0;
  double zeta = 0.0;
};

/// zeta(t) = (|1+t|^p - sum_{k <= floor p} binom(p,k) t^k) / |t|^p on the given samples.
struct ZetaTable {
  std::vector<ZetaRow> rows;
  double max_abs = 0.0;
};

double zeta(double p, double t);
ZetaTable zeta_profile(double p, std::span<const double> t_samples);

}  // namespace plevy
