#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "plevy/expression.hpp"
#include "plevy/solve.hpp"

namespace plevy {

/// How a gap column is judged: last/first <= guard, or |last| <= guard.
enum class GuardKind { RatioToFirst, Final };

struct GapColumn {
  std::string column;
  double guard = 0.1;
  GuardKind kind = GuardKind::RatioToFirst;
  /// Columns whose magnitude never exceeds this pass outright.
  double floor = 1e-12;
};

/// Rows of one sweep. Column 0 is the ladder variable ("eps" or "s").
struct SweepReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Columns whose (weakly) monotone decay is asserted.
  std::vector<GapColumn> gap_columns;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
  void add_row(std::vector<double> row);
};

struct Verdict {
  std::string column;
  double first = 0.0;
  double last = 0.0;
  double ratio = 0.0;   ///< last / first (0 when first == 0)
  double guard = 0.0;
  GuardKind kind = GuardKind::RatioToFirst;
  bool weakly_decreasing = false;
  bool below_guard = false;
  bool pass() const { return weakly_decreasing && below_guard; }
};

/// Non-increasing up to one step that grows by at most 10% of the previous value.
bool weakly_decreasing(const std::vector<double>& xs);
bool strictly_decreasing(const std::vector<double>& xs);
std::vector<Verdict> verdicts(const SweepReport& r);

/// Writes <dir>/<name>.csv (17 significant digits) and <dir>/<name>.summary.json.
void write_report(const SweepReport& r, const std::string& dir);
std::string to_csv(const SweepReport& r);
nlohmann::json summary_json(const SweepReport& r);

/// FNV-1a 64-bit hash of a string, printed as 16 hex digits.
std::string fingerprint(const std::string& canonical);

/// Family names: "rescaled" (indicator base), "rescaled-algebraic", "fractional".
struct SweepSettings {
  double p = 2.0;
  int d = 1;
  std::string family = "rescaled";
  KernelQuadrature quadrature = KernelQuadrature::CellAveraged;
  std::vector<double> ladder{0.4, 0.2, 0.1, 0.05};
  Domain domain = Domain::interval(0.0, 1.0);
  /// Grid spacing is min(eps / spacing_ratio, max_spacing) unless fixed_spacing > 0.
  double spacing_ratio = 8.0;
  double max_spacing = 1.0 / 64.0;
  double fixed_spacing = 0.0;
  /// Collar tail tolerance for kernels without compact support.
  double tau_tail = 1e-2;
  /// Spacing of the local reference solves.
  double local_spacing = 1.0 / 2048.0;
  /// Guard on last/first for gap columns (engineering choice, not a rate).
  double guard = 0.10;
  /// Guard on the final relative gap for sweeps with a known limit value.
  double final_guard = 0.05;
  SolveConfig solver;
};

Kernel make_kernel(const SweepSettings& s, double eps);
std::shared_ptr<const NonlocalModel> make_model(const SweepSettings& s, const Kernel& k, double eps);

SweepReport bbm_sweep(const Expression& u, const SweepSettings& s);
SweepReport collapse_sweep(const Expression& u, const Expression& v, const SweepSettings& s);
SweepReport dirichlet_convergence(const Expression& f, const Expression& g, const SweepSettings& s);
SweepReport neumann_convergence(const Expression& f, const Expression& phi, const SweepSettings& s,
                                bool regional = false);
SweepReport weak_data_convergence(const Expression& phi, const Expression& v, const SweepSettings& s);
/// Ladder values are s; the kernel is the fractional one with eps = 1 - s scaled to the
/// normalised fractional p-Laplacian. `bump` is used for the operator identity check.
SweepReport fractional_sweep(const Expression& f, const Expression& g, const Expression& bump,
                             const SweepSettings& s);
/// tau = 0: Dirichlet functional with v = g on the collar; tau = 1: Neumann functional.
SweepReport functional_convergence(const Expression& v, int tau, const Expression& f, const Expression& g,
                                   const SweepSettings& s);
SweepReport trace_convergence_report(const Expression& g, const SweepSettings& s);
/// Pointwise L_eps u(x) against -K_{d,p} Delta_p u(x) with the bound certificate.
SweepReport pointwise_sweep(const Expression& u, double x, const SweepSettings& s);

/// Piecewise-linear interpolation of a 1D local solution (values at the Omega
/// nodes of `from`) onto every node of `to`, using `left`/`right` as the values
/// at the endpoints of Omega, and linear extrapolation outside Omega.
GridFunction transfer_1d(const GridFunction& from, double left, double right, const GridPtr& to);

/// 1D: replaces collar values by the linear extrapolation of the two nearest Omega nodes.
GridFunction extend_linear_1d(const GridFunction& u);

/// int_Omega |u'|^p by Gauss-Legendre panels using the exact derivative of u (d = 1).
double gradient_lp_pow(const Expression& u, double p, double a, double b, int panels = 4096);

}  // namespace plevy
