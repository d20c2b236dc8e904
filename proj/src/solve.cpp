#include "plevy/solve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "pairs.hpp"
#include "plevy/calculus.hpp"
#include "plevy/error.hpp"
#include "plevy/parallel.hpp"

namespace plevy {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::NonlocalDirichlet: return "nonlocal-dirichlet";
    case Variant::NonlocalNeumann: return "nonlocal-neumann";
    case Variant::RegionalNeumann: return "regional-neumann";
    case Variant::LocalDirichlet: return "local-dirichlet";
    case Variant::LocalNeumann: return "local-neumann";
  }
  return "nonlocal-dirichlet";
}

Problem Problem::nonlocal_dirichlet(std::shared_ptr<const NonlocalModel> m, GridFunction f, GridFunction g) {
  Problem pr;
  pr.variant = Variant::NonlocalDirichlet;
  pr.p = m->p();
  pr.grid = m->grid_ptr();
  pr.mu = 1.0 / k_const(m->kernel().pd());
  pr.model = std::move(m);
  pr.f = std::move(f);
  pr.g = std::move(g);
  pr.validate();
  return pr;
}

Problem Problem::nonlocal_neumann(std::shared_ptr<const NonlocalModel> m, GridFunction f, GridFunction g) {
  Problem pr = nonlocal_dirichlet(std::move(m), std::move(f), std::move(g));
  pr.variant = Variant::NonlocalNeumann;
  pr.validate();
  return pr;
}

Problem Problem::regional_neumann(std::shared_ptr<const NonlocalModel> m, GridFunction f) {
  GridFunction g(m->grid_ptr());
  Problem pr = nonlocal_dirichlet(std::move(m), std::move(f), std::move(g));
  pr.variant = Variant::RegionalNeumann;
  pr.validate();
  return pr;
}

Problem Problem::local_dirichlet(GridPtr grid, double p, GridFunction f, std::array<double, 2> values) {
  Problem pr;
  pr.variant = Variant::LocalDirichlet;
  pr.p = p;
  pr.grid = std::move(grid);
  pr.f = std::move(f);
  pr.g = GridFunction(pr.grid);
  pr.boundary = values;
  pr.mu = 1.0;
  pr.validate();
  return pr;
}

Problem Problem::local_neumann(GridPtr grid, double p, GridFunction f, std::array<double, 2> fluxes) {
  Problem pr = local_dirichlet(std::move(grid), p, std::move(f), fluxes);
  pr.variant = Variant::LocalNeumann;
  pr.validate();
  return pr;
}

void Problem::validate() const {
  require(p > 1.0, ErrorKind::Validation, "exponent p must exceed 1");
  require(grid != nullptr, ErrorKind::Validation, "problem needs a grid");
  require(&f.grid() == grid.get() && &g.grid() == grid.get(), ErrorKind::Validation, "data live on another grid");
  require(mu > 0.0 && lambda >= 0.0, ErrorKind::Validation, "weights must satisfy mu > 0, lambda >= 0");
  for (std::size_t i = 0; i < grid->size(); ++i) {
    require(std::isfinite(f[i]) && std::isfinite(g[i]), ErrorKind::Validation, "problem data must be finite");
  }
  if (is_local()) {
    require(grid->dim() == 1, ErrorKind::Validation, "local problems are solved in one dimension");
    require(std::isfinite(boundary[0]) && std::isfinite(boundary[1]), ErrorKind::Validation,
            "boundary data must be finite");
  } else {
    require(model != nullptr && &model->grid() == grid.get(), ErrorKind::Validation,
            "nonlocal problems need a model on the problem grid");
    require(std::abs(model->p() - p) < 1e-15, ErrorKind::Validation, "kernel exponent differs from problem exponent");
  }
  if (variant == Variant::NonlocalNeumann || variant == Variant::RegionalNeumann || variant == Variant::LocalNeumann) {
    const double w = grid->cell_volume();
    double total = 0.0, mag = 0.0;
    for (std::size_t i : grid->omega_nodes()) {
      total += f[i] * w;
      mag += std::abs(f[i]) * w;
    }
    if (variant == Variant::NonlocalNeumann) {
      for (std::size_t i : grid->collar_nodes()) {
        total += g[i] * w;
        mag += std::abs(g[i]) * w;
      }
    }
    if (variant == Variant::LocalNeumann) {
      total += boundary[0] + boundary[1];
      mag += std::abs(boundary[0]) + std::abs(boundary[1]);
    }
    if (std::abs(total) > 1e-10 * mag) {
      std::ostringstream os;
      os.precision(17);
      os << "Neumann data are incompatible: <f,1> + <g,1> = " << total;
      raise(ErrorKind::Validation, os.str());
    }
  }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Regularised pair potential ((t^2 + d^2)^{p/2} - d^p) / p.
double phi_reg(double p, double t, double delta) {
  if (delta == 0.0) return std::pow(std::abs(t), p) / p;
  return (std::pow(t * t + delta * delta, 0.5 * p) - std::pow(delta, p)) / p;
}

// psi_reg for the difference a - b. In the unregularised singular case a
// difference within rounding of the operands takes the subgradient value 0;
// otherwise psi would turn rounding noise into a residual floor.
double psi_diff(double p, double a, double b, double delta) {
  const double t = a - b;
  if (delta == 0.0 && p < 2.0 && std::abs(t) <= 8.0 * 2.2e-16 * (std::abs(a) + std::abs(b))) return 0.0;
  return psi_reg(p, t, delta);
}

class Objective {
 public:
  Objective(const Problem& pr, double delta) : pr_(pr), g_(*pr.grid), delta_(delta) {
    const bool all = pr.variant == Variant::NonlocalNeumann;
    index_.assign(g_.size(), -1);
    for (std::size_t i = 0; i < g_.size(); ++i) {
      if (all || g_.in_omega(i)) {
        index_[i] = static_cast<long>(unknowns_.size());
        unknowns_.push_back(i);
      }
    }
    zero_mean_ = !pr.is_dirichlet();
    w_ = g_.cell_volume();
  }

  std::size_t n() const { return unknowns_.size(); }
  const std::vector<std::size_t>& unknowns() const { return unknowns_; }
  double weight() const { return w_; }
  bool zero_mean() const { return zero_mean_; }
  /// Unregularised with 1 < p < 2: psi' blows up at 0.
  bool singular() const { return delta_ == 0.0 && pr_.p < 2.0; }

  std::vector<double> gather(const GridFunction& v) const {
    std::vector<double> x(n());
    for (std::size_t k = 0; k < n(); ++k) x[k] = v[unknowns_[k]];
    return x;
  }

  GridFunction scatter(const std::vector<double>& x) const {
    GridFunction v(pr_.grid);
    if (pr_.is_dirichlet()) {
      for (std::size_t i = 0; i < g_.size(); ++i) v[i] = pr_.g[i];
    }
    for (std::size_t k = 0; k < n(); ++k) v[unknowns_[k]] = x[k];
    return v;
  }

  void project(std::vector<double>& x) const {
    if (!zero_mean_) return;
    double s = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < n(); ++k) {
      if (g_.in_omega(unknowns_[k])) {
        s += x[k];
        ++cnt;
      }
    }
    const double mean = s / static_cast<double>(cnt);
    for (double& v : x) v -= mean;
  }

  double residual_norm(const std::vector<double>& grad) const {
    double s = 0.0;
    for (double gi : grad) s += gi * gi;
    return std::sqrt(s / w_);
  }

  double value_grad(const std::vector<double>& x, std::vector<double>* grad) const {
    const GridFunction v = scatter(x);
    if (grad) grad->assign(n(), 0.0);
    return pr_.is_local() ? local_value_grad(v, grad) : nonlocal_value_grad(v, grad);
  }

  SpMat metric(const std::vector<double>& x, int reach, double scale) const {
    const GridFunction v = scatter(x);
    const double p = pr_.p;
    // Floor for the lagged weights so that flat regions keep a positive metric.
    double drms = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i : g_.omega_nodes()) {
      const auto ix = g_.index(i);
      if (ix[0] + 1 < g_.nodes_along(0)) {
        const double d = v[g_.node_at(ix[0] + 1, ix[1])] - v[i];
        drms += d * d;
        ++cnt;
      }
    }
    drms = cnt ? std::sqrt(drms / static_cast<double>(cnt)) : 0.0;
    const double sigma = std::max(delta_, 1e-2 * std::max(drms, 1e-3 * scale));
    auto lagged = [&](double t) {
      if (p == 2.0) return 1.0;
      return (p - 1.0) * std::pow(t * t + sigma * sigma, 0.5 * (p - 2.0));
    };
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> diag(n(), 0.0);
    if (pr_.is_local()) {
      const double h = g_.spacing(0);
      const auto& om = g_.omega_nodes();
      const std::size_t m = om.size();
      for (std::size_t k = 0; k + 1 < m; ++k) {
        const double c = pr_.mu * lagged((v[om[k + 1]] - v[om[k]]) / h) / h;
        diag[k] += c;
        diag[k + 1] += c;
        trip.emplace_back(k, k + 1, -c);
        trip.emplace_back(k + 1, k, -c);
      }
      if (pr_.variant == Variant::LocalDirichlet) {
        const double hb = 0.5 * h;
        diag[0] += pr_.mu * lagged((v[om[0]] - pr_.boundary[0]) / hb) / hb;
        diag[m - 1] += pr_.mu * lagged((pr_.boundary[1] - v[om[m - 1]]) / hb) / hb;
      }
    } else {
      const LatticeWeights& W = pr_.model->weights();
      const bool regional = pr_.variant == Variant::RegionalNeumann;
      const double c0 = 2.0 * pr_.mu * w_ * w_;
      for (std::size_t k = 0; k < n(); ++k) {
        const std::size_t i = unknowns_[k];
        const auto ii = g_.index(i);
        detail::for_each_partner(g_, W, i, [&](std::size_t j, double wij) {
          if (regional && !g_.in_omega(j)) return;
          if (!g_.in_omega(i) && !g_.in_omega(j)) return;
          const double c = c0 * wij * lagged(v[i] - v[j]);
          diag[k] += c;
          const long kj = index_[j];
          if (kj < 0) return;
          const auto jj = g_.index(j);
          if (std::abs(jj[0] - ii[0]) > reach || std::abs(jj[1] - ii[1]) > reach) return;
          trip.emplace_back(k, static_cast<std::size_t>(kj), -c);
        });
      }
    }
    if (pr_.lambda > 0.0) {
      for (std::size_t k = 0; k < n(); ++k) {
        if (!g_.in_omega(unknowns_[k])) continue;
        diag[k] += pr_.lambda * w_ * lagged(v[unknowns_[k]]);
      }
    }
    const double dmax = *std::max_element(diag.begin(), diag.end());
    const double shift = 1e-10 * std::max(dmax, 1e-300);
    for (std::size_t k = 0; k < n(); ++k) trip.emplace_back(k, k, diag[k] + shift);
    SpMat P(static_cast<long>(n()), static_cast<long>(n()));
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
  }

  /// Residual norm of the data terms alone (f, g and boundary fluxes).
  double data_residual() const {
    std::vector<double> g(n(), 0.0);
    linear_terms(GridFunction(pr_.grid), &g);
    if (pr_.variant == Variant::LocalNeumann) {
      g.front() -= pr_.boundary[0];
      g.back() -= pr_.boundary[1];
    }
    return residual_norm(g);
  }

  /// Residual norm of a bound on the rounding error of each gradient entry:
  /// every pair term is perturbed by the rounding of its difference.
  double gradient_noise(const std::vector<double>& x) const {
    constexpr double u = 2.2e-16;
    const GridFunction v = scatter(x);
    const double p = pr_.p;
    auto term = [&](double a, double b, double scale) {
      const double t = (a - b) / scale;
      const double eta = 4.0 * u * (std::abs(a) + std::abs(b)) / scale;
      const double y = psi_reg(p, t, delta_);
      return std::abs(psi_reg(p, t + eta, delta_) - y) + 4.0 * u * std::abs(y);
    };
    std::vector<double> e(n(), 0.0);
    if (pr_.is_local()) {
      const double h = g_.spacing(0), hb = 0.5 * h;
      const auto& om = g_.omega_nodes();
      const std::size_t m = om.size();
      for (std::size_t k = 0; k < m; ++k) {
        if (k > 0) e[k] += pr_.mu * term(v[om[k]], v[om[k - 1]], h);
        if (k + 1 < m) e[k] += pr_.mu * term(v[om[k + 1]], v[om[k]], h);
      }
      if (pr_.variant == Variant::LocalDirichlet) {
        e[0] += pr_.mu * term(v[om[0]], pr_.boundary[0], hb);
        e[m - 1] += pr_.mu * term(pr_.boundary[1], v[om[m - 1]], hb);
      }
    } else {
      const bool regional = pr_.variant == Variant::RegionalNeumann;
      parallel_for(n(), [&](std::size_t k) {
        const std::size_t i = unknowns_[k];
        const bool in = g_.in_omega(i);
        double s = 0.0;
        detail::for_each_partner(g_, pr_.model->weights(), i, [&](std::size_t j, double wij) {
          const bool jin = g_.in_omega(j);
          if ((!in && !jin) || (regional && !jin)) return;
          s += term(v[i], v[j], 1.0) * wij;
        });
        e[k] = 2.0 * pr_.mu * w_ * w_ * s;
      });
    }
    for (std::size_t k = 0; k < n(); ++k) {
      const std::size_t i = unknowns_[k];
      e[k] += 4.0 * u * std::abs(pr_.f[i]) * w_;
    }
    return residual_norm(e);
  }

  /// Gradient component k at v with the value of that unknown replaced by vi.
  /// Increasing in vi, which the coordinate polish relies on.
  double node_grad(const GridFunction& v, std::size_t k, double vi) const {
    const double p = pr_.p;
    const std::size_t i = unknowns_[k];
    double gk = 0.0;
    if (pr_.is_local()) {
      const double h = g_.spacing(0), hb = 0.5 * h;
      const auto& om = g_.omega_nodes();
      const std::size_t m = om.size();
      if (k > 0) gk += pr_.mu * psi_reg(p, (vi - v[om[k - 1]]) / h, delta_);
      if (k + 1 < m) gk -= pr_.mu * psi_reg(p, (v[om[k + 1]] - vi) / h, delta_);
      if (pr_.variant == Variant::LocalDirichlet) {
        if (k == 0) gk += pr_.mu * psi_reg(p, (vi - pr_.boundary[0]) / hb, delta_);
        if (k + 1 == m) gk -= pr_.mu * psi_reg(p, (pr_.boundary[1] - vi) / hb, delta_);
      } else {
        if (k == 0) gk -= pr_.boundary[0];
        if (k + 1 == m) gk -= pr_.boundary[1];
      }
    } else {
      const bool in = g_.in_omega(i);
      const bool regional = pr_.variant == Variant::RegionalNeumann;
      double s = 0.0;
      detail::for_each_partner(g_, pr_.model->weights(), i, [&](std::size_t j, double wij) {
        const bool jin = g_.in_omega(j);
        if (!in && !jin) return;
        if (regional && !jin) return;
        s += psi_diff(p, vi, v[j], delta_) * wij;
      });
      gk = 2.0 * pr_.mu * w_ * w_ * s;
    }
    if (g_.in_omega(i)) {
      gk -= pr_.f[i] * w_;
      if (pr_.lambda > 0.0) gk += pr_.lambda * psi_reg(p, vi, delta_) * w_;
    } else if (pr_.variant == Variant::NonlocalNeumann) {
      gk -= pr_.g[i] * w_;
    }
    return gk;
  }

 private:
  double nonlocal_value_grad(const GridFunction& v, std::vector<double>* grad) const {
    const NonlocalModel& m = *pr_.model;
    const LatticeWeights& W = m.weights();
    const double p = pr_.p;
    const bool regional = pr_.variant == Variant::RegionalNeumann;
    std::vector<double> erow(g_.size(), 0.0), grow(g_.size(), 0.0);
    parallel_for(g_.size(), [&](std::size_t i) {
      const bool in = g_.in_omega(i);
      if (!in && index_[i] < 0) return;
      if (!in && regional) return;
      const double vi = v[i];
      double e = 0.0, s = 0.0;
      detail::for_each_partner(g_, W, i, [&](std::size_t j, double wij) {
        const bool jin = g_.in_omega(j);
        if (!in && !jin) return;
        if (regional && !jin) return;
        const double t = vi - v[j];
        s += psi_diff(p, vi, v[j], delta_) * wij;
        // Each Omega-collar pair is met once from its Omega end; count it twice there.
        if (in) e += (jin ? 1.0 : 2.0) * phi_reg(p, t, delta_) * wij;
      });
      erow[i] = e;
      grow[i] = s;
    });
    const double c = pr_.mu * w_ * w_;
    double J = c * kahan_sum(erow.data(), erow.size());
    if (grad) {
      for (std::size_t k = 0; k < n(); ++k) (*grad)[k] = 2.0 * c * grow[unknowns_[k]];
    }
    return J + linear_terms(v, grad);
  }

  double local_value_grad(const GridFunction& v, std::vector<double>* grad) const {
    const double p = pr_.p;
    const double h = g_.spacing(0);
    const auto& om = g_.omega_nodes();
    const std::size_t m = om.size();
    std::vector<double> e(m + 1, 0.0);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double D = (v[om[k + 1]] - v[om[k]]) / h;
      e[k] = h * phi_reg(p, D, delta_);
      if (grad) {
        const double q = pr_.mu * psi_reg(p, D, delta_);
        (*grad)[k] -= q;
        (*grad)[k + 1] += q;
      }
    }
    if (pr_.variant == Variant::LocalDirichlet) {
      const double hb = 0.5 * h;
      const double D0 = (v[om[0]] - pr_.boundary[0]) / hb;
      const double D1 = (pr_.boundary[1] - v[om[m - 1]]) / hb;
      e[m - 1] += hb * phi_reg(p, D0, delta_);
      e[m] = hb * phi_reg(p, D1, delta_);
      if (grad) {
        (*grad)[0] += pr_.mu * psi_reg(p, D0, delta_);
        (*grad)[m - 1] -= pr_.mu * psi_reg(p, D1, delta_);
      }
    }
    double J = pr_.mu * kahan_sum(e.data(), e.size());
    if (pr_.variant == Variant::LocalNeumann) {
      J -= pr_.boundary[0] * v[om[0]] + pr_.boundary[1] * v[om[m - 1]];
      if (grad) {
        (*grad)[0] -= pr_.boundary[0];
        (*grad)[m - 1] -= pr_.boundary[1];
      }
    }
    return J + linear_terms(v, grad);
  }

  // -<f, v - g>_Omega (Dirichlet) or -<f, v>_Omega - <g, v>_collar (Neumann), plus the L^p term.
  double linear_terms(const GridFunction& v, std::vector<double>* grad) const {
    const double p = pr_.p;
    std::vector<double> t;
    t.reserve(n());
    for (std::size_t k = 0; k < n(); ++k) {
      const std::size_t i = unknowns_[k];
      double val = 0.0, dg = 0.0;
      if (g_.in_omega(i)) {
        const double ref = pr_.is_dirichlet() ? pr_.g[i] : 0.0;
        val -= pr_.f[i] * (v[i] - ref) * w_;
        dg -= pr_.f[i] * w_;
        if (pr_.lambda > 0.0) {
          val += pr_.lambda * phi_reg(p, v[i], delta_) * w_;
          dg += pr_.lambda * psi_reg(p, v[i], delta_) * w_;
        }
      } else if (pr_.variant == Variant::NonlocalNeumann) {
        val -= pr_.g[i] * v[i] * w_;
        dg -= pr_.g[i] * w_;
      }
      t.push_back(val);
      if (grad) (*grad)[k] += dg;
    }
    return kahan_sum(t.data(), t.size());
  }

  const Problem& pr_;
  const Grid& g_;
  double delta_;
  std::vector<std::size_t> unknowns_;
  std::vector<long> index_;
  bool zero_mean_ = false;
  double w_ = 1.0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double data_scale(const Problem& pr) {
  double s = std::max(std::abs(pr.boundary[0]), std::abs(pr.boundary[1]));
  for (std::size_t i = 0; i < pr.grid->size(); ++i) s = std::max({s, std::abs(pr.f[i]), std::abs(pr.g[i])});
  return s > 0.0 ? s : 1.0;
}

std::vector<double> initial_guess(const Problem& pr, const Objective& obj) {
  std::vector<double> x(obj.n(), 0.0);
  if (pr.variant == Variant::NonlocalDirichlet) {
    const Grid& g = *pr.grid;
    double s = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i : g.collar_nodes()) {
      if (g.boundary_adjacent(i)) {
        s += pr.g[i];
        ++cnt;
      }
    }
    const double c = cnt ? s / static_cast<double>(cnt) : 0.0;
    std::fill(x.begin(), x.end(), c);
  } else if (pr.variant == Variant::LocalDirichlet) {
    const Grid& g = *pr.grid;
    const double a = g.domain().lo[0], len = g.domain().extent(0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double t = (g.coord(obj.unknowns()[k], 0) - a) / len;
      x[k] = (1.0 - t) * pr.boundary[0] + t * pr.boundary[1];
    }
  }
  return x;
}

struct StageResult {
  std::vector<double> x;
  double j = 0.0;
  double grad_norm = 0.0;
  double grad_scale = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

class Preconditioner {
 public:
  void build(const SpMat& P) {
    solver_.compute(P);
    require(solver_.info() == Eigen::Success, ErrorKind::Solver, "preconditioner factorisation failed");
  }
  std::vector<double> apply(const std::vector<double>& r) const {
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<long>(r.size()));
    Eigen::VectorXd z = solver_.solve(rv);
    return std::vector<double>(z.data(), z.data() + z.size());
  }

 private:
  Eigen::SimplicialLDLT<SpMat> solver_;
};

// fixed_scale > 0 pins the residual scale (used when resuming a stage).
StageResult minimise(const Problem& pr, const Objective& obj, std::vector<double> x, const SolveConfig& cfg,
                     double tol, double scale_ref, int& budget, double fixed_scale = 0.0) {
  StageResult out;
  obj.project(x);
  std::vector<double> g;
  double J = obj.value_grad(x, &g);
  double rn = obj.residual_norm(g);
  out.grad_scale = fixed_scale > 0.0 ? fixed_scale : std::max(rn, scale_ref);
  // Stop once the residual has not halved for a while: either it sits at the
  // rounding floor or, in the singular case, on pairs that need psi(t) = 0,
  // which the coordinate polish handles.
  double best = rn;
  int idle = 0;
  out.history.push_back(J);
  const bool fixed_metric = pr.p == 2.0;
  Preconditioner P;
  const double dscale = data_scale(pr);
  P.build(obj.metric(x, cfg.precond_reach, dscale));
  std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
  int since_refresh = 0;
  const std::size_t n = obj.n();
  while (true) {
    if (rn <= tol * out.grad_scale || out.grad_scale == 0.0) break;
    if (budget <= 0) {
      std::ostringstream os;
      os.precision(6);
      os << "solver reached max_iter with residual " << rn << " (target " << tol * out.grad_scale << ")";
      raise(ErrorKind::Solver, os.str());
    }
    if (!fixed_metric && since_refresh >= cfg.refresh) {
      P.build(obj.metric(x, cfg.precond_reach, dscale));
      mem.clear();
      since_refresh = 0;
    }
    // Two-loop recursion with the preconditioner as initial inverse Hessian.
    std::vector<double> q = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      const auto& [s, y] = mem[k];
      alpha[k] = dot(s, q) / dot(y, s);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y[i];
    }
    std::vector<double> r = P.apply(q);
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const auto& [s, y] = mem[k];
      const double beta = dot(y, r) / dot(y, s);
      for (std::size_t i = 0; i < n; ++i) r[i] += (alpha[k] - beta) * s[i];
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
    obj.project(d);
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = P.apply(g);
      for (double& v : d) v = -v;
      obj.project(d);
      slope = dot(g, d);
      if (!(slope < 0.0)) break;
    }
    double step = 1.0;
    std::vector<double> xn(n), gn;
    double Jn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
      obj.project(xn);
      Jn = obj.value_grad(xn, &gn);
      if (std::isfinite(Jn) && Jn <= J + cfg.armijo * step * slope) {
        accepted = true;
        break;
      }
      // Near the optimum J is flat to rounding and Armijo cannot see progress.
      // J is convex along d, so a step whose directional derivative is still
      // <= 0 descends; otherwise try the secant root of that derivative.
      if (std::isfinite(Jn) && std::abs(Jn - J) <= 64.0 * 2.2e-16 * std::max(std::abs(J), 1e-300)) {
        const double sn = dot(gn, d);
        if (sn <= 0.0) {
          accepted = true;
          break;
        }
        const double t = step * slope / (slope - sn);
        for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * d[i];
        obj.project(xn);
        Jn = obj.value_grad(xn, &gn);
        if (std::isfinite(Jn) && std::abs(dot(gn, d)) <= 0.5 * std::abs(slope)) {
          accepted = true;
          break;
        }
      }
      step *= cfg.backtrack;
    }
    --budget;
    ++out.iterations;
    ++since_refresh;
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      break;
    }
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14 * std::sqrt(dot(s, s) * dot(y, y))) {
      mem.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(mem.size()) > cfg.memory) mem.pop_front();
    }
    const double jprev = J;
    x.swap(xn);
    g.swap(gn);
    J = Jn;
    rn = obj.residual_norm(g);
    out.history.push_back(J);
    if (rn < 0.5 * best) {
      best = rn;
      idle = 0;
    } else if (++idle > 5 * cfg.refresh) {
      break;
    }
    if (std::abs(jprev - J) <= cfg.j_tol * std::max(std::abs(J), 1e-300) && rn <= obj.gradient_noise(x)) break;
  }
  out.x = std::move(x);
  out.j = J;
  out.grad_norm = rn;
  return out;
}

// Nonlinear Gauss-Seidel for the singular stage. The coordinates are groups
// of unknowns whose values chain together within a relative 1e-7; a group is
// moved to one common value, which zeroes psi on its internal pairs. Such
// groups come from exact ties in the true minimiser (symmetry, one-partner
// collar nodes), where quasi-Newton steps only reach residuals ~ |t|^{p-1}.
// The group equation is the derivative of J along the group indicator and is
// increasing, so bracketing plus bisection finds the nearest floating root.
// A sweep that raises the residual is undone and grouping is switched off.
void polish(const Objective& obj, StageResult& st, double tol, int& budget) {
  const std::size_t n = obj.n();
  GridFunction v = obj.scatter(st.x);
  std::vector<double> g;
  double best = st.grad_norm;
  int idle = 0;
  bool grouping = true;
  std::vector<std::size_t> order(n);
  while (st.grad_norm > tol * st.grad_scale && idle < 4 && budget > 0) {
    double umax = 0.0;
    for (double x : v.values()) umax = std::max(umax, std::abs(x));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<std::size_t>> groups;
    if (grouping) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return st.x[a] < st.x[b]; });
      for (std::size_t q = 0; q < n; ++q) {
        if (q == 0 || st.x[order[q]] - st.x[order[q - 1]] > 1e-7 * umax) groups.emplace_back();
        groups.back().push_back(order[q]);
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) groups.push_back({k});
    }
    const GridFunction before = v;
    for (const auto& grp : groups) {
      auto set = [&](double c) {
        for (std::size_t k : grp) v[obj.unknowns()[k]] = c;
      };
      auto R = [&](double c) {
        set(c);
        double r = 0.0;
        for (std::size_t k : grp) r += obj.node_grad(v, k, c);
        return r;
      };
      double x0 = 0.0;
      for (std::size_t k : grp) x0 += v[obj.unknowns()[k]];
      x0 /= static_cast<double>(grp.size());
      const double r0 = R(x0);
      if (r0 == 0.0) continue;
      const double dir = r0 > 0.0 ? -1.0 : 1.0;
      double step = 4.0 * 2.2e-16 * std::max({std::abs(x0), 1e-3 * umax, 1e-300});
      double a = x0, b = x0 + dir * step;
      int grow = 0;
      while (R(b) * r0 > 0.0 && grow < 1200) {
        a = b;
        step *= 2.0;
        b = x0 + dir * step;
        ++grow;
      }
      if (grow == 1200) {
        set(x0);
        continue;
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double rm = R(mid);
        if (rm == 0.0) {
          a = b = mid;
          break;
        }
        (rm * r0 > 0.0 ? a : b) = mid;
      }
      const double ra = std::abs(R(a)), rb = std::abs(R(b));
      set(ra <= rb ? a : b);
    }
    std::vector<double> x = obj.gather(v);
    obj.project(x);
    const double J = obj.value_grad(x, &g);
    const double rn = obj.residual_norm(g);
    --budget;
    ++st.iterations;
    if (rn > st.grad_norm && grouping) {
      v = before;
      grouping = false;
      continue;
    }
    st.x = std::move(x);
    v = obj.scatter(st.x);
    st.j = J;
    st.grad_norm = rn;
    st.history.push_back(J);
    if (rn < 0.5 * best) {
      best = rn;
      idle = 0;
    } else {
      ++idle;
    }
  }
}

}  // namespace

Solution solve(const Problem& prob, const SolveConfig& cfg) {
  prob.validate();
  require(cfg.grad_tol > 0.0 && cfg.j_tol > 0.0 && cfg.max_iter > 0, ErrorKind::Validation,
          "solver tolerances and iteration budget must be positive");
  require(!cfg.schedule.empty() && cfg.schedule.back() == 0.0, ErrorKind::Validation,
          "regularisation schedule must end at 0");
  for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
    require(cfg.schedule[i] < cfg.schedule[i - 1], ErrorKind::Validation, "regularisation schedule must decrease");

  std::vector<double> deltas{0.0};
  if (prob.p < 2.0) deltas = cfg.schedule;
  const double scale = data_scale(prob);

  Solution sol;
  int budget = cfg.max_iter;
  const Objective exact(prob, 0.0);
  std::vector<double> x = initial_guess(prob, exact);
  // Data residual: a reference scale that does not vanish when the guess is exact.
  const double scale_ref = exact.data_residual();
  double prev_j = NAN;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k] * scale;
    const Objective obj(prob, delta);
    const bool last = k + 1 == deltas.size();
    const double tol = last ? cfg.grad_tol : std::max(cfg.grad_tol, 1e-6);
    StageResult st = minimise(prob, obj, x, cfg, tol, scale_ref, budget);
    for (int round = 0; round < 4 && obj.singular() && st.grad_norm > tol * st.grad_scale; ++round) {
      polish(obj, st, tol, budget);
      if (st.grad_norm <= tol * st.grad_scale) break;
      StageResult more = minimise(prob, obj, st.x, cfg, tol, scale_ref, budget, st.grad_scale);
      st.x = std::move(more.x);
      st.j = more.j;
      st.grad_norm = more.grad_norm;
      st.iterations += more.iterations;
      st.history.insert(st.history.end(), more.history.begin() + 1, more.history.end());
    }
    x = std::move(st.x);
    sol.stages.push_back({delta, st.iterations, st.j, st.grad_norm});
    sol.iterations += st.iterations;
    if (last) {
      sol.j = st.j;
      sol.grad_norm = st.grad_norm;
      sol.grad_scale = st.grad_scale;
      sol.j_history = std::move(st.history);
      if (!std::isnan(prev_j)) sol.regularization_residual = std::abs(st.j - prev_j);
      sol.noise_floor = obj.gradient_noise(x);
      if (st.grad_norm > std::max(tol * st.grad_scale, sol.noise_floor)) {
        std::ostringstream os;
        os.precision(6);
        os << "line search stalled with residual " << st.grad_norm << " (target " << tol * st.grad_scale
           << ", rounding floor " << sol.noise_floor << ")";
        raise(ErrorKind::Solver, os.str());
      }
    }
    prev_j = st.j;
  }
  sol.u = exact.scatter(x);
  return sol;
}

double functional_value(const Problem& prob, const GridFunction& v) {
  prob.validate();
  require(&v.grid() == prob.grid.get(), ErrorKind::Validation, "function lives on another grid");
  const Objective obj(prob, 0.0);
  if (prob.is_dirichlet() && !prob.is_local()) {
    for (std::size_t i : prob.grid->collar_nodes()) {
      require(std::abs(v[i] - prob.g[i]) <= 1e-12 * (1.0 + std::abs(prob.g[i])), ErrorKind::Validation,
              "function violates the Dirichlet complement condition");
    }
  }
  return obj.value_grad(obj.gather(v), nullptr);
}

GridFunction residual(const Problem& prob, const GridFunction& u) {
  const Objective obj(prob, 0.0);
  std::vector<double> g;
  obj.value_grad(obj.gather(u), &g);
  GridFunction r(prob.grid);
  for (std::size_t k = 0; k < obj.n(); ++k) r[obj.unknowns()[k]] = g[k] / obj.weight();
  return r;
}

double euler_lagrange_defect(const Problem& prob, const GridFunction& u, int n, std::uint64_t seed) {
  const Objective obj(prob, 0.0);
  std::vector<double> g;
  obj.value_grad(obj.gather(u), &g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    std::vector<double> w(obj.n());
    for (double& v : w) v = nd(rng);
    obj.project(w);
    double nw = 0.0;
    for (double v : w) nw += v * v * obj.weight();
    worst = std::max(worst, std::abs(dot(g, w)) / std::sqrt(nw));
  }
  return worst;
}

}  // namespace plevy
