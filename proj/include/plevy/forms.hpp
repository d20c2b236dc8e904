#pragma once

#include <memory>

#include "plevy/grid.hpp"
#include "plevy/kernels.hpp"
#include "plevy/lattice.hpp"

namespace plevy {

/// Full: ordered pairs not both outside Omega. Regional: both in Omega.
/// Cross: x in Omega, y outside. Plus: x in Omega, y anywhere.
/// LocalGradient: int_Omega |grad u|^{p-2} grad u . grad v.
enum class FormKind { Full, Regional, Cross, Plus, LocalGradient };

const char* to_string(FormKind k);

/// A kernel placed on a grid together with its pair-weight table.
class NonlocalModel {
 public:
  NonlocalModel(Kernel k, GridPtr g, KernelQuadrature mode = KernelQuadrature::CellAveraged);

  const Kernel& kernel() const { return kernel_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const LatticeWeights& weights() const { return *weights_; }
  double p() const { return kernel_.pd().p(); }

 private:
  Kernel kernel_;
  GridPtr grid_;
  std::shared_ptr<const LatticeWeights> weights_;
};

/// Discrete double sum sum_{(x,y)} psi(u(x)-u(y)) (v(x)-v(y)) W(x-y) w_x w_y over
/// the pairs of `kind`, accumulated row by row in node order.
double energy(FormKind kind, const NonlocalModel& m, const GridFunction& u, const GridFunction& v);

/// Local gradient form from forward differences on Omega nodes, backward at the
/// last Omega node of each line.
double local_energy(const GridFunction& u, const GridFunction& v, double p);

/// Dispatches on kind; nonlocal kinds need a model, LocalGradient needs p only.
double energy(FormKind kind, const NonlocalModel* m, const GridFunction& u, const GridFunction& v, double p);

enum class NormScope { FullSpacePair, Regional };

/// (||u||_{L^p(Omega)}^p + E(u,u))^{1/p} with E the Full or Regional form.
double nonlocal_norm(const NonlocalModel& m, const GridFunction& u, NormScope scope);

/// (||u||_{L^p(Omega)}^p + K_{d,p} ||grad u||_p^p)^{1/p} with the forward-difference gradient.
double local_norm_star(const GridFunction& u, double p);

/// Pair rows: which nodes act as x and which partners y are admitted.
namespace detail {
bool row_active(FormKind kind, const Grid& g, std::size_t i);
bool partner_active(FormKind kind, const Grid& g, std::size_t i, std::size_t j);
}  // namespace detail

}  // namespace plevy
