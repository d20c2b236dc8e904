#include "plevy/lattice.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "plevy/error.hpp"

namespace plevy {

namespace {

using GL5 = boost::math::quadrature::gauss<double, 5>;
using GL10 = boost::math::quadrature::gauss<double, 10>;

double moment(double r, double p) { return r >= 1.0 ? 1.0 : std::pow(r, p); }

// int_u^v m(r) nu(r) dr on a cell away from the origin, split at kernel breaks.
double cell_integral_1d(const Kernel& k, double u, double v) {
  const double p = k.pd().p();
  std::vector<double> knots{u, v};
  for (double b : k.breaks())
    if (b > u && b < v) knots.push_back(b);
  if (1.0 > u && 1.0 < v) knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (a >= k.support()) break;
    s += GL10::integrate([&](double r) { return moment(r, p) * k(r); }, a, std::min(b, k.support()));
  }
  return s;
}

bool crosses_break(const Kernel& k, double rmin, double rmax) {
  if (rmin < 1.0 && rmax > 1.0) return true;
  for (double b : k.breaks())
    if (rmin < b && rmax > b) return true;
  return false;
}

// int over [x0,x1]x[y0,y1] of m(|z|) nu(|z|), tensor Gauss with s x s sub-cells.
double cell_integral_2d(const Kernel& k, double x0, double x1, double y0, double y1, int s) {
  const double p = k.pd().p();
  const double dx = (x1 - x0) / s, dy = (y1 - y0) / s;
  double total = 0.0;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double a = x0 + i * dx, c = y0 + j * dy;
      total += GL5::integrate(
          [&](double x) {
            return GL5::integrate(
                [&](double y) {
                  const double r = std::hypot(x, y);
                  return moment(r, p) * k(r);
                },
                c, c + dy);
          },
          a, a + dx);
    }
  }
  return total;
}

}  // namespace

LatticeWeights::LatticeWeights(const Kernel& k, const Grid& g, KernelQuadrature mode) : d_(g.dim()), mode_(mode) {
  require(k.pd().d() == g.dim(), ErrorKind::Precondition, "kernel and grid dimensions differ");
  const double p = k.pd().p();
  const int d = d_;
  for (int a = 0; a < d; ++a) {
    int r = g.nodes_along(a) - 1;
    if (std::isfinite(k.support())) r = std::min(r, static_cast<int>(std::ceil(k.support() / g.spacing(a) + 0.5)));
    reach_[static_cast<std::size_t>(a)] = std::max(r, 1);
  }
  neglected_tail_ = tail_mass(k, g.collar_width());
  const std::size_t ny = static_cast<std::size_t>(reach_[1] + 1);
  w_.assign(static_cast<std::size_t>(reach_[0] + 1) * ny, 0.0);
  auto slot = [&](int i, int j) -> double& { return w_[static_cast<std::size_t>(i) * ny + static_cast<std::size_t>(j)]; };
  const double h0 = g.spacing(0), h1 = d == 2 ? g.spacing(1) : 1.0;

  if (d == 1) {
    for (int i = 1; i <= reach_[0]; ++i) {
      const double r = i * h0;
      if (mode == KernelQuadrature::PointSampled) {
        slot(i, 0) = k(r);
      } else {
        slot(i, 0) = cell_integral_1d(k, (i - 0.5) * h0, (i + 0.5) * h0) / (h0 * moment(r, p));
      }
    }
    if (mode == KernelQuadrature::CellAveraged) {
      // p-moment of the cell at the origin, shared by the two neighbours.
      const double half = 0.5 * h0;
      const double self = radial_integral([&](double r) { return std::pow(r, p) * k(r); }, 0.0,
                                          std::min(half, k.support()), k.breaks());
      slot(1, 0) += self / (std::pow(h0, p) * h0);
    }
    return;
  }

  for (int i = 0; i <= reach_[0]; ++i) {
    for (int j = 0; j <= reach_[1]; ++j) {
      if (i == 0 && j == 0) continue;
      const double r = std::hypot(i * h0, j * h1);
      if (mode == KernelQuadrature::PointSampled) {
        slot(i, j) = k(r);
        continue;
      }
      const double x0 = (i - 0.5) * h0, x1 = (i + 0.5) * h0, y0 = (j - 0.5) * h1, y1 = (j + 0.5) * h1;
      const double rmin = std::hypot(std::max(x0, 0.0), std::max(y0, 0.0));
      if (rmin >= k.support()) continue;
      const double rmax = std::hypot(x1, y1);
      const int s = (std::max(i, j) <= 2 || crosses_break(k, rmin, rmax)) ? 8 : 2;
      slot(i, j) = cell_integral_2d(k, x0, x1, y0, y1, s) / (h0 * h1 * moment(r, p));
    }
  }
  if (mode == KernelQuadrature::CellAveraged) {
    // Directional p-moments of the origin cell in polar coordinates:
    // I_x = 4 int_0^{pi/2} cos^p(t) G(R(t)) dt with G(R) = int_0^R r^{p+1} nu dr.
    auto G = [&](double R) {
      return radial_integral([&](double r) { return std::pow(r, p + 1.0) * k(r); }, 0.0, std::min(R, k.support()),
                             k.breaks());
    };
    auto R = [&](double t) { return std::min(0.5 * h0 / std::cos(t), 0.5 * h1 / std::sin(t)); };
    const double tc = std::atan2(h1, h0);
    auto dir = [&](bool xaxis) {
      auto f = [&](double t) { return std::pow(xaxis ? std::cos(t) : std::sin(t), p) * G(R(t)); };
      return 4.0 * (GL10::integrate(f, 0.0, tc) + GL10::integrate(f, tc, 0.5 * M_PI));
    };
    const double cell = h0 * h1;
    slot(1, 0) += dir(true) / (2.0 * std::pow(h0, p) * cell);
    slot(0, 1) += dir(false) / (2.0 * std::pow(h1, p) * cell);
  }
}

}  // namespace plevy
