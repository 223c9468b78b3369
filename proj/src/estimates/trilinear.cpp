#include "nsreg/estimates.hpp"
#include "nsreg/norms.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace nsreg {

int trilinear_grid_size(const SpectralVector& u) {
  double peak = 0.0;
  for (const auto& m : u.modes) peak = std::max(peak, m.abs().maxCoeff());
  // Transform round-off leaves ~1e-17 in every slot; ignore it.
  const int kmax = max_active_wavenumber(u, 1e-13 * peak);
  return 3 * kmax < u.grid.n ? u.grid.n : 3 * u.grid.n / 2;
}

double trilinear_term(const SpectralVector& u) {
  const GridSpec& g = u.grid;
  const int m = trilinear_grid_size(u);
  const auto k = wavenumbers(g);
  std::array<Eigen::ArrayXd, 3> sym;
  for (auto& s : sym) s.resize(g.spectral_size());
  {
    Eigen::Index idx = 0;
    for (int jz = 0; jz < g.n; ++jz)
      for (int jy = 0; jy < g.n; ++jy)
        for (int kx = 0; kx < g.half(); ++kx, ++idx) {
          sym[0][idx] = k.odd[kx];
          sym[1][idx] = k.odd[jy];
          sym[2][idx] = k.odd[jz];
        }
  }
  // grad[a * 3 + b] = d u_b / d x_a on the product grid
  std::array<Eigen::ArrayXd, 9> grad;
  SpectralField tmp(g);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      tmp.modes = std::complex<double>(0.0, 1.0) * sym[a] * u.modes[b];
      grad[a * 3 + b] = to_physical_padded(tmp, m).values;
    }

  const Eigen::Index points = grad[0].size();
  double sum = 0.0;
  Eigen::Matrix3d A;
  for (Eigen::Index p = 0; p < points; ++p) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) A(a, b) = grad[a * 3 + b][p];
    // sum_{ijk} A_ik A_kj A_ij
    sum += (A * A).cwiseProduct(A).sum();
  }
  const double h = g.box_length / m;
  return sum * h * h * h;
}

double trilinear_term(const VectorField& u) { return trilinear_term(to_spectral(u)); }

double enstrophy_identity_residual(const std::array<EnstrophySample, 3>& w, double nu) {
  const double dt1 = w[1].t - w[0].t;
  const double dt2 = w[2].t - w[1].t;
  if (!(dt1 > 0.0) || !(dt2 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(dt1, dt2))
    throw std::invalid_argument("enstrophy identity: samples must be uniformly spaced in time");
  const double dHdt = (w[2].enstrophy - w[0].enstrophy) / (w[2].t - w[0].t);
  const double viscous = 2.0 * nu * w[1].palinstrophy;
  const double stretching = 2.0 * w[1].trilinear;
  const double scale = std::max({std::abs(dHdt), std::abs(viscous), std::abs(stretching)});
  return scale > 0.0 ? std::abs(dHdt + viscous + stretching) / scale : 0.0;
}

GnSides gn_check(const ScalarField& w, const CellRange& cube) {
  for (int a = 0; a < 3; ++a)
    if (cube.extent[a] < 2 || cube.extent[a] > w.grid.n)
      throw std::invalid_argument("gn_check: cube extents must lie in [2, n] cells");
  const VectorField grad = gradient(w);
  const TensorField hess = second_derivatives(w);
  const double dv = w.grid.cell_volume();

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for_each_node(w.grid, cube, [&](Eigen::Index p) { mean += Eigen::Vector3d(grad[0][p], grad[1][p], grad[2][p]); });
  mean /= double(cube.node_count());

  GnSides out;
  double l3 = 0.0, h2 = 0.0;
  for_each_node(w.grid, cube, [&](Eigen::Index p) {
    const Eigen::Vector3d d = Eigen::Vector3d(grad[0][p], grad[1][p], grad[2][p]) - mean;
    out.lhs += std::pow(d.norm(), 3);
    l3 += std::pow(std::abs(w.values[p]), 3);
    for (const auto& c : hess.components) h2 += c[p] * c[p];
  });
  out.lhs *= dv;
  out.rhs_over_c = std::cbrt(l3 * dv) * (h2 * dv);
  return out;
}

std::vector<MainEstimateSides> main_estimate_sides(const VectorField& u, double s, std::span<const int> eps_cells) {
  if (!(s > 3.0)) throw std::invalid_argument("main estimate: s must exceed 3");
  const SpectralVector uh = to_spectral(u);
  const double T = trilinear_term(uh);
  const InnerProducts ip = inner_products(uh);
  const Eigen::ArrayXd weights = ls_weights(u, s);
  std::vector<MainEstimateSides> out;
  out.reserve(eps_cells.size());
  for (const int cells : eps_cells) {
    if (cells < 1 || cells > u.grid.n) throw std::invalid_argument("main estimate: epsilon outside [1, n] cells");
    const double eps = cells * u.grid.spacing();
    const double loc = localized_norm(u.grid, weights, cells, s).value;
    MainEstimateSides m;
    m.lhs = std::abs(T);
    m.rhs_over_c0 = loc * (std::pow(eps, -3.0 / s - 1.0) * ip.enstrophy + std::pow(eps, 1.0 - 3.0 / s) * ip.palinstrophy);
    m.epsilon = eps;
    out.push_back(m);
  }
  return out;
}

MainEstimateSides main_estimate_sides(const VectorField& u, double s, double epsilon) {
  const int cells = snap_window_cells(epsilon, u.grid);
  return main_estimate_sides(u, s, std::span<const int>(&cells, 1)).front();
}

}  // namespace nsreg
