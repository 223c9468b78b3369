#include "nsreg/solver.hpp"

#include <cmath>
#include <random>

namespace nsreg {

VectorField init_taylor_green_2d(const GridSpec& grid) {
  VectorField u(grid);
  const double h = grid.spacing();
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) {
        const double x = i * h, y = j * h;
        const auto p = grid.index(i, j, k);
        u[0][p] = std::sin(x) * std::cos(y);
        u[1][p] = -std::cos(x) * std::sin(y);
      }
  return u;
}

VectorField init_taylor_green_3d(const GridSpec& grid) {
  VectorField u(grid);
  const double h = grid.spacing();
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) {
        const double x = i * h, y = j * h, z = k * h;
        const auto p = grid.index(i, j, k);
        u[0][p] = std::sin(x) * std::cos(y) * std::cos(z);
        u[1][p] = -std::cos(x) * std::sin(y) * std::cos(z);
      }
  return u;
}

namespace {

void check_peak(const GridSpec& grid, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("spectrum peak must be positive");
  if (!(3.0 * peak < grid.n))
    throw std::invalid_argument("spectrum peak " + std::to_string(peak) + " must be below n/3 = " +
                                std::to_string(grid.n / 3.0) + ": the 2/3 truncation would remove the spectrum");
}

// Amplitude |k| exp(-(|k|/peak)^2) on the truncated modes, zero elsewhere.
Eigen::ArrayXd shaping_filter(const GridSpec& grid, double peak) {
  Eigen::ArrayXd f(grid.spectral_size());
  const Eigen::ArrayXd mask = dealias_mask(grid);
  Eigen::Index idx = 0;
  for (int jz = 0; jz < grid.n; ++jz)
    for (int jy = 0; jy < grid.n; ++jy)
      for (int kx = 0; kx < grid.half(); ++kx, ++idx) {
        const double ky = grid.signed_mode(jy), kz = grid.signed_mode(jz);
        const double k = std::sqrt(double(kx) * kx + ky * ky + kz * kz);
        f[idx] = mask[idx] * k * std::exp(-(k / peak) * (k / peak));
      }
  return f;
}

Eigen::ArrayXd white_noise(const GridSpec& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

VectorField init_random_solenoidal(const GridSpec& grid, double spectrum_peak, std::uint64_t seed) {
  check_peak(grid, spectrum_peak);
  std::mt19937_64 rng(seed);
  VectorField noise(grid);
  for (int a = 0; a < 3; ++a) noise[a] = white_noise(grid, rng);
  SpectralVector uh = to_spectral(noise);
  const Eigen::ArrayXd filter = shaping_filter(grid, spectrum_peak);
  for (auto& m : uh.modes) m *= filter;
  uh = leray_project(uh);
  const double energy = inner_products(uh).energy;
  if (!(energy > 0.0)) throw std::runtime_error("random field generator produced a zero field");
  for (auto& m : uh.modes) m /= std::sqrt(energy);
  return to_physical(uh);
}

ScalarField random_scalar_field(const GridSpec& grid, double spectrum_peak, std::uint64_t seed) {
  check_peak(grid, spectrum_peak);
  std::mt19937_64 rng(seed ^ 0x5ca1ab1e0ddba11ULL);
  SpectralField wh = to_spectral(ScalarField(grid, white_noise(grid, rng)));
  wh.modes *= shaping_filter(grid, spectrum_peak);
  const double norm2 = parseval_sum(wh);
  if (!(norm2 > 0.0)) throw std::runtime_error("random field generator produced a zero field");
  wh.modes /= std::sqrt(norm2);
  return to_physical(wh);
}

VectorField make_initial_field(const SimConfig& config) {
  switch (config.init) {
    case InitKind::taylor_green_2d:
      return init_taylor_green_2d(config.grid);
    case InitKind::taylor_green_3d:
      return init_taylor_green_3d(config.grid);
    case InitKind::random_solenoidal:
      return init_random_solenoidal(config.grid, config.spectrum_peak, config.rng_seed);
  }
  throw std::logic_error("unknown init kind");
}

}  // namespace nsreg
