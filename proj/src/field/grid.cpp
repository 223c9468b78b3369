#include "nsreg/field.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace nsreg {

GridSpec make_grid(int n, double box_length) {
  if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(n));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("box length must be positive and finite");
  return GridSpec{n, box_length};
}

std::complex<double> SpectralField::mode(int kx, int ky, int kz) const {
  const int n = grid.n;
  auto slot = [n](int k) { return k >= 0 ? k : k + n; };
  if (kx < 0) return std::conj(mode(-kx, -ky, -kz));
  return modes[grid.spectral_index(kx, slot(ky), slot(kz))];
}

}  // namespace nsreg
