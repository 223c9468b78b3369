#include "fft.hpp"
#include "nsreg/field.hpp"

#include <algorithm>
#include <cmath>

namespace nsreg {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

// Visits every stored slot with its FFT-ordered indices.
template <typename F>
void for_each_slot(const GridSpec& g, F&& f) {
  const int n = g.n, h = g.half();
  Eigen::Index idx = 0;
  for (int jz = 0; jz < n; ++jz)
    for (int jy = 0; jy < n; ++jy)
      for (int kx = 0; kx < h; ++kx, ++idx) f(idx, kx, jy, jz);
}

}  // namespace

// ---------------------------------------------------------------------------

SpectralField to_spectral(const ScalarField& f) {
  SpectralField out;
  out.grid = f.grid;
  out.modes.resize(f.grid.spectral_size());
  detail::forward_r2c(f.grid.n, f.values.data(), out.modes.data());
  out.modes /= double(f.grid.size());
  return out;
}

ScalarField to_physical(const SpectralField& f) {
  ScalarField out(f.grid, Eigen::ArrayXd(f.grid.size()));
  detail::inverse_c2r(f.grid.n, f.modes.data(), out.values.data());
  return out;
}

SpectralVector to_spectral(const VectorField& u) {
  SpectralVector out;
  out.grid = u.grid;
  for (int a = 0; a < 3; ++a) {
    out.modes[a].resize(u.grid.spectral_size());
    detail::forward_r2c(u.grid.n, u[a].data(), out.modes[a].data());
    out.modes[a] /= double(u.grid.size());
  }
  return out;
}

VectorField to_physical(const SpectralVector& u) {
  VectorField out;
  out.grid = u.grid;
  for (int a = 0; a < 3; ++a) {
    out[a].resize(u.grid.size());
    detail::inverse_c2r(u.grid.n, u.modes[a].data(), out[a].data());
  }
  return out;
}

ScalarField to_physical_padded(const SpectralField& f, int m) {
  const GridSpec& src = f.grid;
  if (m < src.n || m % 2 != 0) throw std::invalid_argument("padded size must be even and >= n");
  if (m == src.n) return to_physical(f);
  const GridSpec dst{m, src.box_length};
  SpectralField padded(dst);
  const int n = src.n, nyq = n / 2;
  for_each_slot(src, [&](Eigen::Index idx, int kx, int jy, int jz) {
    const int ky = src.signed_mode(jy), kz = src.signed_mode(jz);
    if (kx == nyq || std::abs(ky) == nyq || std::abs(kz) == nyq) return;
    const int dy = ky >= 0 ? ky : ky + m, dz = kz >= 0 ? kz : kz + m;
    padded.modes[dst.spectral_index(kx, dy, dz)] = f.modes[idx];
  });
  return to_physical(padded);
}

// ---------------------------------------------------------------------------

Wavenumbers wavenumbers(const GridSpec& grid) {
  const int n = grid.n;
  Wavenumbers w{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (int j = 0; j < n; ++j) {
    const int k = grid.signed_mode(j);
    w.full[j] = k * grid.wavenumber_unit();
    w.odd[j] = (j == n / 2) ? 0.0 : w.full[j];
  }
  return w;
}

Eigen::ArrayXd laplacian_symbol(const GridSpec& grid) {
  const auto k = wavenumbers(grid);
  Eigen::ArrayXd out(grid.spectral_size());
  for_each_slot(grid, [&](Eigen::Index idx, int kx, int jy, int jz) {
    out[idx] = k.full[kx] * k.full[kx] + k.full[jy] * k.full[jy] + k.full[jz] * k.full[jz];
  });
  return out;
}

Eigen::ArrayXd dealias_mask(const GridSpec& grid) {
  Eigen::ArrayXd out(grid.spectral_size());
  const int n = grid.n;
  for_each_slot(grid, [&](Eigen::Index idx, int kx, int jy, int jz) {
    const bool keep = 3 * kx < n && 3 * std::abs(grid.signed_mode(jy)) < n && 3 * std::abs(grid.signed_mode(jz)) < n;
    out[idx] = keep ? 1.0 : 0.0;
  });
  return out;
}

Eigen::ArrayXd parseval_weights(const GridSpec& grid) {
  Eigen::ArrayXd out(grid.spectral_size());
  for_each_slot(grid, [&](Eigen::Index idx, int kx, int, int) {
    out[idx] = (kx == 0 || kx == grid.n / 2) ? 1.0 : 2.0;
  });
  return out;
}

int max_active_wavenumber(const SpectralVector& u, double tol) {
  int kmax = 0;
  for_each_slot(u.grid, [&](Eigen::Index idx, int kx, int jy, int jz) {
    const double mag = std::max({std::abs(u.modes[0][idx]), std::abs(u.modes[1][idx]), std::abs(u.modes[2][idx])});
    if (mag > tol)
      kmax = std::max({kmax, kx, std::abs(u.grid.signed_mode(jy)), std::abs(u.grid.signed_mode(jz))});
  });
  return kmax;
}

double parseval_sum(const SpectralField& f) {
  return f.grid.volume() * (parseval_weights(f.grid) * f.modes.abs2()).sum();
}

// ---------------------------------------------------------------------------

namespace {

// Spectral symbols of d/dx_a and d^2/dx_a dx_b on the stored slots.
struct DerivativeSymbols {
  std::array<Eigen::ArrayXd, 3> first;  // odd convention; multiply by i
  explicit DerivativeSymbols(const GridSpec& g) {
    const auto k = wavenumbers(g);
    for (auto& f : first) f.resize(g.spectral_size());
    for_each_slot(g, [&](Eigen::Index idx, int kx, int jy, int jz) {
      first[0][idx] = k.odd[kx];
      first[1][idx] = k.odd[jy];
      first[2][idx] = k.odd[jz];
    });
    full = k;
    grid = g;
  }
  // Real symbol s with d^2/dx_a dx_b -> s * f_hat.
  Eigen::ArrayXd second(int a, int b) const {
    if (a != b) return -(first[a] * first[b]);
    Eigen::ArrayXd out(grid.spectral_size());
    for_each_slot(grid, [&](Eigen::Index idx, int kx, int jy, int jz) {
      const int j = a == 0 ? kx : (a == 1 ? jy : jz);
      out[idx] = -full.full[j] * full.full[j];
    });
    return out;
  }
  Wavenumbers full;
  GridSpec grid;
};

}  // namespace

VectorField gradient(const ScalarField& f) {
  const auto fh = to_spectral(f);
  const DerivativeSymbols d(f.grid);
  VectorField out(f.grid);
  SpectralField tmp(f.grid);
  for (int a = 0; a < 3; ++a) {
    tmp.modes = I * d.first[a] * fh.modes;
    out[a] = to_physical(tmp).values;
  }
  return out;
}

TensorField second_derivatives(const ScalarField& f) {
  const auto fh = to_spectral(f);
  const DerivativeSymbols d(f.grid);
  TensorField out{f.grid, {}};
  SpectralField tmp(f.grid);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      tmp.modes = d.second(a, b) * fh.modes;
      out(a, b) = to_physical(tmp).values;
      if (b != a) out(b, a) = out(a, b);
    }
  return out;
}

TensorField velocity_gradient(const VectorField& u) {
  const auto uh = to_spectral(u);
  const DerivativeSymbols d(u.grid);
  TensorField out{u.grid, {}};
  SpectralField tmp(u.grid);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      tmp.modes = I * d.first[a] * uh.modes[b];
      out(a, b) = to_physical(tmp).values;
    }
  return out;
}

ScalarField divergence(const VectorField& u) {
  const auto uh = to_spectral(u);
  const DerivativeSymbols d(u.grid);
  SpectralField div(u.grid);
  div.modes = I * (d.first[0] * uh.modes[0] + d.first[1] * uh.modes[1] + d.first[2] * uh.modes[2]);
  return to_physical(div);
}

SpectralVector leray_project(const SpectralVector& u) {
  const DerivativeSymbols d(u.grid);
  const Eigen::ArrayXd k2 = d.first[0].square() + d.first[1].square() + d.first[2].square();
  const Eigen::ArrayXd inv_k2 = (k2 > 0.0).select(k2.inverse(), 0.0);
  const Eigen::ArrayXcd kdotu = (d.first[0] * u.modes[0] + d.first[1] * u.modes[1] + d.first[2] * u.modes[2]) * inv_k2;
  SpectralVector out(u.grid);
  for (int a = 0; a < 3; ++a) out.modes[a] = u.modes[a] - d.first[a] * kdotu;
  return out;
}

VectorField leray_project(const VectorField& v) { return to_physical(leray_project(to_spectral(v))); }

InnerProducts inner_products(const SpectralVector& u) {
  const DerivativeSymbols d(u.grid);
  const Eigen::ArrayXd w = parseval_weights(u.grid) * u.grid.volume();
  const Eigen::ArrayXd amp = u.modes[0].abs2() + u.modes[1].abs2() + u.modes[2].abs2();
  const Eigen::ArrayXd grad_symbol = d.first[0].square() + d.first[1].square() + d.first[2].square();
  Eigen::ArrayXd hess_symbol = Eigen::ArrayXd::Zero(u.grid.spectral_size());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) hess_symbol += d.second(a, b).square();
  InnerProducts out;
  out.energy = (w * amp).sum();
  out.enstrophy = (w * grad_symbol * amp).sum();
  out.palinstrophy = (w * hess_symbol * amp).sum();
  return out;
}

InnerProducts inner_products(const VectorField& u) { return inner_products(to_spectral(u)); }

}  // namespace nsreg
