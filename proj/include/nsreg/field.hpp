// Periodic-box grids, real/spectral field containers and the spectral operators
// built on them.
#ifndef NSREG_FIELD_HPP
#define NSREG_FIELD_HPP

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nsreg {

/// Uniform periodic grid on [0, box_length)^3 with n nodes per axis.
///
/// Samples are stored x-fastest: index(i, j, k) = i + n * (j + n * k).
/// Spectral data uses the real-to-complex half layout, where only
/// kx = 0..n/2 is stored: index = kx + (n/2 + 1) * (ky + n * kz), with ky and
/// kz in FFT order (0..n/2, then negative wavenumbers).
struct GridSpec {
  int n = 32;
  double box_length = 2.0 * std::numbers::pi;

  double spacing() const { return box_length / n; }
  double cell_volume() const {
    const double h = spacing();
    return h * h * h;
  }
  double volume() const { return box_length * box_length * box_length; }
  double wavenumber_unit() const { return 2.0 * std::numbers::pi / box_length; }

  Eigen::Index size() const { return Eigen::Index(n) * n * n; }
  int half() const { return n / 2 + 1; }
  Eigen::Index spectral_size() const { return Eigen::Index(half()) * n * n; }

  Eigen::Index index(int i, int j, int k) const { return i + Eigen::Index(n) * (j + Eigen::Index(n) * k); }
  Eigen::Index spectral_index(int kx, int jy, int jz) const {
    return kx + Eigen::Index(half()) * (jy + Eigen::Index(n) * jz);
  }

  /// Signed integer wavenumber for FFT-ordered slot j (0 <= j < n).
  int signed_mode(int j) const { return j <= n / 2 ? j : j - n; }

  bool operator==(const GridSpec&) const = default;
};

/// Validating constructor: n must be a power of two, at least 8.
GridSpec make_grid(int n, double box_length = 2.0 * std::numbers::pi);

struct ScalarField {
  GridSpec grid;
  Eigen::ArrayXd values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  ScalarField(const GridSpec& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {}

  double& operator()(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

struct VectorField {
  GridSpec grid;
  std::array<Eigen::ArrayXd, 3> components;

  VectorField() = default;
  explicit VectorField(const GridSpec& g) : grid(g) {
    for (auto& c : components) c = Eigen::ArrayXd::Zero(g.size());
  }

  ScalarField component(int a) const { return {grid, components[a]}; }
  Eigen::ArrayXd& operator[](int a) { return components[a]; }
  const Eigen::ArrayXd& operator[](int a) const { return components[a]; }

  /// Pointwise |u|^2.
  Eigen::ArrayXd magnitude_squared() const {
    return components[0].square() + components[1].square() + components[2].square();
  }
  double max_speed() const { return std::sqrt(magnitude_squared().maxCoeff()); }
  bool all_finite() const {
    return components[0].allFinite() && components[1].allFinite() && components[2].allFinite();
  }
};

/// Rank-2 tensor field, component (a, b) stored at a * 3 + b.
struct TensorField {
  GridSpec grid;
  std::array<Eigen::ArrayXd, 9> components;

  Eigen::ArrayXd& operator()(int a, int b) { return components[a * 3 + b]; }
  const Eigen::ArrayXd& operator()(int a, int b) const { return components[a * 3 + b]; }
};

/// Normalized Fourier coefficients: f(x) = sum_k mode(k) exp(i k.x).
struct SpectralField {
  GridSpec grid;
  Eigen::ArrayXcd modes;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g) : grid(g), modes(Eigen::ArrayXcd::Zero(g.spectral_size())) {}

  /// Coefficient of integer wavevector (kx, ky, kz), each in (-n/2, n/2].
  /// Negative kx is served through Hermitian symmetry.
  std::complex<double> mode(int kx, int ky, int kz) const;
};

struct SpectralVector {
  GridSpec grid;
  std::array<Eigen::ArrayXcd, 3> modes;

  SpectralVector() = default;
  explicit SpectralVector(const GridSpec& g) : grid(g) {
    for (auto& m : modes) m = Eigen::ArrayXcd::Zero(g.spectral_size());
  }
};

// ---------------------------------------------------------------------------
// Transforms

SpectralField to_spectral(const ScalarField& f);
ScalarField to_physical(const SpectralField& f);
SpectralVector to_spectral(const VectorField& u);
VectorField to_physical(const SpectralVector& u);

/// Inverse transform onto a finer m^3 grid (m >= n) by zero padding.
/// Nyquist slots of the source grid are dropped.
ScalarField to_physical_padded(const SpectralField& f, int m);

// ---------------------------------------------------------------------------
// Wavenumbers

/// Per-axis physical wavenumbers for a grid.  `odd` zeroes the Nyquist
/// wavenumber, which is the convention for every odd-order derivative;
/// `full` keeps it and is used for k^2 in the Laplacian.
struct Wavenumbers {
  Eigen::ArrayXd full;  // length n, FFT order
  Eigen::ArrayXd odd;   // length n, Nyquist zeroed
};
Wavenumbers wavenumbers(const GridSpec& grid);

/// |k|^2 (full convention) for every stored spectral slot.
Eigen::ArrayXd laplacian_symbol(const GridSpec& grid);

/// 1 where every |k_i| < n/3, 0 elsewhere (2/3-rule truncation).
Eigen::ArrayXd dealias_mask(const GridSpec& grid);

/// Parseval multiplicity of each stored slot (1 for kx = 0 and kx = n/2, else 2).
Eigen::ArrayXd parseval_weights(const GridSpec& grid);

/// Largest |k_i| over slots carrying a coefficient with modulus above `tol`.
int max_active_wavenumber(const SpectralVector& u, double tol = 0.0);

// ---------------------------------------------------------------------------
// Differential operators

VectorField gradient(const ScalarField& f);
TensorField second_derivatives(const ScalarField& f);
/// Velocity gradient tensor, component (a, b) = d u_b / d x_a.
TensorField velocity_gradient(const VectorField& u);
ScalarField divergence(const VectorField& u);

SpectralVector leray_project(const SpectralVector& u);
VectorField leray_project(const VectorField& v);

struct InnerProducts {
  double energy = 0.0;        // ||u||^2
  double enstrophy = 0.0;     // ||grad u||^2
  double palinstrophy = 0.0;  // ||grad^2 u||^2
};
InnerProducts inner_products(const SpectralVector& u);
InnerProducts inner_products(const VectorField& u);

/// Box integral of f^2 by the spectral Parseval sum.
double parseval_sum(const SpectralField& f);

// ---------------------------------------------------------------------------
// Snapshot files: "NSRL1" header followed by little-endian float64 samples.

struct Snapshot {
  GridSpec grid;
  double time = 0.0;
  std::vector<Eigen::ArrayXd> components;
};

void write_snapshot(const std::filesystem::path& path, const GridSpec& grid, double time,
                    const std::vector<const Eigen::ArrayXd*>& components);
void write_snapshot(const std::filesystem::path& path, const VectorField& u, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace nsreg

#endif  // NSREG_FIELD_HPP
