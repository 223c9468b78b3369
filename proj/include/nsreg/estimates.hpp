// Inequality machinery for the enstrophy balance: the vortex-stretching
// trilinear term, the localized Gagliardo-Nirenberg check, the edge-shifted
// cube decomposition and the main trilinear estimate, plus empirical
// estimation of their constants.
#ifndef NSREG_ESTIMATES_HPP
#define NSREG_ESTIMATES_HPP

#include "nsreg/field.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nsreg {

// ---------------------------------------------------------------------------
// Trilinear term

/// T(u) = sum_{i,j,k} integral (d_i u_k)(d_k u_j)(d_i u_j) dx.
///
/// Gradients are spectral; the product is formed on a grid fine enough that
/// the zero mode of the triple product is alias-free: the native grid when
/// every active |k_i| < n/3, otherwise the 3/2-padded grid.
double trilinear_term(const SpectralVector& u);
double trilinear_term(const VectorField& u);

/// Grid size used by trilinear_term for this field.
int trilinear_grid_size(const SpectralVector& u);

struct EnstrophySample {
  double t = 0.0;
  double enstrophy = 0.0;
  double palinstrophy = 0.0;
  double trilinear = 0.0;
};

/// |dH/dt + 2 nu P + 2 T| / max(|dH/dt|, 2 nu P, 2 |T|) at the middle sample,
/// with dH/dt by central difference.  Throws on non-uniform spacing.
double enstrophy_identity_residual(const std::array<EnstrophySample, 3>& window, double nu);

// ---------------------------------------------------------------------------
// Cubes

/// Periodic box of grid nodes [origin, origin + extent) per axis.
struct CellRange {
  std::array<int, 3> origin{0, 0, 0};
  std::array<int, 3> extent{1, 1, 1};

  Eigen::Index node_count() const { return Eigen::Index(extent[0]) * extent[1] * extent[2]; }
};

/// Calls f(linear_index) for every node in the range, z outermost.
template <typename F>
void for_each_node(const GridSpec& grid, const CellRange& r, F&& f) {
  const int n = grid.n;
  for (int dz = 0; dz < r.extent[2]; ++dz) {
    const int k = (r.origin[2] + dz) % n;
    for (int dy = 0; dy < r.extent[1]; ++dy) {
      const int j = (r.origin[1] + dy) % n;
      for (int dx = 0; dx < r.extent[0]; ++dx) f(grid.index((r.origin[0] + dx) % n, j, k));
    }
  }
}

struct GnSides {
  double lhs = 0.0;         // integral over Q of |grad w - mean(grad w)|^3
  double rhs_over_c = 0.0;  // ||w||_{L^3(Q)} * ||grad^2 w||^2_{L^2(Q)}
};

/// Localized Gagliardo-Nirenberg sides on a cube.  Derivatives are taken
/// globally, then restricted.  Throws when any extent is below 2 cells.
GnSides gn_check(const ScalarField& w, const CellRange& cube);

struct ShiftedCube {
  CellRange cells;
  CellRange enlarged;              // side 2 eps, centered on the standard cube
  double boundary_integral = 0.0;  // surface integral of |w| over the faces
  double volume_integral = 0.0;    // integral of |w| over `enlarged`
  double ratio = 0.0;              // eps * boundary / volume
};

struct CubeDecomposition {
  double epsilon = 0.0;
  int cells = 0;
  /// Per axis, per slab: shift of the cut plane from the standard position,
  /// in cells (0 <= shift < cells / 2).
  std::array<std::vector<int>, 3> shifts;
  std::vector<ShiftedCube> cubes;
  double c_shift = 0.0;  // max ratio over cubes

  std::vector<double> shift_lengths(int axis, double spacing) const;
};

/// Cuts every axis at one grid plane per slab, chosen among the first
/// cells/2 planes of the slab to minimize the plane integral of |w|.
/// Epsilon must be a whole number of cells, at least 4, dividing n.
CubeDecomposition build_shifted_decomposition(const ScalarField& w, double epsilon);

struct CubeIdentity {
  double direct = 0.0;         // integral of (Dw)^3 over the box
  double reconstructed = 0.0;  // sum of the per-cube three-term split
  double scale = 0.0;          // integral of |Dw|^3, the normalizer
  double relative_error() const { return scale > 0.0 ? std::abs(direct - reconstructed) / scale : 0.0; }
};

/// Rebuilds integral (Dw)^3 cube by cube as
///   integral (Dw - m)^3 + 3 m integral (Dw - m)^2 + |Q| m^3, m = mean of Dw on Q.
CubeIdentity decomposition_identity(const ScalarField& dw, const CubeDecomposition& d);

// ---------------------------------------------------------------------------
// Main estimate

struct MainEstimateSides {
  double lhs = 0.0;          // |T(u)|
  double rhs_over_c0 = 0.0;  // ||u||_{L^s_eps} (eps^{-3/s-1} H + eps^{1-3/s} P)
  double epsilon = 0.0;      // effective eps used (whole cells)
};

MainEstimateSides main_estimate_sides(const VectorField& u, double s, double epsilon);

/// Same, for a list of window sizes in cells, sharing T, H and P.
std::vector<MainEstimateSides> main_estimate_sides(const VectorField& u, double s, std::span<const int> eps_cells);

// ---------------------------------------------------------------------------
// Constants

struct ConstantEstimates {
  double c0 = 1.0;
  double c_gn = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c_shift = 0.0;
  double s = 6.0;
  // provenance
  int grid = 0;
  std::uint64_t seed_base = 0;
  int ensemble_size = 0;
  double spectrum_peak = 0.0;
  std::vector<int> eps_cells;
  std::string note;
};

/// c1 = c0^{2s/(s-3)} + (s-3)/(4s) (2 c0)^{2s/(s-3)},  c2 = (s+3)/(4s).
ConstantEstimates derive_constants(double c0, double c_gn, double c_shift, double s);

struct EnsembleSpec {
  int n = 32;
  double box_length = 2.0 * std::numbers::pi;
  double s = 6.0;
  std::uint64_t seed_base = 1;
  int count = 50;
  double spectrum_peak = 3.0;
  std::vector<int> eps_cells{2, 4, 8, 16};
  int threads = 1;
};

/// Random cube for the GN protocol: side 4, 8 or 16 cells (capped at n/2),
/// uniformly placed, drawn from `seed`.
CellRange random_gn_cube(const GridSpec& grid, std::uint64_t seed);

struct EnsembleRatios {
  std::vector<double> main;   // count * eps_cells.size(), row = member
  std::vector<double> gn;     // one per member
  std::vector<double> shift;  // max decomposition ratio per member
};

/// Per-member ratios for seeds seed_base .. seed_base + count - 1.
EnsembleRatios ensemble_ratios(const EnsembleSpec& spec);

/// Sup ratios over an explicit ensemble.  Throws when empty or when every
/// ratio is 0/0.
ConstantEstimates estimate_constants(std::span<const VectorField> velocities, std::span<const ScalarField> scalars,
                                     std::span<const CellRange> cubes, double s, std::span<const int> eps_cells);
ConstantEstimates estimate_constants(const EnsembleSpec& spec);

/// key=value text: c0, c_gn, c1, c2, c_shift, s, grid, seeds, ensemble_size, ...
void write_constants_file(const std::filesystem::path& path, const ConstantEstimates& c);
ConstantEstimates read_constants_file(const std::filesystem::path& path);

}  // namespace nsreg

#endif  // NSREG_ESTIMATES_HPP
