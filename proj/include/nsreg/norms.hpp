// Global and localized Lebesgue norms on the periodic grid.
//
// The localized norm is the largest L^s norm over all axis-aligned cubes of a
// fixed side, anchored at grid nodes:
//
//   ||u||_{L^s_R} = max_x ( integral over [x, x + R)^3 of |u|^s )^{1/s}
//
// Window sums come from a summed-area table; the winning windows are then
// re-summed directly so the result is bit-identical to brute-force
// enumeration in the canonical order (see direct_window_mass).
#ifndef NSREG_NORMS_HPP
#define NSREG_NORMS_HPP

#include "nsreg/field.hpp"

#include <array>
#include <span>
#include <string>

namespace nsreg {

/// Exponent pair with 3/s + 2/r = 1 and the cube side R, snapped to cells.
struct NormParams {
  double s = 6.0;
  double r = 4.0;
  double window_requested = 0.0;
  int window_cells = 1;
  double window = 0.0;  // effective R = window_cells * spacing
};

/// Rejects s <= 3 (r would be infinite or negative) and non-positive R.
NormParams make_norm_params(double s, double window, const GridSpec& grid);

/// r = 2s/(s - 3).
double time_exponent(double s);

/// round(R / h), clamped to [1, n].
int snap_window_cells(double window, const GridSpec& grid);

/// Node weights |f|^s * h^3 whose sum is the quadrature of |f|^s.
Eigen::ArrayXd ls_weights(const ScalarField& f, double s);
Eigen::ArrayXd ls_weights(const VectorField& u, double s);

double global_ls_norm(const ScalarField& f, double s);
double global_ls_norm(const VectorField& u, double s);

/// Inclusive 3D prefix sums of nonnegative node weights, with periodic
/// queries answered by splitting into at most 8 non-wrapping boxes.
class SummedAreaTable {
 public:
  SummedAreaTable(const GridSpec& grid, const Eigen::ArrayXd& weights);

  /// Sum over nodes [lo, lo + extent) per axis, taken periodically.
  double box_sum(const std::array<int, 3>& lo, const std::array<int, 3>& extent) const;
  /// Sum over the cube of side `cells` anchored at (i, j, k).
  double window_mass(int i, int j, int k, int cells) const { return box_sum({i, j, k}, {cells, cells, cells}); }
  double total() const { return total_; }
  const GridSpec& grid() const { return grid_; }

 private:
  double prefix(int i, int j, int k) const { return prefix_[(Eigen::Index(k) * stride_ + j) * stride_ + i]; }
  double plain_box(int x0, int x1, int y0, int y1, int z0, int z1) const;

  GridSpec grid_;
  int stride_ = 0;
  Eigen::ArrayXd prefix_;  // (n+1)^3, zero first row on each axis
  double total_ = 0.0;
};

SummedAreaTable build_sat(const ScalarField& f, double s);
SummedAreaTable build_sat(const VectorField& u, double s);

/// Window sum in canonical order: z outermost, then y, x innermost, one
/// running accumulator, periodic wrap.
double direct_window_mass(const GridSpec& grid, const Eigen::ArrayXd& weights, const std::array<int, 3>& anchor,
                          int cells);

struct LocalizedNorm {
  double value = 0.0;
  std::array<int, 3> anchor{0, 0, 0};
};

/// Max over all n^3 anchors; ties go to the first anchor in (z, y, x) order.
LocalizedNorm localized_norm(const GridSpec& grid, const Eigen::ArrayXd& weights, int cells, double s);
LocalizedNorm localized_norm(const VectorField& u, const NormParams& params);
LocalizedNorm localized_norm(const ScalarField& f, const NormParams& params);

struct ScheduleIntegral {
  double value = 0.0;
  bool divergent = false;
  std::string warning;
};

/// Trapezoidal integral of R(t)^-2 over sampled (t, R) pairs.  Throws on a
/// non-positive radius.  The divergence flag is raised when the value is not
/// finite or when the integral has not resolved on the sample grid:
/// dropping every other sample moves it by more than 1%, which is what an
/// endpoint singularity such as R = sqrt(t) produces.
ScheduleIntegral r_schedule_integral(std::span<const double> times, std::span<const double> radii);

}  // namespace nsreg

#endif  // NSREG_NORMS_HPP
