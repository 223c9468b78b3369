#include "nsreg/norms.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace nsreg {

double time_exponent(double s) { return 2.0 * s / (s - 3.0); }

int snap_window_cells(double window, const GridSpec& grid) {
  const long cells = std::lround(window / grid.spacing());
  return static_cast<int>(std::clamp<long>(cells, 1, grid.n));
}

NormParams make_norm_params(double s, double window, const GridSpec& grid) {
  if (!(s > 3.0) || !std::isfinite(s)) throw std::invalid_argument("norm exponent s must satisfy 3 < s < inf");
  if (!(window > 0.0)) throw std::invalid_argument("window side R must be positive");
  if (window > grid.box_length * (1.0 + 1e-12)) throw std::invalid_argument("window side R exceeds the box");
  NormParams p;
  p.s = s;
  p.r = time_exponent(s);
  p.window_requested = window;
  p.window_cells = snap_window_cells(window, grid);
  p.window = p.window_cells * grid.spacing();
  return p;
}

Eigen::ArrayXd ls_weights(const ScalarField& f, double s) {
  return f.values.abs().pow(s) * f.grid.cell_volume();
}

Eigen::ArrayXd ls_weights(const VectorField& u, double s) {
  return u.magnitude_squared().pow(0.5 * s) * u.grid.cell_volume();
}

namespace {

double sequential_sum(const Eigen::ArrayXd& w) { return std::accumulate(w.data(), w.data() + w.size(), 0.0); }

}  // namespace

double global_ls_norm(const ScalarField& f, double s) { return std::pow(sequential_sum(ls_weights(f, s)), 1.0 / s); }
double global_ls_norm(const VectorField& u, double s) { return std::pow(sequential_sum(ls_weights(u, s)), 1.0 / s); }

// ---------------------------------------------------------------------------

SummedAreaTable::SummedAreaTable(const GridSpec& grid, const Eigen::ArrayXd& weights)
    : grid_(grid), stride_(grid.n + 1) {
  const int n = grid.n, m = stride_;
  if (weights.size() != grid.size()) throw std::invalid_argument("summed-area table: weight size mismatch");
  prefix_ = Eigen::ArrayXd::Zero(Eigen::Index(m) * m * m);
  auto at = [&](int i, int j, int k) -> double& { return prefix_[(Eigen::Index(k) * m + j) * m + i]; };
  // Separable running sums keep every partial a sum of nonnegative terms.
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double run = 0.0;
      for (int i = 0; i < n; ++i) {
        run += weights[grid.index(i, j, k)];
        at(i + 1, j + 1, k + 1) = run;
      }
    }
  for (int k = 1; k <= n; ++k)
    for (int j = 2; j <= n; ++j)
      for (int i = 1; i <= n; ++i) at(i, j, k) += at(i, j - 1, k);
  for (int k = 2; k <= n; ++k)
    for (int j = 1; j <= n; ++j)
      for (int i = 1; i <= n; ++i) at(i, j, k) += at(i, j, k - 1);
  total_ = at(n, n, n);
}

double SummedAreaTable::plain_box(int x0, int x1, int y0, int y1, int z0, int z1) const {
  const double v = prefix(x1, y1, z1) - prefix(x0, y1, z1) - prefix(x1, y0, z1) - prefix(x1, y1, z0) +
                   prefix(x0, y0, z1) + prefix(x0, y1, z0) + prefix(x1, y0, z0) - prefix(x0, y0, z0);
  return v > 0.0 ? v : 0.0;
}

double SummedAreaTable::box_sum(const std::array<int, 3>& lo, const std::array<int, 3>& extent) const {
  const int n = grid_.n;
  struct Range {
    int a, b;
  };
  std::array<std::array<Range, 2>, 3> ranges;
  std::array<int, 3> count{};
  for (int ax = 0; ax < 3; ++ax) {
    const int e = extent[ax];
    if (e < 0 || e > n) throw std::out_of_range("summed-area table: extent outside [0, n]");
    const int start = ((lo[ax] % n) + n) % n;
    if (start + e <= n) {
      ranges[ax][0] = {start, start + e};
      count[ax] = 1;
    } else {
      ranges[ax][0] = {start, n};
      ranges[ax][1] = {0, start + e - n};
      count[ax] = 2;
    }
  }
  double sum = 0.0;
  for (int c = 0; c < count[2]; ++c)
    for (int b = 0; b < count[1]; ++b)
      for (int a = 0; a < count[0]; ++a) {
        const auto& rx = ranges[0][a];
        const auto& ry = ranges[1][b];
        const auto& rz = ranges[2][c];
        sum += plain_box(rx.a, rx.b, ry.a, ry.b, rz.a, rz.b);
      }
  return sum;
}

SummedAreaTable build_sat(const ScalarField& f, double s) { return {f.grid, ls_weights(f, s)}; }
SummedAreaTable build_sat(const VectorField& u, double s) { return {u.grid, ls_weights(u, s)}; }

double direct_window_mass(const GridSpec& grid, const Eigen::ArrayXd& weights, const std::array<int, 3>& anchor,
                          int cells) {
  const int n = grid.n;
  double sum = 0.0;
  for (int dz = 0; dz < cells; ++dz) {
    const int k = (anchor[2] + dz) % n;
    for (int dy = 0; dy < cells; ++dy) {
      const int j = (anchor[1] + dy) % n;
      for (int dx = 0; dx < cells; ++dx) sum += weights[grid.index((anchor[0] + dx) % n, j, k)];
    }
  }
  return sum;
}

LocalizedNorm localized_norm(const GridSpec& grid, const Eigen::ArrayXd& weights, int cells, double s) {
  const int n = grid.n;
  if (cells < 1) throw std::invalid_argument("localized norm: window must cover at least one cell");
  if (cells >= n) return {std::pow(sequential_sum(weights), 1.0 / s), {0, 0, 0}};

  const SummedAreaTable sat(grid, weights);
  std::vector<double> masses(static_cast<std::size_t>(grid.size()));
  double best_sat = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double m = sat.window_mass(i, j, k, cells);
        masses[grid.index(i, j, k)] = m;
        best_sat = std::max(best_sat, m);
      }

  // Rounding bound for nonnegative sums: table entries carry at most 3n
  // additions, a periodic query combines up to 8 boxes of 8 entries, and the
  // direct sum has cells^3 additions.  Every anchor whose table value is within
  // twice the combined bound of the best is re-summed directly.
  constexpr double u = std::numeric_limits<double>::epsilon() / 2;
  const double total = sat.total();
  const double bound = (8.0 * (24.0 * n + 64.0) + double(cells) * cells * cells) * u * total;
  const double threshold = best_sat - 4.0 * bound;

  LocalizedNorm out;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (masses[grid.index(i, j, k)] < threshold) continue;
        const double m = direct_window_mass(grid, weights, {i, j, k}, cells);
        if (m > best) {
          best = m;
          out.anchor = {i, j, k};
        }
      }
  out.value = std::pow(best, 1.0 / s);
  return out;
}

LocalizedNorm localized_norm(const VectorField& u, const NormParams& params) {
  return localized_norm(u.grid, ls_weights(u, params.s), params.window_cells, params.s);
}

LocalizedNorm localized_norm(const ScalarField& f, const NormParams& params) {
  return localized_norm(f.grid, ls_weights(f, params.s), params.window_cells, params.s);
}

// ---------------------------------------------------------------------------

namespace {

double trapezoid_inverse_square(std::span<const double> t, std::span<const double> r, std::size_t stride,
                                std::size_t last) {
  double sum = 0.0;
  for (std::size_t i = 0; i + stride <= last; i += stride) {
    const double a = 1.0 / (r[i] * r[i]);
    const double b = 1.0 / (r[i + stride] * r[i + stride]);
    sum += 0.5 * (a + b) * (t[i + stride] - t[i]);
  }
  return sum;
}

}  // namespace

ScheduleIntegral r_schedule_integral(std::span<const double> times, std::span<const double> radii) {
  if (times.size() != radii.size()) throw std::invalid_argument("schedule integral: size mismatch");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw std::invalid_argument("schedule integral: non-positive R at t = " + std::to_string(times[i]));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("schedule integral: sample times must increase");
  }
  ScheduleIntegral out;
  if (times.size() < 2) return out;
  out.value = trapezoid_inverse_square(times, radii, 1, times.size() - 1);
  if (!std::isfinite(out.value)) {
    out.divergent = true;
    out.warning = "integral of R^-2 is not finite";
    return out;
  }
  if (times.size() >= 5) {
    const std::size_t last_even = (times.size() - 1) / 2 * 2;
    const double fine = trapezoid_inverse_square(times, radii, 1, last_even);
    const double coarse = trapezoid_inverse_square(times, radii, 2, last_even);
    if (std::abs(fine - coarse) > 0.01 * std::abs(fine)) {
      out.divergent = true;
      out.warning = "integral of R^-2 is unresolved on the sample grid (relative change " +
                    std::to_string(std::abs(fine - coarse) / std::abs(fine)) +
                    " under 2x coarsening); R likely vanishes at an endpoint";
    }
  }
  return out;
}

}  // namespace nsreg
