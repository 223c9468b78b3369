#include "nsreg/estimates.hpp"

#include <cmath>
#include <numeric>

namespace nsreg {

std::vector<double> CubeDecomposition::shift_lengths(int axis, double spacing) const {
  std::vector<double> out;
  for (const int s : shifts[axis]) out.push_back(s * spacing);
  return out;
}

namespace {

// h^2 * sum of |w| over the grid plane x_axis = index.
std::vector<double> plane_integrals(const ScalarField& w, int axis) {
  const GridSpec& g = w.grid;
  const int n = g.n;
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        out[idx[axis]] += std::abs(w(i, j, k));
      }
  const double h = g.spacing();
  for (auto& v : out) v *= h * h;
  return out;
}

double face_integral(const ScalarField& w, const CellRange& cube, int axis, int plane) {
  CellRange face = cube;
  face.origin[axis] = plane;
  face.extent[axis] = 1;
  double sum = 0.0;
  for_each_node(w.grid, face, [&](Eigen::Index p) { sum += std::abs(w.values[p]); });
  const double h = w.grid.spacing();
  return sum * h * h;
}

}  // namespace

CubeDecomposition build_shifted_decomposition(const ScalarField& w, double epsilon) {
  const GridSpec& g = w.grid;
  const int n = g.n;
  const double exact_cells = epsilon / g.spacing();
  const int cells = static_cast<int>(std::lround(exact_cells));
  if (std::abs(exact_cells - cells) > 1e-6)
    throw std::invalid_argument("decomposition: epsilon is not a whole number of cells");
  if (cells < 4) throw std::invalid_argument("decomposition: epsilon must span at least 4 cells");
  if (n % cells != 0) throw std::invalid_argument("decomposition: epsilon must divide the box");

  CubeDecomposition d;
  d.cells = cells;
  d.epsilon = cells * g.spacing();
  const int slabs = n / cells;
  std::array<std::vector<int>, 3> cuts;
  for (int axis = 0; axis < 3; ++axis) {
    const auto planes = plane_integrals(w, axis);
    for (int m = 0; m < slabs; ++m) {
      int best = 0;
      for (int o = 1; o < cells / 2; ++o)
        if (planes[m * cells + o] < planes[m * cells + best]) best = o;
      d.shifts[axis].push_back(best);
      cuts[axis].push_back(m * cells + best);
    }
    cuts[axis].push_back(cuts[axis].front() + n);
  }

  const int enlarged_extent = std::min(2 * cells, n);
  const double dv = g.cell_volume();
  for (int mz = 0; mz < slabs; ++mz)
    for (int my = 0; my < slabs; ++my)
      for (int mx = 0; mx < slabs; ++mx) {
        const int m[3] = {mx, my, mz};
        ShiftedCube c;
        for (int a = 0; a < 3; ++a) {
          c.cells.origin[a] = cuts[a][m[a]];
          c.cells.extent[a] = cuts[a][m[a] + 1] - cuts[a][m[a]];
          c.enlarged.origin[a] = ((m[a] * cells - cells / 2) % n + n) % n;
          c.enlarged.extent[a] = enlarged_extent;
        }
        for (int a = 0; a < 3; ++a) {
          c.boundary_integral += face_integral(w, c.cells, a, c.cells.origin[a]);
          c.boundary_integral += face_integral(w, c.cells, a, (c.cells.origin[a] + c.cells.extent[a]) % n);
        }
        double vol = 0.0;
        for_each_node(g, c.enlarged, [&](Eigen::Index p) { vol += std::abs(w.values[p]); });
        c.volume_integral = vol * dv;
        if (c.volume_integral > 0.0)
          c.ratio = d.epsilon * c.boundary_integral / c.volume_integral;
        else
          c.ratio = c.boundary_integral > 0.0 ? INFINITY : 0.0;
        d.c_shift = std::max(d.c_shift, c.ratio);
        d.cubes.push_back(c);
      }
  return d;
}

CubeIdentity decomposition_identity(const ScalarField& dw, const CubeDecomposition& d) {
  const GridSpec& g = dw.grid;
  const double dv = g.cell_volume();
  CubeIdentity out;
  for (Eigen::Index p = 0; p < dw.values.size(); ++p) {
    const double v = dw.values[p];
    out.direct += v * v * v;
    out.scale += std::abs(v * v * v);
  }
  out.direct *= dv;
  out.scale *= dv;

  for (const auto& c : d.cubes) {
    double sum = 0.0;
    for_each_node(g, c.cells, [&](Eigen::Index p) { sum += dw.values[p]; });
    const double count = double(c.cells.node_count());
    const double mean = sum / count;
    double cubic = 0.0, square = 0.0;
    for_each_node(g, c.cells, [&](Eigen::Index p) {
      const double e = dw.values[p] - mean;
      cubic += e * e * e;
      square += e * e;
    });
    out.reconstructed += dv * (cubic + 3.0 * mean * square + count * mean * mean * mean);
  }
  return out;
}

}  // namespace nsreg
