#include "nsreg/field.hpp"
#include "nsreg/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace nsreg;
using oracle::pi;

namespace {

double rel_max_err(const Eigen::ArrayXd& got, const Eigen::ArrayXd& want) {
  const double scale = std::max(want.abs().maxCoeff(), 1e-300);
  return (got - want).abs().maxCoeff() / scale;
}

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(4), std::invalid_argument);
  EXPECT_THROW(make_grid(12), std::invalid_argument);
  EXPECT_THROW(make_grid(16, -1.0), std::invalid_argument);
  EXPECT_NO_THROW(make_grid(8));
}

TEST(Grid, SpacingTimesNIsBoxLength) {
  for (int n : {8, 16, 32, 64, 128}) {
    const GridSpec g = make_grid(n);
    EXPECT_EQ(g.spacing() * n, g.box_length);
    EXPECT_EQ(ScalarField(g).values.size(), Eigen::Index(n) * n * n);
  }
}

TEST(Transform, ConstantIsSingleZeroMode) {
  const GridSpec g = make_grid(16);
  ScalarField f(g);
  f.values.setConstant(2.5);
  const SpectralField fh = to_spectral(f);
  EXPECT_NEAR(fh.modes[0].real(), 2.5, 1e-15);
  EXPECT_NEAR(fh.modes[0].imag(), 0.0, 1e-15);
  EXPECT_LT(fh.modes.tail(fh.modes.size() - 1).abs().maxCoeff(), 1e-15);
}

TEST(Transform, SineMatchesDirectDft) {
  const GridSpec g = make_grid(16);
  const ScalarField f = oracle::sample(g, [](double x, double, double) { return std::sin(x); });
  const SpectralField fh = to_spectral(f);
  int nonzero = 0;
  for (int kz = -7; kz <= 8; ++kz)
    for (int ky = -7; ky <= 8; ++ky)
      for (int kx = -7; kx <= 8; ++kx) {
        const auto want = oracle::dft_mode(f, kx, ky, kz);
        const auto got = fh.mode(kx, ky, kz);
        ASSERT_NEAR(std::abs(got - want), 0.0, 1e-13) << kx << ' ' << ky << ' ' << kz;
        if (std::abs(got) > 1e-12) ++nonzero;
      }
  EXPECT_EQ(nonzero, 2);
  EXPECT_NEAR(std::abs(fh.mode(1, 0, 0) - std::complex<double>(0.0, -0.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(fh.mode(-1, 0, 0) - std::complex<double>(0.0, 0.5)), 0.0, 1e-14);
}

TEST(Transform, RandomFieldMatchesDirectDft) {
  const GridSpec g = make_grid(8);
  const ScalarField f = oracle::random_field(g, 7);
  const SpectralField fh = to_spectral(f);
  for (int kz = -3; kz <= 4; ++kz)
    for (int ky = -3; ky <= 4; ++ky)
      for (int kx = -3; kx <= 4; ++kx)
        ASSERT_LT(std::abs(fh.mode(kx, ky, kz) - oracle::dft_mode(f, kx, ky, kz)), 1e-14);
}

TEST(Transform, RoundTripIsIdentity) {
  for (int n : {8, 16, 32}) {
    const GridSpec g = make_grid(n);
    const ScalarField f = oracle::random_field(g, 100 + n);
    const ScalarField back = to_physical(to_spectral(f));
    EXPECT_LT(rel_max_err(back.values, f.values), 1e-12);
  }
}

TEST(Transform, HermitianSymmetry) {
  const GridSpec g = make_grid(8);
  const SpectralField fh = to_spectral(oracle::random_field(g, 3));
  for (int kz = -3; kz <= 3; ++kz)
    for (int ky = -3; ky <= 3; ++ky)
      for (int kx = -3; kx <= 3; ++kx)
        EXPECT_LT(std::abs(fh.mode(-kx, -ky, -kz) - std::conj(fh.mode(kx, ky, kz))), 1e-15);
}

TEST(Transform, PaddedInverseSamplesTheSameFunction) {
  const GridSpec g = make_grid(16);
  auto fn = [](double x, double y, double z) { return std::sin(2 * x) * std::cos(3 * y) + std::cos(5 * z - 1.0); };
  const ScalarField f = oracle::sample(g, fn);
  const ScalarField fine = to_physical_padded(to_spectral(f), 24);
  const ScalarField want = oracle::sample(GridSpec{24, g.box_length}, fn);
  EXPECT_LT(oracle::max_abs_diff(fine.values, want.values), 1e-13);
  EXPECT_THROW(to_physical_padded(to_spectral(f), 15), std::invalid_argument);
}

TEST(Transform, ParsevalMatchesQuadrature) {
  for (int seed = 0; seed < 5; ++seed) {
    const GridSpec g = make_grid(16, 3.0);
    const ScalarField f = oracle::random_field(g, seed);
    const double quad = f.values.square().sum() * g.cell_volume();
    EXPECT_NEAR(parseval_sum(to_spectral(f)), quad, 1e-10 * quad);
  }
}

TEST(Wavenumbers, MaskAndWeights) {
  const GridSpec g = make_grid(16);
  const Eigen::ArrayXd mask = dealias_mask(g);
  const Eigen::ArrayXd w = parseval_weights(g);
  double kept = 0.0;
  for (int jz = 0; jz < g.n; ++jz)
    for (int jy = 0; jy < g.n; ++jy)
      for (int kx = 0; kx < g.half(); ++kx) {
        const auto idx = g.spectral_index(kx, jy, jz);
        const bool inside = 3 * kx < g.n && 3 * std::abs(g.signed_mode(jy)) < g.n && 3 * std::abs(g.signed_mode(jz)) < g.n;
        EXPECT_EQ(mask[idx], inside ? 1.0 : 0.0);
        EXPECT_EQ(w[idx], (kx == 0 || kx == g.n / 2) ? 1.0 : 2.0);
        kept += mask[idx];
      }
  EXPECT_EQ(kept, 6.0 * 11 * 11);  // kx in 0..5, ky and kz in -5..5
  EXPECT_EQ(w.sum(), double(g.size()));
  const Wavenumbers k = wavenumbers(g);
  EXPECT_EQ(k.odd[g.n / 2], 0.0);
  EXPECT_EQ(k.full[g.n / 2], g.n / 2);
}

// ---------------------------------------------------------------------------

TEST(Gradient, ConstantGivesZero) {
  const GridSpec g = make_grid(16);
  ScalarField f(g);
  f.values.setConstant(-4.0);
  const VectorField d = gradient(f);
  for (int a = 0; a < 3; ++a) EXPECT_LT(d[a].abs().maxCoeff(), 1e-14);
}

TEST(Gradient, Sine) {
  const GridSpec g = make_grid(16);
  const ScalarField f = oracle::sample(g, [](double x, double, double) { return std::sin(x); });
  const VectorField d = gradient(f);
  const ScalarField want = oracle::sample(g, [](double x, double, double) { return std::cos(x); });
  EXPECT_LT(oracle::max_abs_diff(d[0], want.values), 1e-12);
  EXPECT_LT(d[1].abs().maxCoeff(), 1e-12);
  EXPECT_LT(d[2].abs().maxCoeff(), 1e-12);
}

TEST(Gradient, ProductOfModes) {
  const GridSpec g = make_grid(16);
  const ScalarField f = oracle::sample(g, [](double x, double y, double) { return std::sin(2 * x) * std::cos(3 * y); });
  const VectorField d = gradient(f);
  const auto dx = oracle::sample(g, [](double x, double y, double) { return 2 * std::cos(2 * x) * std::cos(3 * y); });
  const auto dy = oracle::sample(g, [](double x, double y, double) { return -3 * std::sin(2 * x) * std::sin(3 * y); });
  EXPECT_LT(oracle::max_abs_diff(d[0], dx.values), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(d[1], dy.values), 1e-12);
  EXPECT_LT(d[2].abs().maxCoeff(), 1e-12);
}

TEST(Gradient, NonstandardBoxLength) {
  const GridSpec g = make_grid(16, 3.0);
  const double k = 2 * pi / 3.0;
  const ScalarField f = oracle::sample(g, [k](double, double, double z) { return std::sin(2 * k * z); });
  const auto want = oracle::sample(g, [k](double, double, double z) { return 2 * k * std::cos(2 * k * z); });
  EXPECT_LT(oracle::max_abs_diff(gradient(f)[2], want.values), 1e-11);
}

TEST(Gradient, CommutesWithRoundTrip) {
  const GridSpec g = make_grid(16);
  const ScalarField f = oracle::random_trig(g, 5, 11);
  const VectorField a = gradient(f);
  const VectorField b = gradient(to_physical(to_spectral(f)));
  for (int c = 0; c < 3; ++c) EXPECT_LT(oracle::max_abs_diff(a[c], b[c]), 1e-12);
}

TEST(Hessian, ConstantAndSine) {
  const GridSpec g = make_grid(16);
  ScalarField c(g);
  c.values.setConstant(3.0);
  const TensorField hc = second_derivatives(c);
  for (const auto& comp : hc.components) EXPECT_LT(comp.abs().maxCoeff(), 1e-13);

  const ScalarField f = oracle::sample(g, [](double x, double, double) { return std::sin(x); });
  const TensorField h = second_derivatives(f);
  EXPECT_LT(oracle::max_abs_diff(h(0, 0), -f.values), 1e-12);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != 0 || b != 0) EXPECT_LT(h(a, b).abs().maxCoeff(), 1e-12);
}

TEST(Hessian, SymmetricAndMatchesAnalytic) {
  const GridSpec g = make_grid(16);
  const ScalarField f = oracle::random_trig(g, 6, 5);
  const TensorField h = second_derivatives(f);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_LT(oracle::max_abs_diff(h(a, b), h(b, a)), 1e-12);

  const ScalarField p = oracle::sample(g, [](double x, double y, double z) { return std::sin(x + 2 * y) * std::cos(z); });
  const TensorField hp = second_derivatives(p);
  const auto dxy = oracle::sample(g, [](double x, double y, double z) { return -2 * std::sin(x + 2 * y) * std::cos(z); });
  const auto dyz = oracle::sample(g, [](double x, double y, double z) { return -2 * std::cos(x + 2 * y) * std::sin(z); });
  EXPECT_LT(oracle::max_abs_diff(hp(0, 1), dxy.values), 1e-11);
  EXPECT_LT(oracle::max_abs_diff(hp(1, 2), dyz.values), 1e-11);
}

// ---------------------------------------------------------------------------

TEST(Leray, GradientProjectsToZero) {
  const GridSpec g = make_grid(16);
  const VectorField v = oracle::sample_vector(g, [](double x, double y, double) {
    return std::array<double, 3>{std::cos(x) * std::sin(y), std::sin(x) * std::cos(y), 0.0};
  });
  const VectorField p = leray_project(v);
  for (int a = 0; a < 3; ++a) EXPECT_LT(p[a].abs().maxCoeff(), 1e-10);
}

TEST(Leray, TaylorGreenIsFixedPoint) {
  const GridSpec g = make_grid(16);
  for (const VectorField& u : {init_taylor_green_2d(g), init_taylor_green_3d(g)}) {
    const VectorField p = leray_project(u);
    for (int a = 0; a < 3; ++a) EXPECT_LT(oracle::max_abs_diff(p[a], u[a]), 1e-12);
  }
}

TEST(Leray, RecoversSolenoidalPart) {
  const GridSpec g = make_grid(16);
  // curl of (0, 0, psi) plus grad(phi), both analytic
  const VectorField v = oracle::sample_vector(g, [](double x, double y, double z) {
    const double sx = -2 * std::sin(x) * std::sin(2 * y), sy = -std::cos(x) * std::cos(2 * y);
    const double gx = 3 * std::cos(3 * x + z), gy = 0.0, gz = std::cos(3 * x + z);
    return std::array<double, 3>{sx + gx, sy + gy, gz};
  });
  const VectorField want = oracle::sample_vector(g, [](double x, double y, double) {
    return std::array<double, 3>{-2 * std::sin(x) * std::sin(2 * y), -std::cos(x) * std::cos(2 * y), 0.0};
  });
  const VectorField p = leray_project(v);
  for (int a = 0; a < 3; ++a) EXPECT_LT(oracle::max_abs_diff(p[a], want[a]), 1e-10);
}

TEST(Leray, IdempotentAndDivergenceFree) {
  const GridSpec g = make_grid(16);
  VectorField v(g);
  for (int a = 0; a < 3; ++a) v[a] = oracle::random_field(g, 40 + a).values;
  const VectorField p = leray_project(v);
  const VectorField pp = leray_project(p);
  for (int a = 0; a < 3; ++a) EXPECT_LT(oracle::max_abs_diff(p[a], pp[a]), 1e-12);
  const SpectralVector ph = to_spectral(p);
  const auto k = wavenumbers(g);
  double worst = 0.0;
  for (int jz = 0; jz < g.n; ++jz)
    for (int jy = 0; jy < g.n; ++jy)
      for (int kx = 0; kx < g.half(); ++kx) {
        const auto idx = g.spectral_index(kx, jy, jz);
        const auto div = k.odd[kx] * ph.modes[0][idx] + k.odd[jy] * ph.modes[1][idx] + k.odd[jz] * ph.modes[2][idx];
        worst = std::max(worst, std::abs(div));
      }
  EXPECT_LE(worst, 1e-10 * p.max_speed());
}

// ---------------------------------------------------------------------------

TEST(InnerProducts, ZeroField) {
  const auto ip = inner_products(VectorField(make_grid(8)));
  EXPECT_EQ(ip.energy, 0.0);
  EXPECT_EQ(ip.enstrophy, 0.0);
  EXPECT_EQ(ip.palinstrophy, 0.0);
}

TEST(InnerProducts, TaylorGreenAgainstQuadrature) {
  using oracle::SeparableTerm;
  auto s2 = [](double t) { return std::sin(t) * std::sin(t); };
  auto c2 = [](double t) { return std::cos(t) * std::cos(t); };
  auto one = [](double) { return 1.0; };
  const double L = 2 * pi;
  // |u|^2 = sin^2 x cos^2 y + cos^2 x sin^2 y
  const double energy = oracle::separable_integral({{s2, c2, one}, {c2, s2, one}}, L);
  // |grad u|^2 = 2 cos^2 x cos^2 y + 2 sin^2 x sin^2 y
  const double enstrophy = 2 * oracle::separable_integral({{c2, c2, one}, {s2, s2, one}}, L);
  // |grad^2 u|^2 = 4 (sin^2 x cos^2 y + cos^2 x sin^2 y)
  const double palinstrophy = 4 * oracle::separable_integral({{s2, c2, one}, {c2, s2, one}}, L);

  for (int n : {8, 32}) {
    const auto ip = inner_products(init_taylor_green_2d(make_grid(n)));
    EXPECT_NEAR(ip.energy, energy, 1e-10 * energy);
    EXPECT_NEAR(ip.enstrophy, enstrophy, 1e-10 * enstrophy);
    EXPECT_NEAR(ip.palinstrophy, palinstrophy, 1e-10 * palinstrophy);
  }
  EXPECT_NEAR(energy, 4 * pi * pi * pi, 1e-9);
  EXPECT_NEAR(enstrophy, 8 * pi * pi * pi, 1e-9);
}

TEST(InnerProducts, SingleModeAgainstQuadrature) {
  auto s2 = [](double t) { return std::sin(t) * std::sin(t); };
  auto c2 = [](double t) { return std::cos(t) * std::cos(t); };
  auto one = [](double) { return 1.0; };
  const double L = 2 * pi;
  const double energy = oracle::separable_integral({{one, s2, one}}, L);
  const double enstrophy = oracle::separable_integral({{one, c2, one}}, L);
  const GridSpec g = make_grid(16);
  const VectorField u = oracle::sample_vector(g, [](double, double y, double) {
    return std::array<double, 3>{std::sin(y), 0.0, 0.0};
  });
  const auto ip = inner_products(u);
  EXPECT_NEAR(ip.energy, energy, 1e-10 * energy);
  EXPECT_NEAR(ip.enstrophy, enstrophy, 1e-10 * enstrophy);
  EXPECT_NEAR(ip.palinstrophy, energy, 1e-10 * energy);
  EXPECT_NEAR(energy, L * L * L / 2, 1e-9);
}

TEST(InnerProducts, ParsevalAgreesWithPhysicalQuadrature) {
  const GridSpec g = make_grid(16);
  VectorField u(g);
  for (int a = 0; a < 3; ++a) u[a] = oracle::random_trig(g, 7, 60 + a).values;
  const auto ip = inner_products(u);
  const double energy = u.magnitude_squared().sum() * g.cell_volume();
  EXPECT_NEAR(ip.energy, energy, 1e-10 * energy);
  const TensorField du = velocity_gradient(u);
  double grad2 = 0.0;
  for (const auto& c : du.components) grad2 += c.square().sum();
  grad2 *= g.cell_volume();
  EXPECT_NEAR(ip.enstrophy, grad2, 1e-10 * grad2);
}

// ---------------------------------------------------------------------------

TEST(Snapshot, RoundTripAndHeader) {
  const auto dir = std::filesystem::temp_directory_path() / "nsreg_snapshot_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "u.nsrl";
  const GridSpec g = make_grid(8, 3.5);
  VectorField u(g);
  for (int a = 0; a < 3; ++a) u[a] = oracle::random_field(g, a).values;
  write_snapshot(path, u, 0.25);

  std::ifstream is(path, std::ios::binary);
  char magic[8];
  is.read(magic, 8);
  EXPECT_EQ(std::memcmp(magic, "NSRL1", 5), 0);
  std::uint64_t n = 0, comps = 0;
  double box = 0.0, t = 0.0;
  is.read(reinterpret_cast<char*>(&n), 8);
  is.read(reinterpret_cast<char*>(&box), 8);
  is.read(reinterpret_cast<char*>(&t), 8);
  is.read(reinterpret_cast<char*>(&comps), 8);
  EXPECT_EQ(n, 8u);
  EXPECT_EQ(box, 3.5);
  EXPECT_EQ(t, 0.25);
  EXPECT_EQ(comps, 3u);
  double first = 0.0;
  is.read(reinterpret_cast<char*>(&first), 8);
  EXPECT_EQ(first, u[0][0]);
  is.close();

  const Snapshot s = read_snapshot(path);
  EXPECT_EQ(s.grid, g);
  EXPECT_EQ(s.time, 0.25);
  ASSERT_EQ(s.components.size(), 3u);
  for (int a = 0; a < 3; ++a) EXPECT_TRUE((s.components[a] == u[a]).all());
  EXPECT_FALSE(std::filesystem::exists(dir / "u.nsrl.tmp"));

  std::ofstream(dir / "bad.nsrl") << "garbage";
  EXPECT_THROW(read_snapshot(dir / "bad.nsrl"), std::runtime_error);
  std::filesystem::remove_all(dir);
}
