#include "nsreg/estimates.hpp"
#include "nsreg/monitor.hpp"
#include "nsreg/solver.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace nsreg {

ConstantEstimates derive_constants(double c0, double c_gn, double c_shift, double s) {
  if (!(s > 3.0)) throw std::invalid_argument("constants: s must exceed 3");
  ConstantEstimates c;
  c.c0 = c0;
  c.c_gn = c_gn;
  c.c_shift = c_shift;
  c.s = s;
  const double p = 2.0 * s / (s - 3.0);
  c.c1 = std::pow(c0, p) + (s - 3.0) / (4.0 * s) * std::pow(2.0 * c0, p);
  c.c2 = (s + 3.0) / (4.0 * s);
  return c;
}

CellRange random_gn_cube(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  std::vector<int> sides;
  for (int side : {4, 8, 16})
    if (side <= grid.n / 2) sides.push_back(side);
  const int side = sides[std::uniform_int_distribution<std::size_t>(0, sides.size() - 1)(rng)];
  std::uniform_int_distribution<int> pos(0, grid.n - 1);
  CellRange r;
  for (int a = 0; a < 3; ++a) {
    r.origin[a] = pos(rng);
    r.extent[a] = side;
  }
  return r;
}

namespace {

// Ratio, or NaN for 0/0.
double ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? INFINITY : NAN;
}

double nan_max(std::span<const double> v) {
  double m = NAN;
  for (const double x : v)
    if (!std::isnan(x) && (std::isnan(m) || x > m)) m = x;
  return m;
}

std::vector<int> decomposition_sizes(const GridSpec& g, std::span<const int> eps_cells) {
  std::vector<int> out;
  for (const int c : eps_cells)
    if (c >= 4 && g.n % c == 0 && 2 * c <= g.n) out.push_back(c);
  return out;
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

EnsembleRatios ensemble_ratios(const EnsembleSpec& spec) {
  if (spec.count <= 0) throw std::invalid_argument("estimate constants: empty ensemble");
  const GridSpec grid = make_grid(spec.n, spec.box_length);
  const std::size_t neps = spec.eps_cells.size();
  const auto dec_sizes = decomposition_sizes(grid, spec.eps_cells);
  EnsembleRatios out;
  out.main.assign(std::size_t(spec.count) * neps, NAN);
  out.gn.assign(spec.count, NAN);
  out.shift.assign(spec.count, 0.0);
  parallel_for(spec.count, spec.threads, [&](int i) {
    const std::uint64_t seed = spec.seed_base + std::uint64_t(i);
    const VectorField u = init_random_solenoidal(grid, spec.spectrum_peak, seed);
    const auto sides = main_estimate_sides(u, spec.s, spec.eps_cells);
    for (std::size_t e = 0; e < neps; ++e) out.main[i * neps + e] = ratio(sides[e].lhs, sides[e].rhs_over_c0);

    const ScalarField w = random_scalar_field(grid, spec.spectrum_peak, seed);
    const GnSides gn = gn_check(w, random_gn_cube(grid, seed));
    out.gn[i] = ratio(gn.lhs, gn.rhs_over_c);
    for (const int c : dec_sizes)
      out.shift[i] = std::max(out.shift[i], build_shifted_decomposition(w, c * grid.spacing()).c_shift);
  });
  return out;
}

ConstantEstimates estimate_constants(const EnsembleSpec& spec) {
  const EnsembleRatios r = ensemble_ratios(spec);
  const double c0 = nan_max(r.main);
  if (std::isnan(c0)) throw std::invalid_argument("degenerate ensemble, all ratios 0/0");
  const double c_gn = nan_max(r.gn);
  ConstantEstimates c = derive_constants(c0, std::isnan(c_gn) ? 0.0 : c_gn, nan_max(r.shift), spec.s);
  c.grid = spec.n;
  c.seed_base = spec.seed_base;
  c.ensemble_size = spec.count;
  c.spectrum_peak = spec.spectrum_peak;
  c.eps_cells = spec.eps_cells;
  c.note = "random_solenoidal / random scalar ensemble";
  return c;
}

ConstantEstimates estimate_constants(std::span<const VectorField> velocities, std::span<const ScalarField> scalars,
                                     std::span<const CellRange> cubes, double s, std::span<const int> eps_cells) {
  if (velocities.empty()) throw std::invalid_argument("estimate constants: empty ensemble");
  if (scalars.size() != cubes.size()) throw std::invalid_argument("estimate constants: one cube per scalar field");
  std::vector<double> main, gn, shift;
  for (const auto& u : velocities)
    for (const auto& m : main_estimate_sides(u, s, eps_cells)) main.push_back(ratio(m.lhs, m.rhs_over_c0));
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const GnSides g = gn_check(scalars[i], cubes[i]);
    gn.push_back(ratio(g.lhs, g.rhs_over_c));
    for (const int c : decomposition_sizes(scalars[i].grid, eps_cells))
      shift.push_back(build_shifted_decomposition(scalars[i], c * scalars[i].grid.spacing()).c_shift);
  }
  const double c0 = nan_max(main);
  if (std::isnan(c0)) throw std::invalid_argument("degenerate ensemble, all ratios 0/0");
  const double c_gn = nan_max(gn), c_shift = nan_max(shift);
  ConstantEstimates c = derive_constants(c0, std::isnan(c_gn) ? 0.0 : c_gn, std::isnan(c_shift) ? 0.0 : c_shift, s);
  c.grid = velocities.front().grid.n;
  c.ensemble_size = int(velocities.size());
  c.eps_cells.assign(eps_cells.begin(), eps_cells.end());
  c.note = "explicit ensemble";
  return c;
}

// ---------------------------------------------------------------------------

void write_constants_file(const std::filesystem::path& path, const ConstantEstimates& c) {
  std::ostringstream os;
  os << "c0=" << format_double(c.c0) << '\n'
     << "c_gn=" << format_double(c.c_gn) << '\n'
     << "c1=" << format_double(c.c1) << '\n'
     << "c2=" << format_double(c.c2) << '\n'
     << "c_shift=" << format_double(c.c_shift) << '\n'
     << "s=" << format_double(c.s) << '\n'
     << "grid=" << c.grid << '\n'
     << "seeds=" << c.seed_base << '-' << (c.seed_base + std::uint64_t(std::max(c.ensemble_size, 1)) - 1) << '\n'
     << "ensemble_size=" << c.ensemble_size << '\n'
     << "spectrum_peak=" << format_double(c.spectrum_peak) << '\n'
     << "eps_cells=";
  for (std::size_t i = 0; i < c.eps_cells.size(); ++i) os << (i ? "," : "") << c.eps_cells[i];
  os << '\n' << "note=" << c.note << '\n';

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << os.str();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ConstantEstimates read_constants_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open constants file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto number = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("constants file " + path.string() + " lacks key '" + key + "'");
    return std::stod(it->second);
  };
  ConstantEstimates c = derive_constants(number("c0"), number("c_gn"), number("c_shift"), number("s"));
  if (kv.count("c1") && std::abs(number("c1") - c.c1) > 1e-12 * std::abs(c.c1))
    throw std::runtime_error("constants file: c1 is inconsistent with c0 and s");
  if (kv.count("c2") && std::abs(number("c2") - c.c2) > 1e-12 * std::abs(c.c2))
    throw std::runtime_error("constants file: c2 is inconsistent with s");
  if (kv.count("grid")) c.grid = std::stoi(kv["grid"]);
  if (kv.count("ensemble_size")) c.ensemble_size = std::stoi(kv["ensemble_size"]);
  if (kv.count("seeds")) c.seed_base = std::stoull(kv["seeds"].substr(0, kv["seeds"].find('-')));
  if (kv.count("spectrum_peak")) c.spectrum_peak = std::stod(kv["spectrum_peak"]);
  if (kv.count("eps_cells")) {
    std::istringstream is(kv["eps_cells"]);
    std::string tok;
    while (std::getline(is, tok, ','))
      if (!tok.empty()) c.eps_cells.push_back(std::stoi(tok));
  }
  if (kv.count("note")) c.note = kv["note"];
  return c;
}

}  // namespace nsreg
