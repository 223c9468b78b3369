#include "nsreg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace nsreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
    if (!os.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

struct Globals {
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::map<std::string, std::string> flags;
};

int cmd_simulate(const SimulateArgs& args, const Globals& g) {
  KeyValues kv;
  if (!args.config.empty()) kv = read_key_values(args.config);
  for (const auto& [k, v] : args.flags) kv[k] = v;
  if (g.seed) kv["seed"] = std::to_string(*g.seed);
  const SimulateSettings settings = settings_from_keys(kv);

  const fs::path out = g.out_dir;
  fs::create_directories(out);
  const std::string started = utc_now();
  const std::string config_text = settings_text(settings);
  const NormParams params = make_norm_params(settings.s, settings.schedule(0.0), settings.sim.grid);

  StepHook hook;
  if (settings.snapshot_every > 0) {
    hook = [&](const Integrator& integ) {
      if (integ.steps_taken() % settings.snapshot_every != 0) return;
      char name[32];
      std::snprintf(name, sizeof name, "u_%08ld", integ.steps_taken());
      const fs::path base = out / "snapshots" / name;
      fs::create_directories(base.parent_path());
      write_snapshot(fs::path(base).replace_extension(".nsrl"), integ.velocity(), integ.time());
      write_text_atomic(fs::path(base).replace_extension(".cfg"),
                        config_text + "# step=" + std::to_string(integ.steps_taken()) +
                            " time=" + format_double(integ.time()) + '\n');
    };
  }

  const RunResult result =
      run(settings.sim, make_initial_field(settings.sim), settings.schedule, params, settings.constants, hook);
  write_monitor_csv(out / "monitor.csv", result.records);

  std::size_t pass = 0, fail = 0;
  for (const auto& m : result.records) {
    if (!m.diff_ineq_ok) continue;
    (*m.diff_ineq_ok ? pass : fail) += 1;
  }
  const auto small = smallness_time(result.records, settings.sim.nu, settings.c_star);
  std::ostringstream manifest;
  manifest << "# nsreg " << kToolVersion << " simulate manifest\n"
           << config_text << "# started=" << started << '\n'
           << "# finished=" << utc_now() << '\n'
           << "# records=" << result.records.size() << '\n'
           << "# status=" << (result.blew_up ? "blowup" : "ok")
           << " last_valid_time=" << format_double(result.last_valid_time) << '\n'
           << "# differential_inequality pass=" << pass << " fail=" << fail << '\n'
           << "# smallness_time=" << (small ? format_double(*small) : std::string("none")) << '\n';
  write_text_atomic(out / "manifest.txt", manifest.str());

  if (result.blew_up) {
    std::cerr << "simulate: blow-up guard tripped: " << result.message
              << " (last valid time " << format_double(result.last_valid_time) << ")\n";
    return kBlowUp;
  }
  std::cout << "wrote " << result.records.size() << " records to " << (out / "monitor.csv").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// estimate-constants

struct EstimateArgs {
  int n = 32;
  double s = 6.0;
  int count = 50;
  std::optional<std::uint64_t> seed_base;
  std::string eps_cells = "2,4,8,16";
  double spectrum_peak = 3.0;
  int holdout = 0;
  std::string output = "constants.txt";
};

struct HoldoutSummary {
  std::size_t pairs = 0, passed = 0;
  double worst = 0.0;  // max ratio / c
};

HoldoutSummary holdout_summary(const std::vector<double>& ratios, double c) {
  HoldoutSummary h;
  for (const double r : ratios) {
    if (std::isnan(r)) continue;  // 0/0 pairs satisfy any bound
    ++h.pairs;
    const double m = r / c;
    h.worst = std::max(h.worst, m);
    if (m <= 1.05) ++h.passed;
  }
  return h;
}

int cmd_estimate(const EstimateArgs& a, const Globals& g) {
  if (a.count <= 0) throw ConfigError("--count must be positive (got " + std::to_string(a.count) + ")");
  EnsembleSpec spec;
  spec.n = a.n;
  spec.s = a.s;
  spec.count = a.count;
  spec.seed_base = a.seed_base ? *a.seed_base : (g.seed ? *g.seed : 1);
  spec.eps_cells = parse_int_list(a.eps_cells);
  spec.spectrum_peak = a.spectrum_peak;
  spec.threads = std::max(1, g.threads);
  if (!(spec.s > 3.0)) throw ConfigError("--s must exceed 3");
  make_grid(spec.n);

  const ConstantEstimates c = estimate_constants(spec);
  const fs::path path = fs::path(g.out_dir) / a.output;
  write_constants_file(path, c);

  std::printf("%-10s %24s\n", "constant", "value");
  std::printf("%-10s %24.17g\n", "c0", c.c0);
  std::printf("%-10s %24.17g\n", "c_gn", c.c_gn);
  std::printf("%-10s %24.17g\n", "c1", c.c1);
  std::printf("%-10s %24.17g\n", "c2", c.c2);
  std::printf("%-10s %24.17g\n", "c_shift", c.c_shift);
  std::printf("ensemble: n=%d s=%g seeds %llu..%llu, eps cells %s\n", spec.n, spec.s,
              static_cast<unsigned long long>(spec.seed_base),
              static_cast<unsigned long long>(spec.seed_base + spec.count - 1), a.eps_cells.c_str());

  int status = kOk;
  if (a.holdout > 0) {
    EnsembleSpec held = spec;
    held.seed_base = spec.seed_base + spec.count;
    held.count = a.holdout;
    const EnsembleRatios r = ensemble_ratios(held);
    const auto main = holdout_summary(r.main, c.c0);
    const auto gn = holdout_summary(r.gn, c.c_gn);
    std::printf("held-out seeds %llu..%llu\n", static_cast<unsigned long long>(held.seed_base),
                static_cast<unsigned long long>(held.seed_base + held.count - 1));
    std::printf("%-10s %8s %8s %14s\n", "check", "pass", "pairs", "worst/c");
    std::printf("%-10s %8zu %8zu %14.6g\n", "main", main.passed, main.pairs, main.worst);
    std::printf("%-10s %8zu %8zu %14.6g\n", "gn", gn.passed, gn.pairs, gn.worst);
    if (main.passed != main.pairs || gn.passed != gn.pairs) status = kVerifyFailed;
  }
  std::printf("wrote %s\n", path.string().c_str());
  return status;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string csv;
  std::string constants;
  std::string manifest;
  std::optional<double> nu;
  std::optional<double> s;
  std::optional<double> c_star;
  std::string report = "verify.json";
};

json check_json(const CheckResult& c) {
  return {{"name", c.name},
          {"pass_fraction", c.pass_fraction},
          {"worst_margin", c.worst_margin},
          {"tolerance", c.tolerance},
          {"pass", c.pass}};
}

int cmd_verify(const VerifyArgs& a, const Globals& g) {
  double nu = NAN, s = NAN, c_star = 1.0;
  ConstantEstimates constants;
  bool have_constants = false;
  if (!a.manifest.empty()) {
    const SimulateSettings m = settings_from_keys(read_key_values(a.manifest));
    nu = m.sim.nu;
    s = m.s;
    c_star = m.c_star;
    constants = m.constants;
    have_constants = true;
  }
  if (!a.constants.empty()) {
    constants = read_constants_file(a.constants);
    have_constants = true;
  }
  if (a.nu) nu = *a.nu;
  if (a.s) s = *a.s;
  if (a.c_star) c_star = *a.c_star;
  if (std::isnan(nu)) throw ConfigError("verify needs the viscosity: pass --nu or --manifest");
  if (!have_constants) constants = derive_constants(1.0, 1.0, 0.0, std::isnan(s) ? 6.0 : s);
  if (!std::isnan(s) && std::abs(s - constants.s) > 1e-12)
    throw ConfigError("constants were estimated for s = " + format_double(constants.s) + ", verify asked for s = " +
                      format_double(s));

  const std::vector<MonitorRecord> records = read_monitor_csv(fs::path(a.csv));
  const std::vector<CheckResult> checks = verify_records(records, constants, nu);

  json report;
  report["tool_version"] = kToolVersion;
  report["csv"] = a.csv;
  report["records"] = records.size();
  report["nu"] = nu;
  report["s"] = constants.s;
  report["checks"] = json::array();
  bool all = true;
  for (const auto& c : checks) {
    report["checks"].push_back(check_json(c));
    all = all && c.pass;
  }
  const auto small = smallness_time(records, nu, c_star);
  report["info"] = {{"name", "smallness_time"},
                    {"c_star", c_star},
                    {"first_time", small ? json(*small) : json(nullptr)}};
  report["pass"] = all;

  const std::string text = report.dump(2) + '\n';
  write_text_atomic(fs::path(g.out_dir) / a.report, text);
  std::cout << text;
  return all ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string snapshot;
  int component = 0;
  int n = 32;
  double spectrum_peak = 3.0;
  int epsilon_cells = 8;
  std::string output = "decomposition.json";
};

json range_json(const CellRange& r) {
  return {{"origin", r.origin}, {"extent", r.extent}};
}

int cmd_decompose(const DecomposeArgs& a, const Globals& g) {
  ScalarField w;
  std::string source;
  if (!a.snapshot.empty()) {
    const Snapshot snap = read_snapshot(a.snapshot);
    if (a.component < 0 || a.component >= int(snap.components.size()))
      throw ConfigError("snapshot has " + std::to_string(snap.components.size()) + " component(s), asked for " +
                        std::to_string(a.component));
    w = ScalarField(snap.grid, snap.components[a.component]);
    source = a.snapshot;
  } else {
    const std::uint64_t seed = g.seed ? *g.seed : 1;
    w = random_scalar_field(make_grid(a.n), a.spectrum_peak, seed);
    source = "random scalar field, seed " + std::to_string(seed);
  }
  const double eps = a.epsilon_cells * w.grid.spacing();
  const CubeDecomposition d = build_shifted_decomposition(w, eps);
  const ScalarField dw = gradient(w).component(0);
  const CubeIdentity id = decomposition_identity(dw, d);

  json j;
  j["source"] = source;
  j["n"] = w.grid.n;
  j["box_length"] = w.grid.box_length;
  j["epsilon"] = d.epsilon;
  j["cells"] = d.cells;
  j["shifts"] = {d.shifts[0], d.shifts[1], d.shifts[2]};
  j["c_shift"] = d.c_shift;
  j["identity"] = {{"direct", id.direct},
                   {"reconstructed", id.reconstructed},
                   {"scale", id.scale},
                   {"relative_error", id.relative_error()}};
  j["cubes"] = json::array();
  for (const auto& c : d.cubes)
    j["cubes"].push_back({{"cells", range_json(c.cells)},
                          {"enlarged", range_json(c.enlarged)},
                          {"boundary_integral", c.boundary_integral},
                          {"volume_integral", c.volume_integral},
                          {"ratio", c.ratio}});
  const fs::path path = fs::path(g.out_dir) / a.output;
  write_text_atomic(path, j.dump(2) + '\n');
  std::cout << "wrote " << d.cubes.size() << " cubes, c_shift " << format_double(d.c_shift) << " to "
            << path.string() << '\n';
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CheckResult> verify_records(std::span<const MonitorRecord> records, const ConstantEstimates& constants,
                                        double nu) {
  std::vector<CheckResult> out;
  const std::size_t n = records.size();

  {  // energy ledger, per record
    CheckResult c{"energy_ledger", 1.0, 0.0, 1e-6, true};
    if (n > 0) {
      const double e0 = records.front().energy;
      const double scale = e0 > 0.0 ? e0 : 1.0;
      double dissipated = 0.0;
      std::size_t ok = 1;
      for (std::size_t i = 1; i < n; ++i) {
        dissipated += (records[i].t - records[i - 1].t) * (records[i].enstrophy + records[i - 1].enstrophy);
        const double r = std::abs(e0 - records[i].energy - nu * dissipated) / scale;
        c.worst_margin = std::max(c.worst_margin, std::isnan(r) ? INFINITY : r);
        if (r <= c.tolerance) ++ok;
      }
      c.pass_fraction = double(ok) / double(n);
    }
    c.pass = c.pass_fraction == 1.0;
    out.push_back(c);
  }

  {  // enstrophy identity at uniformly spaced interior records
    CheckResult c{"enstrophy_identity", 1.0, 0.0, 1e-3, true};
    const std::vector<double> res = enstrophy_identity_series(records, nu);
    std::size_t evaluated = 0, ok = 0;
    for (const double r : res) {
      if (std::isnan(r)) continue;
      ++evaluated;
      c.worst_margin = std::max(c.worst_margin, r);
      if (r <= c.tolerance) ++ok;
    }
    c.pass_fraction = evaluated ? double(ok) / double(evaluated) : 1.0;
    c.pass = ok == evaluated;
    out.push_back(c);
  }

  {  // differential inequality: at least 99% of interior records
    CheckResult c{"differential_inequality", 1.0, 0.0, 1e-3, true};
    if (n >= 3) {
      const InequalityReport rep = check_differential_inequality(records, constants, nu);
      c.pass_fraction = rep.pass_fraction;
      c.worst_margin = rep.worst_margin;
    }
    c.pass = c.pass_fraction >= 0.99;
    out.push_back(c);
  }

  {  // Gronwall bound recomputed from the series
    CheckResult c{"gronwall_bound", 1.0, 0.0, 1e-12, true};
    if (n > 0 && records.front().t == 0.0) {
      const BoundSeries b = gronwall_bound(records, constants, nu);
      std::size_t ok = 0;
      bool monotone = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double bound = b.normalized[i];
        const double excess = bound > 0.0 ? (records[i].enstrophy - bound) / bound : records[i].enstrophy;
        c.worst_margin = i == 0 ? excess : std::max(c.worst_margin, excess);
        if (records[i].enstrophy <= bound * (1.0 + c.tolerance)) ++ok;
        if (i > 0 && !(bound >= b.normalized[i - 1])) monotone = false;
      }
      c.pass_fraction = double(ok) / double(n);
      c.pass = ok == n && monotone;
    } else if (n > 0) {
      c.pass_fraction = 0.0;
      c.worst_margin = INFINITY;
      c.pass = false;
    }
    out.push_back(c);
  }

  {  // |T| <= 1.05 c0 ||u||_{L^s_R} (eps^{-3/s-1} H + eps^{1-3/s} P); eps <= R makes the R-norm an upper bound
    CheckResult c{"main_estimate", 1.0, 0.0, 1.05, true};
    const double s = constants.s;
    std::size_t ok = 0;
    for (const auto& m : records) {
      const double rhs = constants.c0 * m.loc_norm *
                         (std::pow(m.epsilon, -3.0 / s - 1.0) * m.enstrophy +
                          std::pow(m.epsilon, 1.0 - 3.0 / s) * m.palinstrophy);
      const double lhs = std::abs(m.trilinear);
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
      c.worst_margin = std::max(c.worst_margin, ratio);
      if (ratio <= c.tolerance) ++ok;
    }
    c.pass_fraction = n ? double(ok) / double(n) : 1.0;
    c.pass = ok == n;
    out.push_back(c);
  }

  {  // epsilon never exceeds R
    CheckResult c{"epsilon_rule", 1.0, n ? -INFINITY : 0.0, 0.0, true};
    std::size_t ok = 0;
    for (const auto& m : records) {
      const double excess = m.r_of_t > 0.0 ? (m.epsilon - m.r_of_t) / m.r_of_t : INFINITY;
      c.worst_margin = std::max(c.worst_margin, excess);
      if (m.epsilon > 0.0 && excess <= c.tolerance) ++ok;
    }
    c.pass_fraction = n ? double(ok) / double(n) : 1.0;
    c.pass = ok == n;
    out.push_back(c);
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Regularity diagnostics for the periodic Navier-Stokes equations", "nsreg"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for ensemble commands")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation and write monitor.csv and manifest.txt");
  simulate->fallthrough();
  simulate->add_option("--config", sim.config, "key=value config file (manifests are accepted)");
  for (const auto& key : simulate_keys()) {
    if (key == "seed") continue;
    simulate->add_option_function<std::string>(
        flag_name(key), [&sim, key](const std::string& v) { sim.flags[key] = v; }, "config key " + key);
  }

  EstimateArgs est;
  std::uint64_t seed_base = 0;
  auto* estimate = app.add_subcommand("estimate-constants", "Estimate inequality constants over a random ensemble");
  estimate->fallthrough();
  estimate->add_option("--n", est.n, "Grid size")->capture_default_str();
  estimate->add_option("--s", est.s, "Lebesgue exponent")->capture_default_str();
  estimate->add_option("--count", est.count, "Ensemble size")->capture_default_str();
  auto* seed_base_opt = estimate->add_option("--seed-base", seed_base, "First seed (default --seed or 1)");
  estimate->add_option("--eps-cells", est.eps_cells, "Comma-separated window sizes in cells")->capture_default_str();
  estimate->add_option("--spectrum-peak", est.spectrum_peak, "Peak wavenumber")->capture_default_str();
  estimate->add_option("--holdout", est.holdout, "Members of a disjoint held-out ensemble to test");
  estimate->add_option("--output", est.output, "File name inside --out-dir")->capture_default_str();

  VerifyArgs ver;
  double nu = 0.0, s = 0.0, c_star = 0.0;
  auto* verify = app.add_subcommand("verify", "Check a monitor CSV against the inequalities");
  verify->fallthrough();
  verify->add_option("--csv", ver.csv, "Monitor CSV")->required()->check(CLI::ExistingFile);
  verify->add_option("--constants", ver.constants, "Constants file")->check(CLI::ExistingFile);
  verify->add_option("--manifest", ver.manifest, "Manifest of the run (supplies nu, s and constants)")
      ->check(CLI::ExistingFile);
  auto* nu_opt = verify->add_option("--nu", nu, "Viscosity");
  auto* s_opt = verify->add_option("--s", s, "Lebesgue exponent");
  auto* c_star_opt = verify->add_option("--c-star", c_star, "Smallness threshold constant");
  verify->add_option("--report", ver.report, "Report file name inside --out-dir")->capture_default_str();

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "Dump the edge-shifted cube decomposition of a scalar field");
  decompose->fallthrough();
  decompose->add_option("--snapshot", dec.snapshot, "Snapshot file (default: random field)")
      ->check(CLI::ExistingFile);
  decompose->add_option("--component", dec.component, "Snapshot component")->capture_default_str();
  decompose->add_option("--n", dec.n, "Grid size of the random field")->capture_default_str();
  decompose->add_option("--spectrum-peak", dec.spectrum_peak, "Peak wavenumber of the random field")
      ->capture_default_str();
  decompose->add_option("--epsilon-cells", dec.epsilon_cells, "Cube side in cells")->capture_default_str();
  decompose->add_option("--output", dec.output, "File name inside --out-dir")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (seed_opt->count()) g.seed = seed;
  if (seed_base_opt->count()) est.seed_base = seed_base;
  if (nu_opt->count()) ver.nu = nu;
  if (s_opt->count()) ver.s = s;
  if (c_star_opt->count()) ver.c_star = c_star;

  try {
    if (simulate->parsed()) return cmd_simulate(sim, g);
    if (estimate->parsed()) return cmd_estimate(est, g);
    if (verify->parsed()) return cmd_verify(ver, g);
    if (decompose->parsed()) return cmd_decompose(dec, g);
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << " (row " << e.row() << ", column " << e.column() << ")\n";
    return kUsage;
  } catch (const BlowUpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace nsreg::cli
