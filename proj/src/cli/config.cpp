#include "nsreg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace nsreg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const KeyValues& kv, const std::string& key) {
  const std::string& v = kv.at(key);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("bad value for key '" + key + "': '" + v + "' is not a number");
  return x;
}

long long to_integer(const KeyValues& kv, const std::string& key) {
  const std::string& v = kv.at(key);
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("bad value for key '" + key + "': '" + v + "' is not an integer");
  return x;
}

bool to_bool(const KeyValues& kv, const std::string& key) {
  const std::string& v = kv.at(key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("bad value for key '" + key + "': '" + v + "' is not a boolean");
}

}  // namespace

KeyValues parse_key_values(std::istream& is, const std::string& source) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse_key_values(is, path.string());
}

const std::vector<std::string>& simulate_keys() {
  static const std::vector<std::string> keys{
      "n",  "box_length", "nu",     "dt",         "t_end", "dealias",   "init", "spectrum_peak",
      "seed", "record_every", "s",  "R",          "schedule", "R_rate", "R_exponent", "c0",
      "c_gn", "c_shift",  "constants", "c_star", "snapshot_every"};
  return keys;
}

SimulateSettings settings_from_keys(const KeyValues& kv) {
  const auto& known = simulate_keys();
  std::vector<std::string> unknown, missing;
  for (const auto& [k, v] : kv)
    if (std::find(known.begin(), known.end(), k) == known.end()) unknown.push_back(k);
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  for (const char* k : {"n", "nu", "dt", "t_end", "init", "s", "R"})
    if (!kv.count(k)) missing.push_back(k);
  if (!missing.empty()) {
    std::string msg = "missing required key(s):";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg);
  }

  SimulateSettings out;
  auto& sim = out.sim;
  try {
    const double box = kv.count("box_length") ? to_double(kv, "box_length") : 2.0 * std::numbers::pi;
    sim.grid = make_grid(static_cast<int>(to_integer(kv, "n")), box);
    sim.nu = to_double(kv, "nu");
    sim.dt = to_double(kv, "dt");
    sim.t_end = to_double(kv, "t_end");
    if (kv.count("dealias")) sim.dealias = to_bool(kv, "dealias");
    sim.init = parse_init_kind(kv.at("init"));
    if (kv.count("spectrum_peak")) sim.spectrum_peak = to_double(kv, "spectrum_peak");
    if (kv.count("seed")) sim.rng_seed = static_cast<std::uint64_t>(to_integer(kv, "seed"));
    if (kv.count("record_every")) sim.record_every = static_cast<int>(to_integer(kv, "record_every"));
    sim.validate();

    out.s = to_double(kv, "s");
    make_norm_params(out.s, to_double(kv, "R"), sim.grid);
    const double r0 = to_double(kv, "R");
    const auto kind = kv.count("schedule") ? parse_schedule_kind(kv.at("schedule")) : RSchedule::Kind::constant;
    switch (kind) {
      case RSchedule::Kind::constant:
        out.schedule = RSchedule::constant(r0);
        break;
      case RSchedule::Kind::linear:
        out.schedule = RSchedule::linear(r0, kv.count("R_rate") ? to_double(kv, "R_rate") : 0.0);
        break;
      case RSchedule::Kind::power:
        out.schedule = RSchedule::power(r0, kv.count("R_exponent") ? to_double(kv, "R_exponent") : 0.0);
        break;
      case RSchedule::Kind::sampled:
        throw ConfigError("sampled R schedules are only available through the library");
    }

    ConstantEstimates c;
    bool from_file = false;
    if (kv.count("constants")) {
      c = read_constants_file(kv.at("constants"));
      from_file = true;
      if (std::abs(c.s - out.s) > 1e-12)
        throw ConfigError("constants file was estimated for s = " + format_double(c.s) + ", run uses s = " +
                          format_double(out.s));
    }
    const double c0 = kv.count("c0") ? to_double(kv, "c0") : (from_file ? c.c0 : 1.0);
    const double c_gn = kv.count("c_gn") ? to_double(kv, "c_gn") : (from_file ? c.c_gn : 1.0);
    const double c_shift = kv.count("c_shift") ? to_double(kv, "c_shift") : (from_file ? c.c_shift : 0.0);
    ConstantEstimates derived = derive_constants(c0, c_gn, c_shift, out.s);
    derived.grid = c.grid;
    derived.seed_base = c.seed_base;
    derived.ensemble_size = c.ensemble_size;
    derived.spectrum_peak = c.spectrum_peak;
    derived.eps_cells = c.eps_cells;
    derived.note = from_file ? c.note : "unit default";
    out.constants = derived;
    if (!(out.constants.c0 > 0.0)) throw ConfigError("c0 must be positive");

    if (kv.count("c_star")) out.c_star = to_double(kv, "c_star");
    if (kv.count("snapshot_every")) out.snapshot_every = static_cast<int>(to_integer(kv, "snapshot_every"));
    if (out.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return out;
}

std::string settings_text(const SimulateSettings& s) {
  std::ostringstream os;
  const auto& sim = s.sim;
  os << "n=" << sim.grid.n << '\n'
     << "box_length=" << format_double(sim.grid.box_length) << '\n'
     << "nu=" << format_double(sim.nu) << '\n'
     << "dt=" << format_double(sim.dt) << '\n'
     << "t_end=" << format_double(sim.t_end) << '\n'
     << "dealias=" << (sim.dealias ? "true" : "false") << '\n'
     << "init=" << to_string(sim.init) << '\n'
     << "spectrum_peak=" << format_double(sim.spectrum_peak) << '\n'
     << "seed=" << sim.rng_seed << '\n'
     << "record_every=" << sim.record_every << '\n'
     << "s=" << format_double(s.s) << '\n'
     << "R=" << format_double(s.schedule.r0()) << '\n'
     << "schedule=" << to_string(s.schedule.kind()) << '\n';
  if (s.schedule.kind() == RSchedule::Kind::linear) os << "R_rate=" << format_double(s.schedule.parameter()) << '\n';
  if (s.schedule.kind() == RSchedule::Kind::power)
    os << "R_exponent=" << format_double(s.schedule.parameter()) << '\n';
  os << "c0=" << format_double(s.constants.c0) << '\n'
     << "c_gn=" << format_double(s.constants.c_gn) << '\n'
     << "c_shift=" << format_double(s.constants.c_shift) << '\n'
     << "c_star=" << format_double(s.c_star) << '\n'
     << "snapshot_every=" << s.snapshot_every << '\n';
  const auto& c = s.constants;
  os << "# constants: " << c.note << ", grid=" << c.grid << ", seeds=" << c.seed_base << "+" << c.ensemble_size
     << ", c1=" << format_double(c.c1) << ", c2=" << format_double(c.c2) << '\n';
  return os.str();
}

}  // namespace nsreg::cli
