// Command-line front end: simulate, estimate-constants, verify, decompose.
#ifndef NSREG_CLI_HPP
#define NSREG_CLI_HPP

#include "nsreg/estimates.hpp"
#include "nsreg/monitor.hpp"
#include "nsreg/solver.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsreg::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kBlowUp = 2, kVerifyFailed = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value text.  '#' starts a comment line; blank lines are skipped.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& is, const std::string& source);
KeyValues read_key_values(const std::filesystem::path& path);

/// Everything `simulate` needs, resolved from keys.
struct SimulateSettings {
  SimConfig sim;
  double s = 6.0;
  RSchedule schedule = RSchedule::constant(1.0);
  ConstantEstimates constants;
  double c_star = 1.0;
  int snapshot_every = 0;
};

/// Keys accepted by `simulate` configs and manifests.
const std::vector<std::string>& simulate_keys();

/// Throws ConfigError naming every unknown or missing key.
SimulateSettings settings_from_keys(const KeyValues& kv);

/// Resolved settings as config text; fed back to `simulate --config` it
/// reproduces the run.
std::string settings_text(const SimulateSettings& s);

struct CheckResult {
  std::string name;
  double pass_fraction = 1.0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// All checks that `verify` performs on a monitor series.
std::vector<CheckResult> verify_records(std::span<const MonitorRecord> records, const ConstantEstimates& constants,
                                        double nu);

/// Entry point; argv[0] is the program name.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace nsreg::cli

#endif  // NSREG_CLI_HPP
