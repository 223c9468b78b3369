#include "nsreg/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nsreg;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("nsreg_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& f) const { return (path_ / f).string(); }

 private:
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nsreg");
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli::run(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const char* kSmallRun =
    "n=16\n"
    "nu=0.05\n"
    "dt=0.001\n"
    "t_end=0.02\n"
    "init=taylor_green_3d\n"
    "s=6\n"
    "R=1.5707963267948966\n";

// Config lines that are not comments (drops the timestamps of a manifest).
std::string config_part(const std::string& text) {
  std::istringstream is(text);
  std::string line, out;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') out += line + '\n';
  return out;
}

}  // namespace

TEST(Cli, VersionAndUsage) {
  EXPECT_EQ(invoke({"--version"}).code, 0);
  EXPECT_NE(invoke({"--version"}).out.find(cli::kToolVersion), std::string::npos);
  EXPECT_EQ(invoke({}).code, cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"simulate", "--help"}).code, 0);
}

TEST(Cli, MissingAndUnknownKeys) {
  TempDir d("keys");
  spit(d / "no_nu.cfg", "n=16\ndt=0.001\nt_end=0.01\ninit=taylor_green_2d\ns=6\nR=1\n");
  const Outcome a = invoke({"--out-dir", d / "a", "simulate", "--config", d / "no_nu.cfg"});
  EXPECT_EQ(a.code, cli::kUsage);
  EXPECT_NE(a.err.find("nu"), std::string::npos) << a.err;
  EXPECT_FALSE(fs::exists(d / "a/monitor.csv"));

  spit(d / "typo.cfg", std::string(kSmallRun) + "viscosity=0.1\n");
  const Outcome b = invoke({"--out-dir", d / "b", "simulate", "--config", d / "typo.cfg"});
  EXPECT_EQ(b.code, cli::kUsage);
  EXPECT_NE(b.err.find("viscosity"), std::string::npos) << b.err;

  spit(d / "bad.cfg", std::string(kSmallRun) + "dt=fast\n");
  EXPECT_EQ(invoke({"simulate", "--config", d / "bad.cfg"}).code, cli::kUsage);
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir d("flags");
  spit(d / "run.cfg", kSmallRun);
  ASSERT_EQ(invoke({"--out-dir", d / "o", "simulate", "--config", d / "run.cfg", "--t-end", "0.005"}).code, 0);
  EXPECT_EQ(read_monitor_csv(fs::path(d / "o/monitor.csv")).size(), 6u);
  EXPECT_NE(slurp(d / "o/manifest.txt").find("t_end=0.0050000000000000001"), std::string::npos);
}

TEST(Cli, SimulateVerifyAndReplay) {
  TempDir d("replay");
  spit(d / "run.cfg", std::string(kSmallRun) + "record_every=2\nsnapshot_every=10\n");
  const Outcome first = invoke({"--out-dir", d / "one", "simulate", "--config", d / "run.cfg"});
  ASSERT_EQ(first.code, 0) << first.err;
  const auto records = read_monitor_csv(fs::path(d / "one/monitor.csv"));
  EXPECT_EQ(records.size(), 11u);  // t = 0 and every second of 20 steps
  EXPECT_TRUE(fs::exists(d / "one/snapshots/u_00000010.nsrl"));
  EXPECT_TRUE(fs::exists(d / "one/snapshots/u_00000020.cfg"));

  const Outcome second = invoke({"--out-dir", d / "two", "simulate", "--config", d / "one/manifest.txt"});
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(slurp(d / "one/monitor.csv"), slurp(d / "two/monitor.csv"));
  EXPECT_EQ(config_part(slurp(d / "one/manifest.txt")), config_part(slurp(d / "two/manifest.txt")));

  const Outcome v = invoke({"--out-dir", d.path().string(), "verify", "--csv", d / "one/monitor.csv", "--manifest",
                            d / "one/manifest.txt"});
  EXPECT_EQ(v.code, 0) << v.out;
  const auto report = nlohmann::json::parse(slurp(d / "verify.json"));
  EXPECT_TRUE(report["pass"].get<bool>());
  EXPECT_EQ(report["records"].get<int>(), 11);
  EXPECT_EQ(report["nu"].get<double>(), 0.05);
  EXPECT_EQ(report["checks"].size(), 6u);

  // verify needs a viscosity
  const Outcome no_nu = invoke({"--out-dir", d.path().string(), "verify", "--csv", d / "one/monitor.csv"});
  EXPECT_EQ(no_nu.code, cli::kUsage);
  EXPECT_NE(no_nu.err.find("--nu"), std::string::npos);

  // snapshots decompose
  const Outcome dec = invoke({"--out-dir", d.path().string(), "decompose", "--snapshot",
                              d / "one/snapshots/u_00000010.nsrl", "--epsilon-cells", "4"});
  EXPECT_EQ(dec.code, 0) << dec.err;
}

TEST(Cli, VerifyRejectsTamperedSeries) {
  TempDir d("tamper");
  spit(d / "run.cfg", kSmallRun);
  ASSERT_EQ(invoke({"--out-dir", d.path().string(), "simulate", "--config", d / "run.cfg"}).code, 0);
  auto records = read_monitor_csv(fs::path(d / "monitor.csv"));
  for (auto& m : records) m.enstrophy = -m.enstrophy;
  write_monitor_csv(fs::path(d / "neg.csv"), records);
  const Outcome v = invoke({"--out-dir", d.path().string(), "verify", "--csv", d / "neg.csv", "--nu", "0.05"});
  EXPECT_EQ(v.code, cli::kVerifyFailed);
  EXPECT_FALSE(nlohmann::json::parse(slurp(d / "verify.json"))["pass"].get<bool>());

  std::string text = slurp(d / "monitor.csv");
  text.replace(text.find('\n') + 1, 1, "x");
  spit(d / "broken.csv", text);
  const Outcome bad = invoke({"verify", "--csv", d / "broken.csv", "--nu", "0.05"});
  EXPECT_EQ(bad.code, cli::kUsage);
  EXPECT_NE(bad.err.find("row 2, column 1"), std::string::npos) << bad.err;
}

TEST(Cli, EstimateConstants) {
  TempDir d("estimate");
  const std::vector<std::string> args{"--out-dir", d.path().string(), "estimate-constants", "--n",
                                      "16",        "--count",         "3",                  "--eps-cells",
                                      "2,4,8",     "--spectrum-peak", "2"};
  const Outcome a = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string first = slurp(d / "constants.txt");
  const ConstantEstimates c = read_constants_file(d / "constants.txt");
  EXPECT_EQ(c.c2, 0.375);
  EXPECT_EQ(c.ensemble_size, 3);
  EXPECT_GT(c.c0, 0.0);
  ASSERT_EQ(invoke(args).code, 0);
  EXPECT_EQ(slurp(d / "constants.txt"), first);

  EXPECT_EQ(invoke({"--out-dir", d.path().string(), "estimate-constants", "--count", "0"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"--out-dir", d.path().string(), "estimate-constants", "--s", "3"}).code, cli::kUsage);

  // a simulation with these constants, checked against the same file
  spit(d / "run.cfg", std::string(kSmallRun) + "constants=" + (d / "constants.txt") + "\n");
  ASSERT_EQ(invoke({"--out-dir", d / "run", "simulate", "--config", d / "run.cfg"}).code, 0);
  EXPECT_EQ(invoke({"--out-dir", d / "run", "verify", "--csv", d / "run/monitor.csv", "--manifest",
                    d / "run/manifest.txt"})
                .code,
            0);
  spit(d / "s9.cfg", std::string(kSmallRun) + "s=9\nconstants=" + (d / "constants.txt") + "\n");
  EXPECT_EQ(invoke({"--out-dir", d / "s9", "simulate", "--config", d / "s9.cfg"}).code, cli::kUsage);
}

TEST(Cli, DecomposeRandomField) {
  TempDir d("decompose");
  const Outcome r = invoke({"--out-dir", d.path().string(), "--seed", "5", "decompose", "--n", "32",
                            "--epsilon-cells", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(d / "decomposition.json"));
  EXPECT_EQ(j["n"].get<int>(), 32);
  EXPECT_EQ(j["cubes"].size(), 64u);
  EXPECT_LT(j["identity"]["relative_error"].get<double>(), 1e-10);
  EXPECT_LE(j["c_shift"].get<double>(), 12.0);
  for (const auto& axis : j["shifts"])
    for (const auto& s : axis) EXPECT_LT(s.get<int>(), 4);
  EXPECT_EQ(invoke({"decompose", "--n", "32", "--epsilon-cells", "6"}).code, cli::kUsage);
}
