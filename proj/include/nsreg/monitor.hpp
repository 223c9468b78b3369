// Diagnostics along a trajectory: per-record quantities, the epsilon rule,
// the differential inequality for the enstrophy, the Gronwall bound, the
// energy ledger and the smallness time.
#ifndef NSREG_MONITOR_HPP
#define NSREG_MONITOR_HPP

#include "nsreg/estimates.hpp"
#include "nsreg/field.hpp"
#include "nsreg/norms.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nsreg {

/// Window side R(t).
///   constant: R0
///   linear:   R0 * (1 + rate * t)
///   power:    R0 * t^exponent
///   sampled:  piecewise-linear through (t_i, R_i), held constant outside
class RSchedule {
 public:
  enum class Kind { constant, linear, power, sampled };

  static RSchedule constant(double r0);
  static RSchedule linear(double r0, double rate);
  static RSchedule power(double r0, double exponent);
  static RSchedule sampled(std::vector<double> times, std::vector<double> radii);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  double r0() const { return r0_; }
  double parameter() const { return param_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::constant;
  double r0_ = 1.0;
  double param_ = 0.0;
  std::vector<double> times_, radii_;
};

std::string_view to_string(RSchedule::Kind k);
RSchedule::Kind parse_schedule_kind(std::string_view s);

/// Trapezoidal integral of R^-2 over the sample times, from the raw schedule
/// (admissibility of R itself) or from the cell-snapped radius the monitor
/// actually uses.
ScheduleIntegral r_schedule_integral(const RSchedule& schedule, std::span<const double> times);
ScheduleIntegral r_schedule_integral(const RSchedule& schedule, std::span<const double> times, const GridSpec& grid);

struct MonitorRecord {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double palinstrophy = 0.0;
  double trilinear = 0.0;
  double r_of_t = 0.0;   // effective R(t)
  double loc_norm = 0.0; // ||u||_{L^s_{R(t)}}
  double epsilon = 0.0;
  double bound_normalized = 0.0;  // bound on H
  double bound_stated = 0.0;      // bound on ||grad u||
  std::optional<bool> diff_ineq_ok;  // empty at the endpoints
  double smallness = 0.0;  // ||u|| ||grad u||
};

/// min{R, (c0 * loc_norm)^{-s/(s-3)}} before snapping; R when loc_norm = 0.
double epsilon_rule_raw(double loc_norm, double r_now, double c0, double s);

/// Raw rule snapped down to a power-of-two number of cells (at least one).
double epsilon_rule(double loc_norm, double r_now, double c0, double s, const GridSpec& grid);

/// Instantaneous record (bounds and verdict are filled by finalize_records).
MonitorRecord observe(const SpectralVector& uh, const VectorField& u, double t, const RSchedule& schedule, double s,
                      const ConstantEstimates& constants);
MonitorRecord observe(const VectorField& u, double t, const RSchedule& schedule, double s,
                      const ConstantEstimates& constants);

struct InequalityReport {
  std::vector<std::optional<bool>> verdicts;  // one per record
  double pass_fraction = 1.0;                 // over interior records
  double worst_margin = 0.0;                  // max (H' - RHS) / max(|H'|, RHS)
};

/// H'(t) <= (2 C1 l^{2s/(s-3)} + 2 C2 R^-2) H at every interior record, H' by
/// central difference, with 1e-3 relative tolerance.
InequalityReport check_differential_inequality(std::span<const MonitorRecord> records,
                                               const ConstantEstimates& constants, double nu);

struct BoundSeries {
  std::vector<double> normalized;  // H(0) exp{2 C1 int l^r + 2 C2 int R^-2}
  std::vector<double> stated;      // ||grad u(0)|| exp{C1 nu^{1-r} int l^r + C2 nu int R^-2}
};

/// Throws unless the first record is at t = 0.
BoundSeries gronwall_bound(std::span<const MonitorRecord> records, const ConstantEstimates& constants, double nu);

/// First record time with ||u|| ||grad u|| <= c_star nu^2.
std::optional<double> smallness_time(std::span<const MonitorRecord> records, double nu, double c_star);

/// Max over records of |E(0) - E(t) - 2 nu int_0^t H| / E(0) (absolute when
/// E(0) = 0).
double energy_ledger_residual(std::span<const MonitorRecord> records, double nu);

/// Enstrophy identity residual at every interior record; NaN where the
/// three-record window is not uniformly spaced.
std::vector<double> enstrophy_identity_series(std::span<const MonitorRecord> records, double nu);

/// Fills bounds and differential-inequality verdicts.
void finalize_records(std::vector<MonitorRecord>& records, const ConstantEstimates& constants, double nu);

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kMonitorCsvHeader = "t,E,H,P,T3,R,locnorm,eps,bound_norm,bound_stated,diffineq,smallness";

/// diffineq column: 1 pass, 0 fail, -1 not evaluated.
void write_monitor_csv(std::ostream& os, std::span<const MonitorRecord> records);
void write_monitor_csv(const std::filesystem::path& path, std::span<const MonitorRecord> records);

/// Throws CsvError with the 1-based row/column of the first problem.
std::vector<MonitorRecord> read_monitor_csv(std::istream& is);
std::vector<MonitorRecord> read_monitor_csv(const std::filesystem::path& path);

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_, column_;
};

/// Decimal with 17 significant digits (round-trips every double).
std::string format_double(double x);

}  // namespace nsreg

#endif  // NSREG_MONITOR_HPP
