#include "nsreg/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsreg {

RSchedule RSchedule::constant(double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("R schedule: R0 must be positive");
  RSchedule s;
  s.kind_ = Kind::constant;
  s.r0_ = r0;
  return s;
}

RSchedule RSchedule::linear(double r0, double rate) {
  RSchedule s = constant(r0);
  s.kind_ = Kind::linear;
  s.param_ = rate;
  return s;
}

RSchedule RSchedule::power(double r0, double exponent) {
  RSchedule s = constant(r0);
  s.kind_ = Kind::power;
  s.param_ = exponent;
  return s;
}

RSchedule RSchedule::sampled(std::vector<double> times, std::vector<double> radii) {
  if (times.empty() || times.size() != radii.size())
    throw std::invalid_argument("R schedule: sampled schedule needs matching, non-empty time and radius lists");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("R schedule: sample times must increase");
  RSchedule s;
  s.kind_ = Kind::sampled;
  s.r0_ = radii.front();
  s.times_ = std::move(times);
  s.radii_ = std::move(radii);
  return s;
}

double RSchedule::operator()(double t) const {
  switch (kind_) {
    case Kind::constant:
      return r0_;
    case Kind::linear:
      return r0_ * (1.0 + param_ * t);
    case Kind::power:
      return r0_ * std::pow(t, param_);
    case Kind::sampled: {
      if (t <= times_.front()) return radii_.front();
      if (t >= times_.back()) return radii_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const auto i = std::size_t(it - times_.begin());
      const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
      return (1.0 - w) * radii_[i - 1] + w * radii_[i];
    }
  }
  return r0_;
}

std::string RSchedule::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " R0=" << format_double(r0_);
  if (kind_ == Kind::linear) os << " rate=" << format_double(param_);
  if (kind_ == Kind::power) os << " exponent=" << format_double(param_);
  if (kind_ == Kind::sampled) os << " samples=" << times_.size();
  return os.str();
}

std::string_view to_string(RSchedule::Kind k) {
  switch (k) {
    case RSchedule::Kind::constant:
      return "constant";
    case RSchedule::Kind::linear:
      return "linear";
    case RSchedule::Kind::power:
      return "power";
    case RSchedule::Kind::sampled:
      return "sampled";
  }
  return "unknown";
}

RSchedule::Kind parse_schedule_kind(std::string_view s) {
  if (s == "constant") return RSchedule::Kind::constant;
  if (s == "linear") return RSchedule::Kind::linear;
  if (s == "power") return RSchedule::Kind::power;
  if (s == "sampled") return RSchedule::Kind::sampled;
  throw std::invalid_argument("unknown R schedule '" + std::string(s) + "'");
}

ScheduleIntegral r_schedule_integral(const RSchedule& schedule, std::span<const double> times) {
  std::vector<double> radii;
  radii.reserve(times.size());
  for (const double t : times) radii.push_back(schedule(t));
  return r_schedule_integral(times, radii);
}

ScheduleIntegral r_schedule_integral(const RSchedule& schedule, std::span<const double> times, const GridSpec& grid) {
  std::vector<double> radii;
  radii.reserve(times.size());
  for (const double t : times) {
    const double r = schedule(t);
    if (!(r > 0.0)) throw std::invalid_argument("schedule integral: non-positive R at t = " + std::to_string(t));
    radii.push_back(snap_window_cells(r, grid) * grid.spacing());
  }
  return r_schedule_integral(times, radii);
}

}  // namespace nsreg
