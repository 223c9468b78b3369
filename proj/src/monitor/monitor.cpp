#include "nsreg/monitor.hpp"

#include <bit>
#include <cmath>

namespace nsreg {

double epsilon_rule_raw(double loc_norm, double r_now, double c0, double s) {
  if (!(c0 > 0.0)) throw std::invalid_argument("epsilon rule: c0 must be positive");
  if (!(s > 3.0)) throw std::invalid_argument("epsilon rule: s must exceed 3");
  if (!(r_now > 0.0)) throw std::invalid_argument("epsilon rule: R must be positive");
  if (loc_norm <= 0.0) return r_now;
  return std::min(r_now, std::pow(c0 * loc_norm, -s / (s - 3.0)));
}

double epsilon_rule(double loc_norm, double r_now, double c0, double s, const GridSpec& grid) {
  const double raw = epsilon_rule_raw(loc_norm, r_now, c0, s);
  const double cells = raw / grid.spacing() * (1.0 + 1e-12);
  if (cells < 2.0) return grid.spacing();
  const auto whole = static_cast<unsigned long>(std::min(cells, double(grid.n)));
  return double(std::bit_floor(whole)) * grid.spacing();
}

MonitorRecord observe(const SpectralVector& uh, const VectorField& u, double t, const RSchedule& schedule, double s,
                      const ConstantEstimates& constants) {
  const GridSpec& g = u.grid;
  const double r_raw = schedule(t);
  if (!(r_raw > 0.0)) throw std::invalid_argument("R(t) must be positive at t = " + std::to_string(t));
  const int cells = snap_window_cells(r_raw, g);

  MonitorRecord rec;
  const InnerProducts ip = inner_products(uh);
  rec.t = t;
  rec.energy = ip.energy;
  rec.enstrophy = ip.enstrophy;
  rec.palinstrophy = ip.palinstrophy;
  rec.trilinear = trilinear_term(uh);
  rec.r_of_t = cells * g.spacing();
  rec.loc_norm = localized_norm(g, ls_weights(u, s), cells, s).value;
  rec.epsilon = epsilon_rule(rec.loc_norm, rec.r_of_t, constants.c0, s, g);
  rec.smallness = std::sqrt(ip.energy * ip.enstrophy);
  return rec;
}

MonitorRecord observe(const VectorField& u, double t, const RSchedule& schedule, double s,
                      const ConstantEstimates& constants) {
  return observe(to_spectral(u), u, t, schedule, s, constants);
}

// ---------------------------------------------------------------------------

InequalityReport check_differential_inequality(std::span<const MonitorRecord> records,
                                               const ConstantEstimates& c, double) {
  if (records.size() < 3) throw std::invalid_argument("differential inequality: needs at least 3 records");
  const double r = time_exponent(c.s);
  InequalityReport out;
  out.verdicts.assign(records.size(), std::nullopt);
  out.worst_margin = -INFINITY;
  std::size_t passed = 0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const auto& m = records[i];
    const double dHdt = (records[i + 1].enstrophy - records[i - 1].enstrophy) / (records[i + 1].t - records[i - 1].t);
    const double rhs = (2.0 * c.c1 * std::pow(m.loc_norm, r) + 2.0 * c.c2 / (m.r_of_t * m.r_of_t)) * m.enstrophy;
    const double scale = std::max(std::abs(dHdt), std::abs(rhs));
    const bool ok = dHdt <= rhs + 1e-3 * scale;
    out.verdicts[i] = ok;
    passed += ok;
    out.worst_margin = std::max(out.worst_margin, scale > 0.0 ? (dHdt - rhs) / scale : 0.0);
  }
  out.pass_fraction = double(passed) / double(records.size() - 2);
  return out;
}

BoundSeries gronwall_bound(std::span<const MonitorRecord> records, const ConstantEstimates& c, double nu) {
  if (records.empty()) return {};
  if (std::abs(records.front().t) > 1e-12) throw std::invalid_argument("Gronwall bound: records must start at t = 0");
  const double r = time_exponent(c.s);
  BoundSeries out;
  const double h0 = records.front().enstrophy;
  double norm_integral = 0.0, radius_integral = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      const auto& a = records[i - 1];
      const auto& b = records[i];
      const double dt = b.t - a.t;
      norm_integral += 0.5 * dt * (std::pow(a.loc_norm, r) + std::pow(b.loc_norm, r));
      radius_integral += 0.5 * dt * (1.0 / (a.r_of_t * a.r_of_t) + 1.0 / (b.r_of_t * b.r_of_t));
    }
    out.normalized.push_back(h0 * std::exp(2.0 * c.c1 * norm_integral + 2.0 * c.c2 * radius_integral));
    out.stated.push_back(std::sqrt(h0) *
                         std::exp(c.c1 / std::pow(nu, r - 1.0) * norm_integral + c.c2 * nu * radius_integral));
  }
  return out;
}

std::optional<double> smallness_time(std::span<const MonitorRecord> records, double nu, double c_star) {
  for (const auto& m : records)
    if (m.smallness <= c_star * nu * nu) return m.t;
  return std::nullopt;
}

double energy_ledger_residual(std::span<const MonitorRecord> records, double nu) {
  if (records.empty()) return 0.0;
  const double e0 = records.front().energy;
  double dissipated = 0.0, worst = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    dissipated += (records[i].t - records[i - 1].t) * (records[i].enstrophy + records[i - 1].enstrophy);
    worst = std::max(worst, std::abs(e0 - records[i].energy - nu * dissipated));
  }
  return e0 > 0.0 ? worst / e0 : worst;
}

std::vector<double> enstrophy_identity_series(std::span<const MonitorRecord> records, double nu) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    std::array<EnstrophySample, 3> w;
    for (int j = 0; j < 3; ++j) {
      const auto& m = records[i - 1 + j];
      w[j] = {m.t, m.enstrophy, m.palinstrophy, m.trilinear};
    }
    const double dt1 = w[1].t - w[0].t, dt2 = w[2].t - w[1].t;
    if (!(dt1 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(dt1, dt2)) {
      out.push_back(NAN);
      continue;
    }
    out.push_back(enstrophy_identity_residual(w, nu));
  }
  return out;
}

void finalize_records(std::vector<MonitorRecord>& records, const ConstantEstimates& constants, double nu) {
  if (records.empty()) return;
  const BoundSeries b = gronwall_bound(records, constants, nu);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].bound_normalized = b.normalized[i];
    records[i].bound_stated = b.stated[i];
    records[i].diff_ineq_ok.reset();
  }
  if (records.size() >= 3) {
    const auto report = check_differential_inequality(records, constants, nu);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].diff_ineq_ok = report.verdicts[i];
  }
}

}  // namespace nsreg
