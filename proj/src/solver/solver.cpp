#include "nsreg/solver.hpp"

#include <cmath>

namespace nsreg {

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::taylor_green_2d:
      return "taylor_green_2d";
    case InitKind::taylor_green_3d:
      return "taylor_green_3d";
    case InitKind::random_solenoidal:
      return "random_solenoidal";
  }
  return "unknown";
}

InitKind parse_init_kind(std::string_view s) {
  if (s == "taylor_green_2d") return InitKind::taylor_green_2d;
  if (s == "taylor_green_3d") return InitKind::taylor_green_3d;
  if (s == "random_solenoidal") return InitKind::random_solenoidal;
  throw std::invalid_argument("unknown init '" + std::string(s) +
                              "' (expected taylor_green_2d, taylor_green_3d or random_solenoidal)");
}

long SimConfig::steps() const { return t_end <= 0.0 ? 0 : std::lround(t_end / dt); }

void SimConfig::validate() const {
  make_grid(grid.n, grid.box_length);
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be non-negative");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

void check_cfl(const SimConfig& config, double max_speed) {
  const double limit = 0.5 * config.grid.spacing() / (max_speed + 1.0);
  if (config.dt > limit)
    throw std::invalid_argument("dt = " + std::to_string(config.dt) + " violates the CFL limit " +
                                std::to_string(limit) + " (0.5 h / (max speed + 1))");
}

BlowUpError::BlowUpError(double last_valid_time, const std::string& why)
    : std::runtime_error("numerical blow-up: " + why + " (last valid time " + std::to_string(last_valid_time) + ")"),
      last_valid_time_(last_valid_time) {}

// ---------------------------------------------------------------------------

namespace {

Eigen::ArrayXcd times_i(const Eigen::ArrayXcd& z) {
  return z.unaryExpr([](std::complex<double> c) { return std::complex<double>(-c.imag(), c.real()); });
}

bool all_finite(const SpectralVector& u) {
  return u.modes[0].allFinite() && u.modes[1].allFinite() && u.modes[2].allFinite();
}

}  // namespace

Integrator::Integrator(const SimConfig& config, const VectorField& u0, double t0)
    : config_(config), t0_(t0), last_valid_time_(t0) {
  config_.validate();
  if (!(u0.grid == config_.grid)) throw std::invalid_argument("initial field grid does not match the configuration");
  if (!u0.all_finite()) throw std::invalid_argument("initial field is not finite");
  check_cfl(config_, u0.max_speed());

  const GridSpec& g = config_.grid;
  const auto k = wavenumbers(g);
  for (auto& c : k_) c.resize(g.spectral_size());
  Eigen::Index idx = 0;
  for (int jz = 0; jz < g.n; ++jz)
    for (int jy = 0; jy < g.n; ++jy)
      for (int kx = 0; kx < g.half(); ++kx, ++idx) {
        k_[0][idx] = k.odd[kx];
        k_[1][idx] = k.odd[jy];
        k_[2][idx] = k.odd[jz];
      }
  const Eigen::ArrayXd k2 = laplacian_symbol(g);
  half_decay_ = (-config_.nu * k2 * (0.5 * config_.dt)).exp();
  full_decay_ = half_decay_.square();
  mask_ = config_.dealias ? dealias_mask(g) : Eigen::ArrayXd::Ones(g.spectral_size());
  mask_[0] = 0.0;
  const Eigen::ArrayXd ko2 = k_[0].square() + k_[1].square() + k_[2].square();
  inv_k2_ = (ko2 > 0.0).select(ko2.inverse(), 0.0);

  uh_ = leray_project(to_spectral(u0));
  for (auto& m : uh_.modes) m *= mask_;
}

SpectralVector Integrator::nonlinear_term(const SpectralVector& uh, double* max_speed) const {
  const GridSpec& g = config_.grid;
  const VectorField u = to_physical(uh);
  if (max_speed) *max_speed = u.all_finite() ? u.max_speed() : NAN;

  SpectralVector wh;
  wh.grid = g;
  wh.modes[0] = times_i(k_[1] * uh.modes[2] - k_[2] * uh.modes[1]);
  wh.modes[1] = times_i(k_[2] * uh.modes[0] - k_[0] * uh.modes[2]);
  wh.modes[2] = times_i(k_[0] * uh.modes[1] - k_[1] * uh.modes[0]);
  const VectorField w = to_physical(wh);

  VectorField c;
  c.grid = g;
  c[0] = u[1] * w[2] - u[2] * w[1];
  c[1] = u[2] * w[0] - u[0] * w[2];
  c[2] = u[0] * w[1] - u[1] * w[0];

  // Leray projection with the odd wavenumbers, then truncation; the mean
  // mode is masked out.
  SpectralVector ch = to_spectral(c);
  const Eigen::ArrayXcd kdotc = (k_[0] * ch.modes[0] + k_[1] * ch.modes[1] + k_[2] * ch.modes[2]) * inv_k2_;
  for (int a = 0; a < 3; ++a) ch.modes[a] = (ch.modes[a] - k_[a] * kdotc) * mask_;
  return ch;
}

void Integrator::advance() {
  const GridSpec& g = config_.grid;
  const double dt = config_.dt;
  SpectralVector k1, k2, k3, k4, stage;
  stage.grid = g;

  if (config_.nonlinear) {
    double speed = 0.0;
    k1 = nonlinear_term(uh_, &speed);
    if (!std::isfinite(speed)) throw BlowUpError(last_valid_time_, "non-finite velocity");
    if (speed > kBlowUpSpeed) throw BlowUpError(last_valid_time_, "speed " + std::to_string(speed) + " exceeds 1e6");
  }
  last_valid_time_ = time();

  if (config_.nonlinear) {
    for (int a = 0; a < 3; ++a) stage.modes[a] = half_decay_ * (uh_.modes[a] + (0.5 * dt) * k1.modes[a]);
    k2 = nonlinear_term(stage);
    for (int a = 0; a < 3; ++a) stage.modes[a] = half_decay_ * uh_.modes[a] + (0.5 * dt) * k2.modes[a];
    k3 = nonlinear_term(stage);
    for (int a = 0; a < 3; ++a) stage.modes[a] = full_decay_ * uh_.modes[a] + dt * half_decay_ * k3.modes[a];
    k4 = nonlinear_term(stage);
    for (int a = 0; a < 3; ++a)
      uh_.modes[a] = full_decay_ * uh_.modes[a] +
                     (dt / 6.0) * (full_decay_ * k1.modes[a] + 2.0 * half_decay_ * (k2.modes[a] + k3.modes[a]) +
                                   k4.modes[a]);
  } else {
    for (auto& m : uh_.modes) m *= full_decay_;
  }

  if (!all_finite(uh_)) throw BlowUpError(last_valid_time_, "non-finite spectral coefficients");
  ++steps_;
}

SolverState step(const SolverState& state, const SimConfig& config) {
  Integrator integ(config, state.u, state.time);
  integ.advance();
  return {integ.time(), integ.velocity()};
}

// ---------------------------------------------------------------------------

RunResult run(const SimConfig& config, const VectorField& u0, const RSchedule& schedule, const NormParams& params,
              const ConstantEstimates& constants, const StepHook& after_step) {
  Integrator integ(config, u0);
  RunResult result;
  auto record = [&] {
    const VectorField u = integ.velocity();
    result.records.push_back(observe(integ.spectral(), u, integ.time(), schedule, params.s, constants));
  };
  record();
  const long steps = config.steps();
  try {
    for (long s = 1; s <= steps; ++s) {
      integ.advance();
      if (s % config.record_every == 0 || s == steps) record();
      if (after_step) after_step(integ);
    }
  } catch (const BlowUpError& e) {
    result.blew_up = true;
    result.last_valid_time = e.last_valid_time();
    result.message = e.what();
  }
  if (!result.blew_up) result.last_valid_time = integ.time();
  finalize_records(result.records, constants, config.nu);
  result.final_state = {integ.time(), integ.velocity()};
  return result;
}

RunResult run(const SimConfig& config, const RSchedule& schedule, const NormParams& params,
              const ConstantEstimates& constants) {
  config.validate();
  return run(config, make_initial_field(config), schedule, params, constants);
}

}  // namespace nsreg
