// Pseudo-spectral time integration of the incompressible Navier-Stokes
// equations on the periodic box, and initial-condition generators.
#ifndef NSREG_SOLVER_HPP
#define NSREG_SOLVER_HPP

#include "nsreg/field.hpp"
#include "nsreg/monitor.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nsreg {

enum class InitKind { taylor_green_2d, taylor_green_3d, random_solenoidal };

std::string_view to_string(InitKind k);
InitKind parse_init_kind(std::string_view s);

struct SimConfig {
  double nu = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  GridSpec grid;
  bool dealias = true;
  InitKind init = InitKind::taylor_green_2d;
  double spectrum_peak = 4.0;
  std::uint64_t rng_seed = 1;
  int record_every = 1;
  /// Off only for linear (Stokes) checks.
  bool nonlinear = true;

  /// Number of steps, round(t_end / dt).
  long steps() const;
  void validate() const;
};

/// dt <= 0.5 h / (max_speed + 1); throws std::invalid_argument otherwise.
void check_cfl(const SimConfig& config, double max_speed);

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double last_valid_time, const std::string& why);
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

// ---------------------------------------------------------------------------
// Initial conditions

/// (sin x cos y, -cos x sin y, 0)
VectorField init_taylor_green_2d(const GridSpec& grid);
/// (sin x cos y cos z, -cos x sin y cos z, 0)
VectorField init_taylor_green_3d(const GridSpec& grid);

/// Divergence-free, zero-mean, unit-energy (||u||^2 = 1) field with energy
/// spectrum proportional to k^4 exp(-2 (k / peak)^2) and random phases.
/// Only modes inside the 2/3 truncation are populated.  Requires
/// 0 < peak < n/3.  Bit-reproducible for a given seed.
VectorField init_random_solenoidal(const GridSpec& grid, double spectrum_peak, std::uint64_t seed);

/// Scalar analogue: zero mean, unit L2 norm, same spectral shape.
ScalarField random_scalar_field(const GridSpec& grid, double spectrum_peak, std::uint64_t seed);

VectorField make_initial_field(const SimConfig& config);

// ---------------------------------------------------------------------------
// Time stepping

struct SolverState {
  double time = 0.0;
  VectorField u;
};

/// Fourth-order Runge-Kutta with an exact integrating factor for the viscous
/// term.  The nonlinear term is P[u x omega] (P the Leray projector), formed
/// pseudo-spectrally and truncated by the 2/3 rule when dealiasing is on.
/// The state lives in spectral space; its mean is held at zero.
class Integrator {
 public:
  Integrator(const SimConfig& config, const VectorField& u0, double t0 = 0.0);

  /// One step of size dt.  Throws BlowUpError when the speed exceeds 1e6 or
  /// a non-finite value appears.
  void advance();

  double time() const { return t0_ + double(steps_) * config_.dt; }
  long steps_taken() const { return steps_; }
  const SpectralVector& spectral() const { return uh_; }
  VectorField velocity() const { return to_physical(uh_); }
  const SimConfig& config() const { return config_; }

  /// Projected (and truncated) u x omega for the given state.
  SpectralVector nonlinear_term(const SpectralVector& uh, double* max_speed = nullptr) const;

 private:
  SimConfig config_;
  double t0_ = 0.0;
  long steps_ = 0;
  double last_valid_time_ = 0.0;
  SpectralVector uh_;
  Eigen::ArrayXd half_decay_, full_decay_, mask_, inv_k2_;
  std::array<Eigen::ArrayXd, 3> k_;
};

inline constexpr double kBlowUpSpeed = 1e6;

SolverState step(const SolverState& state, const SimConfig& config);

struct RunResult {
  std::vector<MonitorRecord> records;
  bool blew_up = false;
  double last_valid_time = 0.0;
  std::string message;
  SolverState final_state;
};

/// Steps to t_end, recording at t = 0 and every record_every steps (and at
/// the final step).  Records are finalized (bounds, verdicts) before return.
/// A blow-up keeps the records gathered so far.
RunResult run(const SimConfig& config, const RSchedule& schedule, const NormParams& params,
              const ConstantEstimates& constants);
/// As above, starting from a given field.  `after_step` runs after every
/// successful step.
using StepHook = std::function<void(const Integrator&)>;
RunResult run(const SimConfig& config, const VectorField& u0, const RSchedule& schedule, const NormParams& params,
              const ConstantEstimates& constants, const StepHook& after_step = {});

}  // namespace nsreg

#endif  // NSREG_SOLVER_HPP
