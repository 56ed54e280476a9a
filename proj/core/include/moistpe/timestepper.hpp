#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "moistpe/config.hpp"
#include "moistpe/grid.hpp"
#include "moistpe/microphysics.hpp"
#include "moistpe/state.hpp"

namespace moistpe {

/// Clipping audit per scalar, indexed by Scalar (T, qv, qc, qr).
struct ClipStats {
  std::array<long, 4> count{};
  std::array<double, 4> mass{};        // sum of clipped |value| times cell volume
  std::array<double, 4> min_before{};  // field minimum before clipping

  void merge(const ClipStats& o);
};

struct StepReport {
  double dt = 0.0;
  double cfl_horizontal = 0.0;
  double cfl_vertical = 0.0;
  double cfl_sedimentation = 0.0;
  double projection_residual = 0.0;  // max |omega(p1)| after the projection
  int solver_iterations = 0;
  ClipStats clip;
  double h_cancel_residual = 0.0;  // max over cells, relative to (L/cp) max(|Scd|, |Sev|)
};

/// Time steps at which each explicit process reaches Courant number one.
struct CflBounds {
  double advective_x, advective_y, vertical, sedimentation, diffusion, adiabatic, gravity_wave;
  [[nodiscard]] double min() const;
};

class NonFiniteStateError : public std::runtime_error {
 public:
  NonFiniteStateError(const std::string& what, StepReport report) : std::runtime_error(what), report_(report) {}
  [[nodiscard]] const StepReport& report() const { return report_; }

 private:
  StepReport report_;
};

CflBounds cfl_bounds(const State& state, const Grid& grid, const Params& params);

/// limit * min(bounds), clamped to [dt_min, dt_max]. Throws NonFiniteStateError for non-finite velocity.
double cfl_dt(const State& state, const Grid& grid, const Params& params, const TimeSpec& time);

/// Advances the regularized system. One Euler step:
///  1. omega from (u, v);
///  2. explicit scalar tendencies (transport, horizontal diffusion, sedimentation, adiabatic term);
///  3. geopotential anomaly from the updated T, explicit momentum tendencies
///     (advection, Coriolis, pressure gradient, horizontal viscosity);
///  4. implicit vertical diffusion of every field;
///  5. barotropic projection of (u, v), which also yields the surface geopotential;
///  6. implicit microphysics;
///  7. clipping of negative scalars with an audit record;
///  8. t += dt.
/// The two-stage option averages the state with two chained Euler steps.
class Stepper {
 public:
  Stepper(RunConfig cfg, Grid grid);

  StepReport step(State& state, double dt) { return step(state, dt, cfg_.time.epsilon); }
  StepReport step(State& state, double dt, double eps);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const RunConfig& config() const { return cfg_; }
  [[nodiscard]] const Array2& surface_geopotential() const { return phis_; }
  /// Effective microphysical rates of the last Euler stage, one entry per cell.
  [[nodiscard]] const std::vector<SourceEval>& last_sources() const { return sources_; }

 private:
  StepReport euler(const State& in, State& out, double dt, double eps, Array2& phis);

  RunConfig cfg_;
  Grid grid_;
  Array2 phis_;
  std::vector<SourceEval> sources_;
};

}  // namespace moistpe
