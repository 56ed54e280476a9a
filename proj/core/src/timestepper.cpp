#include "moistpe/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moistpe/elliptic.hpp"
#include "moistpe/operators.hpp"

namespace moistpe {

namespace {

constexpr std::array<Scalar, 4> kScalars{Scalar::T, Scalar::Qv, Scalar::Qc, Scalar::Qr};
constexpr double kInf = std::numeric_limits<double>::infinity();

const Diffusivity& diffusivity(const Params& p, Scalar s) {
  switch (s) {
    case Scalar::T: return p.t;
    case Scalar::Qv: return p.qv;
    case Scalar::Qc: return p.qc;
    case Scalar::Qr: return p.qr;
  }
  return p.t;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double bound(double length, double speed) { return speed > 0.0 ? length / speed : kInf; }

void axpy(Array3& y, double a, const Array3& x) {
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t n = 0; n < yv.size(); ++n) yv[n] += a * xv[n];
}

}  // namespace

void ClipStats::merge(const ClipStats& o) {
  for (std::size_t s = 0; s < 4; ++s) {
    count[s] += o.count[s];
    mass[s] += o.mass[s];
    min_before[s] = std::min(min_before[s], o.min_before[s]);
  }
}

double CflBounds::min() const {
  return std::min({advective_x, advective_y, vertical, sedimentation, diffusion, adiabatic, gravity_wave});
}

CflBounds cfl_bounds(const State& state, const Grid& grid, const Params& params) {
  CflBounds b{};
  b.advective_x = bound(grid.dx, max_abs(state.u.values()));
  b.advective_y = bound(grid.dy, max_abs(state.v.values()));

  const Array3 omega = diagnose_omega(state.u, state.v, grid);
  b.vertical = bound(grid.dp, max_abs(omega.values()));
  b.sedimentation = bound(grid.dp, params.v_fall * grid.p0 / (grid.rd * grid.tbar_min()));

  double mu = 0.0;
  for (const Diffusivity* d : {&params.u, &params.t, &params.qv, &params.qc, &params.qr}) mu = std::max(mu, d->mu);
  const double lap = 2.0 * mu * (1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy));
  b.diffusion = lap > 0.0 ? 1.0 / lap : kInf;

  // adiabatic rate kappa |h+ omega_below + h- omega_above| / dp
  double rate = 0.0;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      auto w = omega.column(i, j);
      for (int k = 0; k < grid.np; ++k) {
        const double hp = 0.5 * grid.dp / (grid.p[k] + 0.25 * grid.dp);
        const double hm = grid.dp / grid.p[k] - hp;
        rate = std::max(rate, params.kappa() * std::abs(hp * w[k + 1] + hm * w[k]) / grid.dp);
      }
    }
  b.adiabatic = rate > 0.0 ? 1.0 / rate : kInf;

  // internal gravity waves travel slower than sqrt(kappa R T)
  const double tmax = std::max(0.0, *std::max_element(state.t.values().begin(), state.t.values().end()));
  b.gravity_wave = bound(std::min(grid.dx, grid.dy), std::sqrt(params.kappa() * params.r * tmax));
  return b;
}

double cfl_dt(const State& state, const Grid& grid, const Params& params, const TimeSpec& time) {
  for (const Array3* f : {&state.u, &state.v, &state.t})
    for (double x : f->values())
      if (!std::isfinite(x)) throw NonFiniteStateError("non-finite state passed to cfl_dt", StepReport{});
  const double dt = time.cfl * cfl_bounds(state, grid, params).min();
  return std::clamp(dt, time.dt_min, time.dt_max);
}

Stepper::Stepper(RunConfig cfg, Grid grid)
    : cfg_(std::move(cfg)), grid_(std::move(grid)), phis_(grid_.make_surface()), sources_(grid_.cells()) {}

StepReport Stepper::euler(const State& in, State& out, double dt, double eps, Array2& phis) {
  const Grid& g = grid_;
  const Params& prm = cfg_.params;
  const BoundaryData& bnd = cfg_.boundary;
  StepReport rep;
  rep.dt = dt;

  const Array3 omega = diagnose_omega(in.u, in.v, g);
  rep.cfl_horizontal = dt * std::max(max_abs(in.u.values()) / g.dx, max_abs(in.v.values()) / g.dy);
  rep.cfl_vertical = dt * max_abs(omega.values()) / g.dp;
  rep.cfl_sedimentation = dt * prm.v_fall * g.p0 / (g.rd * g.tbar_min()) / g.dp;

  // scalars first, so the pressure gradient sees the updated temperature
  Array3 tend = g.make_field();
  for (Scalar s : kScalars) {
    const Array3& f = in.scalar(s);
    tend.fill(0.0);
    advect_scalar(f, in.u, in.v, omega, g, tend);
    diffuse_horizontal(f, diffusivity(prm, s).mu, robin_at(bnd, s, in.time), g, tend);
    if (s == Scalar::Qr) sedimentation(f, prm.v_fall, g, tend);
    if (s == Scalar::T) adiabatic_heating(f, omega, prm.kappa(), g, tend);
    out.scalar(s) = f;
    axpy(out.scalar(s), dt, tend);
  }

  const Array3 phi = geopotential_anomaly(out.t, g, prm.r);
  Array3 tu = g.make_field(), tv = g.make_field();
  advect_advective(in.u, in.u, in.v, omega, g, tu);
  advect_advective(in.v, in.u, in.v, omega, g, tv);
  coriolis(in.u, in.v, prm.f, tu, tv);
  pressure_gradient(phi, g, tu, tv);
  diffuse_velocity_horizontal(in.u, in.v, prm.u.mu, g, tu, tv);
  out.u = in.u;
  out.v = in.v;
  axpy(out.u, dt, tu);
  axpy(out.v, dt, tv);

  const double t_new = in.time + dt;
  for (Scalar s : kScalars) {
    const RobinSpec r = robin_at(bnd, s, t_new);
    if (!implicit_vertical_diffusion(out.scalar(s), diffusivity(prm, s).nu, r.alpha_bottom, r.bottom, dt, g))
      throw std::runtime_error("tridiagonal solve failed");
  }
  if (!implicit_vertical_diffusion(out.u, prm.u.nu, bnd.alpha_u, 0.0, dt, g) ||
      !implicit_vertical_diffusion(out.v, prm.u.nu, bnd.alpha_u, 0.0, dt, g))
    throw std::runtime_error("tridiagonal solve failed");

  ProjectionResult proj = project_barotropic(out.u, out.v, g, cfg_.solver);
  rep.solver_iterations = proj.iterations;
  for (std::size_t n = 0; n < phis.size(); ++n) phis.values()[n] = proj.phi.values()[n] / dt;
  rep.projection_residual = proj.max_divergence * (g.p0 - g.p1);

  const double lc = prm.latent_over_cp();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const std::size_t n = out.t.index(i, j, k);
        const MoistCell cell{out.t.values()[n], out.qv.values()[n], out.qc.values()[n], out.qr.values()[n]};
        const MicrophysicsUpdate up = microphysics_update(cell, g.p[k], dt, eps, prm);
        out.t.values()[n] = up.cell.t;
        out.qv.values()[n] = up.cell.qv;
        out.qc.values()[n] = up.cell.qc;
        out.qr.values()[n] = up.cell.qr;
        sources_[n] = up.effective;
        const double h = std::abs(transformed_sources(up.effective, prm).h);
        const double m = std::max(std::abs(up.effective.scd), std::abs(up.effective.sev));
        if (h > 0.0 && lc > 0.0) rep.h_cancel_residual = std::max(rep.h_cancel_residual, m > 0.0 ? h / (lc * m) : kInf);
      }

  const double vol = g.cell_volume();
  for (Scalar s : kScalars) {
    const auto idx = static_cast<std::size_t>(s);
    auto f = out.scalar(s).values();
    double lo = kInf;
    for (double& x : f) {
      lo = std::min(lo, x);
      if (x < 0.0) {
        rep.clip.count[idx] += 1;
        rep.clip.mass[idx] += -x * vol;
        x = 0.0;
      }
    }
    rep.clip.min_before[idx] = lo;
  }

  out.time = t_new;
  return rep;
}

StepReport Stepper::step(State& state, double dt, double eps) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  StepReport rep;
  if (cfg_.time.scheme == ExplicitScheme::Euler) {
    State next = state;
    rep = euler(state, next, dt, eps, phis_);
    state = std::move(next);
  } else {
    State s1 = state, s2 = state;
    Array2 phis1 = phis_, phis2 = phis_;
    rep = euler(state, s1, dt, eps, phis1);
    const StepReport r2 = euler(s1, s2, dt, eps, phis2);
    rep.clip.merge(r2.clip);
    rep.h_cancel_residual = std::max(rep.h_cancel_residual, r2.h_cancel_residual);
    rep.solver_iterations += r2.solver_iterations;
    rep.cfl_horizontal = std::max(rep.cfl_horizontal, r2.cfl_horizontal);
    rep.cfl_vertical = std::max(rep.cfl_vertical, r2.cfl_vertical);
    const std::array<std::pair<Array3*, const Array3*>, 6> pairs{
        {{&state.u, &s2.u}, {&state.v, &s2.v}, {&state.t, &s2.t}, {&state.qv, &s2.qv}, {&state.qc, &s2.qc},
         {&state.qr, &s2.qr}}};
    for (auto [f, b] : pairs) {
      auto a = f->values();
      auto bv = b->values();
      for (std::size_t n = 0; n < a.size(); ++n) a[n] = 0.5 * (a[n] + bv[n]);
    }
    for (std::size_t n = 0; n < phis_.size(); ++n) phis_.values()[n] = 0.5 * (phis1.values()[n] + phis2.values()[n]);
    state.time += dt;
    const Array3 omega = diagnose_omega(state.u, state.v, grid_);
    double top = 0.0;
    for (int i = 0; i < grid_.nx; ++i)
      for (int j = 0; j < grid_.ny; ++j) top = std::max(top, std::abs(omega(i, j, 0)));
    rep.projection_residual = top;
  }
  if (!state.all_finite()) throw NonFiniteStateError("non-finite value after step at t = " + std::to_string(state.time), rep);
  return rep;
}

}  // namespace moistpe
