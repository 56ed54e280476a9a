#include "moistpe/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "moistpe/elliptic.hpp"
#include "moistpe/microphysics.hpp"

namespace moistpe {

namespace {

constexpr double kPi = std::numbers::pi;

double column_fraction(const Grid& g, int k) { return (g.p[k] - g.p1) / (g.p0 - g.p1); }

// Stratified temperature, t_top at p1 rising linearly to t_surface at p0.
double stratified_t(const InitialSpec& in, const Grid& g, int k) {
  return in.t_top + column_fraction(g, k) * (in.t_surface - in.t_top);
}

// Streamfunction-like pattern plus a divergent part that the projection removes.
void smooth_flow(State& s, const Grid& g, double amplitude) {
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const double x = g.x[i] / g.lx, y = g.y[j] / g.ly, z = column_fraction(g, k);
        const double shear = 0.5 + 0.5 * std::cos(kPi * z);
        s.u(i, j, k) = amplitude * (shear * std::sin(kPi * x) * std::cos(kPi * y) + 0.2 * std::cos(2 * kPi * y));
        s.v(i, j, k) = -amplitude * shear * std::cos(kPi * x) * std::sin(kPi * y) * (g.lx / g.ly);
      }
}

void project(State& s, const Grid& g, const SolverSpec& solver) { project_barotropic(s.u, s.v, g, solver); }

State bubble(const RunConfig& cfg, const Grid& g, bool moist) {
  const InitialSpec& in = cfg.initial;
  State s = State::zeros(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const double x = g.x[i] / g.lx, y = g.y[j] / g.ly;
        const double t = stratified_t(in, g, k) + in.t_anomaly * std::cos(kPi * x) * std::cos(kPi * y);
        s.t(i, j, k) = t;
        if (!moist) continue;
        const double qvs = saturation_mixing_ratio(g.p[k], t, cfg.params);
        const double z = column_fraction(g, k);
        const double r = std::hypot(x - 0.5, y - 0.5, z - 0.5) / in.bubble_radius;
        const double blob = r < 1.0 ? std::pow(std::cos(0.5 * kPi * r), 2) : 0.0;
        s.qv(i, j, k) = qvs * (in.rh + blob * (1.0 + in.bubble_amplitude - in.rh));
      }
  smooth_flow(s, g, in.u_amplitude);
  project(s, g, cfg.solver);
  return s;
}

State quiescent(const RunConfig& cfg, const Grid& g) {
  State s = State::zeros(g);
  for (Scalar sc : {Scalar::T, Scalar::Qv, Scalar::Qc, Scalar::Qr}) s.scalar(sc).fill(cfg.boundary.robin(sc).bottom);
  return s;
}

// Sum of a few low modes with random amplitudes and phases, scaled to max |.| = 1.
Array3 random_modes(const Grid& g, std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi), amp(-1.0, 1.0);
  std::uniform_int_distribution<int> wave(1, 3);
  Array3 f = g.make_field();
  for (int m = 0; m < modes; ++m) {
    const double a = amp(rng), px = phase(rng), py = phase(rng), pz = phase(rng);
    const int kx = wave(rng), ky = wave(rng), kz = wave(rng);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.np; ++k)
          f(i, j, k) += a * std::sin(kx * kPi * g.x[i] / g.lx + px) * std::sin(ky * kPi * g.y[j] / g.ly + py) *
                        std::sin(kz * kPi * column_fraction(g, k) + pz);
  }
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  if (m > 0.0)
    for (double& x : f.values()) x /= m;
  return f;
}

State random_state(const RunConfig& cfg, const Grid& g, std::uint64_t seed) {
  const InitialSpec& in = cfg.initial;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  State s = State::zeros(g);

  const Array3 dt = random_modes(g, rng, 4);
  const Array3 rh = random_modes(g, rng, 4);
  const Array3 cloud = random_modes(g, rng, 3);
  const Array3 rain = random_modes(g, rng, 3);
  const Array3 fu = random_modes(g, rng, 3);
  const Array3 fv = random_modes(g, rng, 3);
  const double rh_mean = 0.4 + 0.5 * unit(rng);
  const double rh_spread = 0.6 * unit(rng);
  const double qc_scale = 2e-3 * unit(rng), qr_scale = 2e-3 * unit(rng);

  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const double t = stratified_t(in, g, k) + 3.0 * in.t_anomaly * dt(i, j, k);
        s.t(i, j, k) = t;
        s.qv(i, j, k) = saturation_mixing_ratio(g.p[k], t, cfg.params) * std::max(0.0, rh_mean + rh_spread * rh(i, j, k));
        s.qc(i, j, k) = qc_scale * std::max(0.0, cloud(i, j, k));
        s.qr(i, j, k) = qr_scale * std::max(0.0, rain(i, j, k));
        s.u(i, j, k) = in.u_amplitude * fu(i, j, k);
        s.v(i, j, k) = in.u_amplitude * fv(i, j, k);
      }
  project(s, g, cfg.solver);
  return s;
}

}  // namespace

State make_initial_state(const RunConfig& cfg, const Grid& grid, std::uint64_t seed) {
  const std::string& r = cfg.initial.recipe;
  if (r == "quiescent") return quiescent(cfg, grid);
  if (r == "supersaturated-bubble") return bubble(cfg, grid, true);
  if (r == "dry-dynamics") return bubble(cfg, grid, false);
  if (r == "random") return random_state(cfg, grid, seed);
  throw std::invalid_argument("unknown initial recipe '" + r + "'");
}

Array3 smooth_mode(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  const double px = phase(rng), py = phase(rng);
  Array3 f = g.make_field();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k)
        f(i, j, k) = std::cos(kPi * g.x[i] / g.lx + px) * std::cos(kPi * g.y[j] / g.ly + py) *
                     std::cos(0.5 * kPi * column_fraction(g, k));
  return f;
}

void perturb_vapour(State& state, const Grid& grid, double delta, std::uint64_t seed) {
  const Array3 mode = smooth_mode(grid, seed);
  auto q = state.qv.values();
  auto m = mode.values();
  for (std::size_t n = 0; n < q.size(); ++n) q[n] += delta * m[n];
}

}  // namespace moistpe
