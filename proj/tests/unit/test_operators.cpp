#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <stdexcept>

#include "moistpe/diagnostics.hpp"
#include "moistpe/elliptic.hpp"
#include "moistpe/operators.hpp"
#include "moistpe/state.hpp"
#include "oracles.hpp"

using namespace moistpe;

namespace {

double max_abs(const Array3& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

struct Flow {
  Array3 u, v, omega;
};

// Smooth velocity made barotropically divergence free, with its diagnosed omega.
Flow solenoidal_flow(const Grid& g, std::uint64_t seed) {
  Flow fl{oracle::random_smooth(g, seed), oracle::random_smooth(g, seed + 1), {}};
  project_barotropic(fl.u, fl.v, g, SolverSpec{1e-13, 20000});
  fl.omega = diagnose_omega(fl.u, fl.v, g);
  return fl;
}

}  // namespace

TEST(Advection, ConstantFieldIsStationary) {
  const Grid g = build_grid(oracle::desk_config(12, 10, 6));
  const Flow fl = solenoidal_flow(g, 1);
  const Array3 c = g.make_field(3.5);
  const double scale = std::max(max_abs(fl.u), max_abs(fl.v)) / g.dx * 3.5;
  EXPECT_LT(max_abs(advect(c, fl.u, fl.v, fl.omega, g)), 1e-9 * scale);
  Array3 tend = g.make_field();
  advect_advective(c, fl.u, fl.v, fl.omega, g, tend);
  EXPECT_EQ(max_abs(tend), 0.0);
}

TEST(Advection, LinearProfileUnderUniformWind) {
  const Grid g = build_grid(oracle::desk_config(10, 6, 4));
  const Array3 f = oracle::sample(g, [](double x, double, double) { return x; });
  const Array3 u = g.make_field(1.0), v = g.make_field(), w = g.make_face_field();
  Array3 tend = g.make_field();
  advect_advective(f, u, v, w, g, tend);
  for (int i = 1; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) EXPECT_NEAR(tend(i, j, k), -1.0, 1e-12);
}

TEST(Advection, ZeroVelocityGivesZero) {
  const Grid g = build_grid(oracle::desk_config(6, 6, 4));
  const Array3 f = oracle::random_smooth(g, 4, 1.0);
  const Array3 z = g.make_field(), zw = g.make_face_field();
  EXPECT_EQ(max_abs(advect(f, z, z, zw, g)), 0.0);
}

TEST(Advection, FluxFormConservesTotalWithClosedTop) {
  const Grid g = build_grid(oracle::desk_config(12, 10, 6));
  const Flow fl = solenoidal_flow(g, 2);
  const Array3 f = oracle::random_smooth(g, 9, 2.0);
  const Array3 tend = advect(f, fl.u, fl.v, fl.omega, g);
  double total = 0.0, size = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      total += std::accumulate(tend.column(i, j).begin(), tend.column(i, j).end(), 0.0);
      size += std::abs(fl.omega(i, j, 0));
    }
  // only the top-face residual omega(p1) f can leave the domain
  EXPECT_LT(std::abs(total) * g.dp, 4.0 * size + 1e-12);
}

TEST(Diffusion, EquilibriumHasZeroTendency) {
  const Grid g = build_grid(oracle::desk_config(8, 8, 6));
  const RobinSpec r{1e-4, 1e-5, 290.0, 290.0};
  const Array3 f = g.make_field(290.0);
  EXPECT_EQ(max_abs(diffuse(f, {1e3, 10.0}, r, g)), 0.0);
}

TEST(Diffusion, CosineEigenfunctionIsSecondOrder) {
  const double mu = 1e3;
  auto error = [&](int n) {
    const Grid g = build_grid(oracle::desk_config(n, 4, 2));
    const double kx = std::numbers::pi / g.lx;
    const Array3 f = oracle::sample(g, [&](double x, double, double) { return std::cos(kx * x); });
    const Array3 d = diffuse(f, {mu, 0.0}, RobinSpec{}, g);
    double e = 0.0;
    for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(d(i, 0, 0) + mu * kx * kx * f(i, 0, 0)));
    return e;
  };
  const double r1 = error(16) / error(32), r2 = error(32) / error(64);
  EXPECT_GE(r1, 3.0);
  EXPECT_LE(r1, 5.0);
  EXPECT_GE(r2, 3.0);
  EXPECT_LE(r2, 5.0);
}

TEST(Diffusion, ZeroVerticalCoefficientLeavesColumnsAlone) {
  const Grid g = build_grid(oracle::desk_config(6, 6, 8));
  const Array3 f = oracle::sample(g, [](double, double, double p) { return p * p * 1e-8; });
  const RobinSpec r{1e-4, 0.0, 5.0, 0.0};
  EXPECT_EQ(max_abs(diffuse(f, {0.0, 0.0}, r, g)), 0.0);
  Array3 tend = g.make_field();
  diffuse_horizontal(f, 1e3, RobinSpec{}, g, tend);
  EXPECT_LT(max_abs(tend), 1e-20);
}

TEST(Diffusion, NeumannWallsConserveTotal) {
  const Grid g = build_grid(oracle::desk_config(10, 8, 6));
  const Array3 f = oracle::random_smooth(g, 12, 5.0);
  const Array3 d = diffuse(f, {1e3, 10.0}, RobinSpec{}, g);
  double total = 0.0, mag = 0.0;
  for (double x : d.values()) total += x, mag += std::abs(x);
  EXPECT_LT(std::abs(total), 1e-12 * mag);
}

TEST(Diffusion, RobinWallsPullTowardTheTarget) {
  const Grid g = build_grid(oracle::desk_config(6, 6, 4));
  const RobinSpec r{1e-4, 1e-5, 300.0, 300.0};
  const Array3 d = diffuse(g.make_field(280.0), {1e3, 10.0}, r, g);
  for (double x : d.values()) EXPECT_GE(x, 0.0);
  EXPECT_GT(d(0, 0, g.np - 1), 0.0);
  EXPECT_GT(d(0, 3, 0), 0.0);
}

TEST(Diffusion, NegativeCoefficientsThrow) {
  const Grid g = build_grid(oracle::desk_config(4, 4, 4));
  const Array3 f = g.make_field(1.0);
  EXPECT_THROW(diffuse(f, {-1.0, 0.0}, RobinSpec{}, g), std::invalid_argument);
  EXPECT_THROW(diffuse(f, {0.0, -1.0}, RobinSpec{}, g), std::invalid_argument);
}

TEST(ImplicitDiffusion, MatchesDenseBackwardEuler) {
  const Grid g = build_grid(oracle::desk_config(3, 2, 12));
  const double nu = 10.0, alpha = 1e-4, target = 0.01, dt = 120.0;
  Array3 f = oracle::random_smooth(g, 21, 0.008);
  const Array3 f0 = f;
  ASSERT_TRUE(implicit_vertical_diffusion(f, nu, alpha, target, dt, g));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const auto c = f0.column(i, j);
      const auto ref = oracle::implicit_column(g, oracle::Vector(c.begin(), c.end()), nu, alpha, target, dt);
      for (int k = 0; k < g.np; ++k)
        EXPECT_NEAR(f(i, j, k), static_cast<double>(ref[k]), 1e-14 * (1.0 + std::abs(f(i, j, k))));
    }
}

TEST(ImplicitDiffusion, IsContractiveForAnyStep) {
  const Grid g = build_grid(oracle::desk_config(4, 4, 16));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double dt : {1.0, 1e3, 1e6, 1e9}) {
    Array3 f = g.make_field();
    for (double& x : f.values()) x = u(rng);
    const double before = max_abs(f);
    ASSERT_TRUE(implicit_vertical_diffusion(f, 10.0, 1e-4, 0.0, dt, g));
    EXPECT_LE(max_abs(f), before * (1.0 + 1e-14));
  }
}

TEST(ImplicitDiffusion, NeumannConservesColumnContent) {
  const Grid g = build_grid(oracle::desk_config(3, 3, 10));
  Array3 f = oracle::random_smooth(g, 30, 1.0);
  const Array3 f0 = f;
  ASSERT_TRUE(implicit_vertical_diffusion(f, 10.0, 0.0, 0.0, 500.0, g));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const auto a = f0.column(i, j);
      const auto b = std::as_const(f).column(i, j);
      EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), std::accumulate(b.begin(), b.end(), 0.0), 1e-12);
    }
}

TEST(Coriolis, DoesNoWork) {
  const Grid g = build_grid(oracle::desk_config(6, 6, 4));
  const Array3 u = oracle::random_smooth(g, 1), v = oracle::random_smooth(g, 2);
  Array3 tu = g.make_field(), tv = g.make_field();
  coriolis(u, v, 1e-4, tu, tv);
  for (std::size_t n = 0; n < u.size(); ++n)
    EXPECT_NEAR(tu.values()[n] * u.values()[n] + tv.values()[n] * v.values()[n], 0.0, 1e-18);
}

TEST(Coriolis, VanishesWithoutRotation) {
  const Grid g = build_grid(oracle::desk_config(4, 4, 4));
  const Array3 u = g.make_field(3.0), v = g.make_field();
  Array3 tu = g.make_field(), tv = g.make_field();
  coriolis(u, v, 0.0, tu, tv);
  EXPECT_EQ(max_abs(tu) + max_abs(tv), 0.0);
}

TEST(Coriolis, GeostrophicBalanceCancelsPressureGradient) {
  const Grid g = build_grid(oracle::desk_config(10, 12, 4));
  const double f = 1e-4;
  const Array3 phi = oracle::random_smooth(g, 5, 0.0);
  Array3 gx = g.make_field(), gy = g.make_field();
  horizontal_gradient(phi, g, gx, gy);
  Array3 u = g.make_field(), v = g.make_field();
  for (std::size_t n = 0; n < u.size(); ++n) {
    u.values()[n] = -gy.values()[n] / f;
    v.values()[n] = gx.values()[n] / f;
  }
  Array3 tu = g.make_field(), tv = g.make_field();
  coriolis(u, v, f, tu, tv);
  pressure_gradient(phi, g, tu, tv);
  EXPECT_LT(max_abs(tu) + max_abs(tv), 1e-15 * (max_abs(gx) + max_abs(gy)) + 1e-300);
}

TEST(Sedimentation, SingleLayerOfRain) {
  const Grid g = build_grid(oracle::desk_config(2, 2, 5));
  const double vf = 50.0, q = 1e-3;
  Array3 qr = g.make_field();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) qr(i, j, 0) = q;
  const Array3 s = sedimentation(qr, vf, g);
  const double pf = g.p1 + g.dp;  // face below the top layer
  const double flux = vf * pf / (g.rd * 300.0) * q;
  EXPECT_NEAR(s(0, 0, 0), -flux / g.dp, 1e-15 * flux / g.dp);
  EXPECT_NEAR(s(0, 0, 1), flux / g.dp, 1e-15 * flux / g.dp);
  for (int k = 2; k < g.np; ++k) EXPECT_EQ(s(1, 1, k), 0.0);
  EXPECT_EQ(sedimentation_surface_flux(qr, vf, g, 0, 0), 0.0);
}

TEST(Sedimentation, NoRainNoFlux) {
  const Grid g = build_grid(oracle::desk_config(3, 3, 4));
  EXPECT_EQ(max_abs(sedimentation(g.make_field(), 50.0, g)), 0.0);
}

TEST(Sedimentation, ColumnBudgetMatchesSurfaceFlux) {
  const Grid g = build_grid(oracle::desk_config(5, 4, 20));
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 3e-3);
  Array3 qr = g.make_field();
  for (double& x : qr.values()) x = u(rng);
  const Array3 s = sedimentation(qr, 50.0, g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const auto c = s.column(i, j);
      const double change = std::accumulate(c.begin(), c.end(), 0.0) * g.dp;
      const double out = sedimentation_surface_flux(qr, 50.0, g, i, j);
      EXPECT_LE(std::abs(change + out), 1e-12 * out);
    }
}

TEST(Momentum, RestingStateWithFlatGeopotentialIsSteady) {
  const RunConfig cfg = oracle::desk_config(6, 6, 4);
  const Grid g = build_grid(cfg);
  State s = State::zeros(g);
  s.t.fill(280.0);
  const Diagnosed d = diagnose(s, g.make_surface(), g, cfg.params);
  const MomentumTendency m = momentum_rhs(s, d, g, cfg.params, cfg.boundary);
  EXPECT_EQ(max_abs(m.u) + max_abs(m.v), 0.0);
}
