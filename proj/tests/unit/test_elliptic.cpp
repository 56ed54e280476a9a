#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "moistpe/elliptic.hpp"
#include "moistpe/operators.hpp"
#include "moistpe/state.hpp"
#include "oracles.hpp"

using namespace moistpe;

namespace {

Array2 random_surface(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Array2 a = g.make_surface();
  for (double& x : a.values()) x = n(rng);
  return a;
}

double mean(const Array2& a) {
  double s = 0.0;
  for (double x : a.values()) s += x;
  return s / static_cast<double>(a.size());
}

void remove_mean(Array2& a) {
  const double m = mean(a);
  for (double& x : a.values()) x -= m;
}

double max_abs(const Array2& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

const SolverSpec kTight{1e-13, 20000};

}  // namespace

TEST(Poisson, OperatorMatchesDenseMatrix) {
  const Grid g = build_grid(oracle::desk_config(7, 5, 2));
  const auto m = oracle::wide_laplacian_matrix(g);
  const Array2 phi = random_surface(g, 1);
  const Array2 lap = laplacian2d(phi, g);
  for (int r = 0; r < g.nx * g.ny; ++r) {
    long double s = 0.0L;
    for (int c = 0; c < g.nx * g.ny; ++c) s += m[r][c] * phi.values()[c];
    EXPECT_NEAR(lap.values()[r], static_cast<double>(s), 1e-20);
  }
}

TEST(Poisson, MatchesDenseSolve) {
  for (auto [nx, ny] : {std::pair{6, 6}, std::pair{9, 7}, std::pair{12, 5}}) {
    const Grid g = build_grid(oracle::desk_config(nx, ny, 2));
    Array2 rhs = random_surface(g, nx * 31 + ny);
    remove_mean(rhs);
    const PoissonResult r = solve_poisson(rhs, g, kTight);
    const auto ref = oracle::poisson_dense(g, oracle::Vector(rhs.values().begin(), rhs.values().end()));
    double scale = 0.0;
    for (auto x : ref) scale = std::max(scale, static_cast<double>(std::abs(x)));
    for (std::size_t n = 0; n < ref.size(); ++n)
      EXPECT_NEAR(r.phi.values()[n], static_cast<double>(ref[n]), 1e-9 * scale);
    EXPECT_LE(r.relative_residual, 1e-13);
  }
}

TEST(Poisson, ManufacturedSolutionIsSecondOrder) {
  auto error = [](int n) {
    const Grid g = build_grid(oracle::desk_config(n, n, 2));
    const double kx = std::numbers::pi / g.lx, ky = std::numbers::pi / g.ly;
    Array2 exact = g.make_surface(), rhs = g.make_surface();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        exact(i, j) = std::cos(kx * g.x[i]) * std::cos(ky * g.y[j]);
        rhs(i, j) = -(kx * kx + ky * ky) * exact(i, j);
      }
    remove_mean(rhs);
    const PoissonResult r = solve_poisson(rhs, g, kTight);
    Array2 e = r.phi;
    for (std::size_t k = 0; k < e.size(); ++k) e.values()[k] -= exact.values()[k];
    remove_mean(e);
    return max_abs(e);
  };
  const double e1 = error(16), e2 = error(32), e3 = error(64);
  EXPECT_GT(e1 / e2, 3.0);
  EXPECT_GT(e2 / e3, 3.0);
  EXPECT_LT(e3, 1e-2);
}

TEST(Poisson, SolutionHasZeroMeanAndIsLinear) {
  const Grid g = build_grid(oracle::desk_config(10, 8, 2));
  Array2 a = random_surface(g, 3), b = random_surface(g, 4);
  remove_mean(a);
  remove_mean(b);
  Array2 c = g.make_surface();
  for (std::size_t n = 0; n < c.size(); ++n) c.values()[n] = 2.0 * a.values()[n] - 3.0 * b.values()[n];
  const Array2 pa = solve_poisson(a, g, kTight).phi, pb = solve_poisson(b, g, kTight).phi;
  const Array2 pc = solve_poisson(c, g, kTight).phi;
  EXPECT_LT(std::abs(mean(pc)), 1e-12 * max_abs(pc));
  for (std::size_t n = 0; n < c.size(); ++n)
    EXPECT_NEAR(pc.values()[n], 2.0 * pa.values()[n] - 3.0 * pb.values()[n], 1e-9 * max_abs(pc));
}

TEST(Poisson, IncompatibleRightHandSideThrows) {
  const Grid g = build_grid(oracle::desk_config(8, 8, 2));
  Array2 rhs = random_surface(g, 5);
  remove_mean(rhs);
  for (double& x : rhs.values()) x += 0.1;
  EXPECT_THROW(solve_poisson(rhs, g, kTight), EllipticError);
}

TEST(Poisson, IterationLimitThrows) {
  const Grid g = build_grid(oracle::desk_config(16, 16, 2));
  Array2 rhs = random_surface(g, 6);
  remove_mean(rhs);
  EXPECT_THROW(solve_poisson(rhs, g, SolverSpec{1e-14, 2}), EllipticError);
}

TEST(Poisson, ZeroRightHandSideGivesZero) {
  const Grid g = build_grid(oracle::desk_config(8, 8, 2));
  const PoissonResult r = solve_poisson(g.make_surface(), g, kTight);
  EXPECT_EQ(max_abs(r.phi), 0.0);
}

TEST(Projection, RemovesBarotropicDivergence) {
  const Grid g = build_grid(oracle::desk_config(12, 10, 6));
  Array3 u = oracle::random_smooth(g, 7), v = oracle::random_smooth(g, 8);
  const ProjectionResult r = project_barotropic(u, v, g, kTight);
  const Array3 div = horizontal_divergence(u, v, g);
  const Array2 mdiv = vertical_mean(div, g);
  EXPECT_LT(max_abs(mdiv), 1e-10 * 1.0 / g.dx);
  EXPECT_NEAR(r.max_divergence, max_abs(mdiv), 1e-12 / g.dx);
}

TEST(Projection, IsIdempotent) {
  const Grid g = build_grid(oracle::desk_config(10, 10, 4));
  Array3 u = oracle::random_smooth(g, 9), v = oracle::random_smooth(g, 10);
  project_barotropic(u, v, g, kTight);
  const Array3 u1 = u, v1 = v;
  const ProjectionResult r = project_barotropic(u, v, g, kTight);
  for (std::size_t n = 0; n < u.size(); ++n) {
    EXPECT_NEAR(u.values()[n], u1.values()[n], 1e-10);
    EXPECT_NEAR(v.values()[n], v1.values()[n], 1e-10);
  }
  EXPECT_LT(max_abs(r.phi), 1e-5);
}

TEST(Projection, CorrectionIsOrthogonal) {
  const Grid g = build_grid(oracle::desk_config(10, 8, 4));
  Array3 u = oracle::random_smooth(g, 11), v = oracle::random_smooth(g, 12);
  const Array3 u0 = u, v0 = v;
  project_barotropic(u, v, g, kTight);
  double cross = 0.0, norm = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    cross += u.values()[n] * (u0.values()[n] - u.values()[n]) + v.values()[n] * (v0.values()[n] - v.values()[n]);
    norm += u0.values()[n] * u0.values()[n] + v0.values()[n] * v0.values()[n];
  }
  EXPECT_LT(std::abs(cross), 1e-10 * norm);
}

TEST(Projection, LeavesBaroclinicFlowUntouched) {
  const Grid g = build_grid(oracle::desk_config(8, 8, 6));
  Array3 u = baroclinic_split(oracle::random_smooth(g, 13), g).remainder;
  Array3 v = baroclinic_split(oracle::random_smooth(g, 14), g).remainder;
  const Array3 u0 = u, v0 = v;
  project_barotropic(u, v, g, kTight);
  for (std::size_t n = 0; n < u.size(); ++n) {
    EXPECT_NEAR(u.values()[n], u0.values()[n], 1e-12);
    EXPECT_NEAR(v.values()[n], v0.values()[n], 1e-12);
  }
}
