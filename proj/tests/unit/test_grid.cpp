#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "moistpe/grid.hpp"
#include "oracles.hpp"

using namespace moistpe;

TEST(Grid, PressureSpacing) {
  RunConfig c = oracle::desk_config(2, 2, 2);
  c.grid.p1 = 1.0e4;
  c.grid.p0 = 1.0e5;
  const Grid g = build_grid(c);
  EXPECT_DOUBLE_EQ(g.dp, 45000.0);
  EXPECT_DOUBLE_EQ(g.p[0], 1.0e4 + 22500.0);
  EXPECT_DOUBLE_EQ(g.p[1], 1.0e5 - 22500.0);
  EXPECT_EQ(g.p_face.front(), 1.0e4);
  EXPECT_EQ(g.p_face.back(), 1.0e5);
}

TEST(Grid, LayoutAndMonotonePressure) {
  const Grid g = build_grid(oracle::desk_config(5, 4, 7));
  EXPECT_EQ(g.cells(), 140u);
  EXPECT_DOUBLE_EQ(g.dx, 2.0e4);
  EXPECT_DOUBLE_EQ(g.dy, 2.5e4);
  for (int k = 1; k < g.np; ++k) EXPECT_LT(g.p[k - 1], g.p[k]);
  for (int k = 0; k < g.np; ++k) {
    EXPECT_LT(g.p_face[k], g.p[k]);
    EXPECT_GT(g.p_face[k + 1], g.p[k]);
  }
  EXPECT_DOUBLE_EQ(g.x.front(), 1.0e4);
  EXPECT_DOUBLE_EQ(g.y.back(), 1.0e5 - 1.25e4);
}

TEST(Grid, BoundaryFacesPartitionTheBoundary) {
  const Grid g = build_grid(oracle::desk_config(3, 4, 5));
  std::map<BoundaryPart, int> count;
  std::set<std::tuple<int, int, int, FaceDir>> seen;
  for (const BoundaryFace& f : g.boundary_faces()) {
    EXPECT_TRUE(seen.insert({f.i, f.j, f.k, f.dir}).second) << "face listed twice";
    ++count[f.part];
    switch (f.dir) {
      case FaceDir::Up: EXPECT_EQ(f.part, BoundaryPart::Top); EXPECT_EQ(f.k, 0); break;
      case FaceDir::Down: EXPECT_EQ(f.part, BoundaryPart::Surface); EXPECT_EQ(f.k, g.np - 1); break;
      case FaceDir::West: EXPECT_EQ(f.i, 0); EXPECT_EQ(f.part, BoundaryPart::Lateral); break;
      case FaceDir::East: EXPECT_EQ(f.i, g.nx - 1); EXPECT_EQ(f.part, BoundaryPart::Lateral); break;
      case FaceDir::South: EXPECT_EQ(f.j, 0); EXPECT_EQ(f.part, BoundaryPart::Lateral); break;
      case FaceDir::North: EXPECT_EQ(f.j, g.ny - 1); EXPECT_EQ(f.part, BoundaryPart::Lateral); break;
    }
  }
  EXPECT_EQ(count[BoundaryPart::Surface], 12);
  EXPECT_EQ(count[BoundaryPart::Top], 12);
  EXPECT_EQ(count[BoundaryPart::Lateral], 2 * 4 * 5 + 2 * 3 * 5);
}

TEST(Grid, WeightIncreasesWithPressureForConstantBackground) {
  const Grid g = build_grid(oracle::desk_config(2, 2, 16));
  for (int k = 0; k < g.np; ++k) {
    EXPECT_DOUBLE_EQ(g.tbar[k], 300.0);
    EXPECT_NEAR(g.weight[k], 9.81 * g.p[k] / (287.0 * 300.0), 1e-15 * g.weight[k]);
    if (k > 0) EXPECT_GT(g.weight[k], g.weight[k - 1]);
  }
  for (int kf = 1; kf <= g.np; ++kf) EXPECT_GT(g.weight_face[kf], g.weight_face[kf - 1]);
}

TEST(Grid, LinearBackgroundProfile) {
  RunConfig c = oracle::desk_config(2, 2, 4);
  c.grid.tbar_profile = TbarProfile::Linear;
  c.grid.tbar_top = 220.0;
  c.grid.tbar_bottom = 300.0;
  const Grid g = build_grid(c);
  EXPECT_DOUBLE_EQ(g.tbar_face.front(), 220.0);
  EXPECT_DOUBLE_EQ(g.tbar_face.back(), 300.0);
  EXPECT_DOUBLE_EQ(g.tbar[0], 230.0);
  EXPECT_DOUBLE_EQ(g.tbar_min(), 220.0);  // faces included
}

TEST(Grid, QuadratureWeightsSumToDepth) {
  for (int np : {1, 3, 8, 33, 100}) {
    const Grid g = build_grid(oracle::desk_config(2, 2, np));
    const auto w = g.quadrature_weights();
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), g.p0 - g.p1, 1e-9);
  }
}

TEST(Grid, ConstructionIsPure) {
  const RunConfig c = oracle::desk_config(6, 5, 4);
  EXPECT_EQ(build_grid(c), build_grid(c));
}

TEST(VerticalIntegral, ConstantIntegrand) {
  const Grid g = build_grid(oracle::desk_config(2, 2, 8));
  const std::vector<double> col(g.np, 2.5);
  const auto out = vertical_integral(col, g);
  ASSERT_EQ(out.size(), std::size_t(g.np + 1));
  for (int kf = 0; kf <= g.np; ++kf) EXPECT_NEAR(out[kf], 2.5 * (g.p0 - g.p_face[kf]), 1e-9);
  EXPECT_EQ(out[g.np], 0.0);
}

TEST(VerticalIntegral, LinearIntegrandIsExact) {
  const Grid g = build_grid(oracle::desk_config(2, 2, 7));
  std::vector<double> col(g.np);
  for (int k = 0; k < g.np; ++k) col[k] = 3.0 - 2.0e-5 * g.p[k];
  const auto out = vertical_integral(col, g);
  auto antiderivative = [](double p) { return 3.0 * p - 1.0e-5 * p * p; };
  for (int kf = 0; kf <= g.np; ++kf) {
    const double exact = antiderivative(g.p0) - antiderivative(g.p_face[kf]);
    EXPECT_NEAR(out[kf], exact, 1e-9 * std::abs(antiderivative(g.p0)));
  }
}

TEST(VerticalIntegral, ZeroField) {
  const Grid g = build_grid(oracle::desk_config(2, 2, 5));
  for (double v : vertical_integral(std::vector<double>(g.np, 0.0), g)) EXPECT_EQ(v, 0.0);
}
