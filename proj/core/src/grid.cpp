#include "moistpe/grid.hpp"

#include <algorithm>

namespace moistpe {

double background_temperature(const GridSpec& spec, double p) {
  if (spec.tbar_profile == TbarProfile::Constant) return spec.tbar_top;
  const double s = (p - spec.p1) / (spec.p0 - spec.p1);
  return spec.tbar_top + s * (spec.tbar_bottom - spec.tbar_top);
}

Grid build_grid(const RunConfig& cfg) {
  const auto& s = cfg.grid;
  Grid g;
  g.nx = s.nx;
  g.ny = s.ny;
  g.np = s.np;
  g.lx = s.lx;
  g.ly = s.ly;
  g.p1 = s.p1;
  g.p0 = s.p0;
  g.dx = s.lx / s.nx;
  g.dy = s.ly / s.ny;
  g.dp = (s.p0 - s.p1) / s.np;
  g.rd = cfg.params.rd;
  g.g = cfg.params.g;

  for (int i = 0; i < s.nx; ++i) g.x.push_back((i + 0.5) * g.dx);
  for (int j = 0; j < s.ny; ++j) g.y.push_back((j + 0.5) * g.dy);
  for (int k = 0; k < s.np; ++k) g.p.push_back(s.p1 + (k + 0.5) * g.dp);
  for (int k = 0; k <= s.np; ++k) g.p_face.push_back(k == s.np ? s.p0 : s.p1 + k * g.dp);

  auto weight = [&](double p, double tb) { return g.g * p / (g.rd * tb); };
  for (double p : g.p) {
    g.tbar.push_back(background_temperature(s, p));
    g.weight.push_back(weight(p, g.tbar.back()));
  }
  for (double p : g.p_face) {
    g.tbar_face.push_back(background_temperature(s, p));
    g.weight_face.push_back(weight(p, g.tbar_face.back()));
  }
  return g;
}

double Grid::tbar_min() const {
  return std::min(*std::min_element(tbar.begin(), tbar.end()), *std::min_element(tbar_face.begin(), tbar_face.end()));
}

std::vector<BoundaryFace> Grid::boundary_faces() const {
  std::vector<BoundaryFace> out;
  out.reserve(2 * nx * ny + 2 * (nx + ny) * np);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      out.push_back({i, j, 0, FaceDir::Up, BoundaryPart::Top});
      out.push_back({i, j, np - 1, FaceDir::Down, BoundaryPart::Surface});
    }
  for (int k = 0; k < np; ++k) {
    for (int j = 0; j < ny; ++j) {
      out.push_back({0, j, k, FaceDir::West, BoundaryPart::Lateral});
      out.push_back({nx - 1, j, k, FaceDir::East, BoundaryPart::Lateral});
    }
    for (int i = 0; i < nx; ++i) {
      out.push_back({i, 0, k, FaceDir::South, BoundaryPart::Lateral});
      out.push_back({i, ny - 1, k, FaceDir::North, BoundaryPart::Lateral});
    }
  }
  return out;
}

std::vector<double> vertical_integral(std::span<const double> column, const Grid& grid) {
  std::vector<double> out(grid.np + 1, 0.0);
  for (int k = grid.np - 1; k >= 0; --k) out[k] = out[k + 1] + column[k] * grid.dp;
  return out;
}

}  // namespace moistpe
