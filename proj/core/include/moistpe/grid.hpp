#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "moistpe/config.hpp"
#include "moistpe/field.hpp"

namespace moistpe {

/// Boundary parts of the box: surface (p = p0), top (p = p1), lateral walls.
enum class BoundaryPart { Surface, Top, Lateral };

/// Outward direction of a cell face lying on the boundary.
enum class FaceDir { West, East, South, North, Up, Down };

struct BoundaryFace {
  int i, j, k;
  FaceDir dir;
  BoundaryPart part;
};

/// Uniform cell-centered mesh on [0,lx] x [0,ly] x (p1,p0).
///
/// Vertical index k = 0 is the layer touching p1; k = np-1 touches p0.
/// Pressure faces are numbered kf = 0..np with p_face[0] = p1 and p_face[np] = p0.
struct Grid {
  int nx = 0, ny = 0, np = 0;
  double lx = 0, ly = 0, p1 = 0, p0 = 0;
  double dx = 0, dy = 0, dp = 0;
  double rd = 0, g = 0;

  std::vector<double> x, y, p;   // cell centers
  std::vector<double> p_face;    // np + 1 entries
  std::vector<double> tbar;      // background temperature at p
  std::vector<double> tbar_face;
  std::vector<double> weight;    // g p / (rd tbar) at p
  std::vector<double> weight_face;

  [[nodiscard]] std::size_t cells() const { return static_cast<std::size_t>(nx) * ny * np; }
  [[nodiscard]] double cell_volume() const { return dx * dy * dp; }
  [[nodiscard]] double column_area() const { return dx * dy; }
  [[nodiscard]] double volume() const { return lx * ly * (p0 - p1); }
  [[nodiscard]] double area() const { return lx * ly; }
  [[nodiscard]] double tbar_min() const;

  [[nodiscard]] Array3 make_field(double value = 0.0) const { return {std::size_t(nx), std::size_t(ny), std::size_t(np), value}; }
  [[nodiscard]] Array3 make_face_field(double value = 0.0) const {
    return {std::size_t(nx), std::size_t(ny), std::size_t(np) + 1, value};
  }
  [[nodiscard]] Array2 make_surface(double value = 0.0) const { return {std::size_t(nx), std::size_t(ny), value}; }

  /// Every boundary face of the mesh, each exactly once.
  [[nodiscard]] std::vector<BoundaryFace> boundary_faces() const;

  /// Midpoint quadrature weights in p; they sum to p0 - p1.
  [[nodiscard]] std::vector<double> quadrature_weights() const { return std::vector<double>(np, dp); }

  bool operator==(const Grid&) const = default;
};

double background_temperature(const GridSpec& spec, double p);

Grid build_grid(const RunConfig& cfg);

/// Column integral from each pressure face down to p0 by midpoint rule.
/// Returns np + 1 values; out[np] = 0 and out[0] is the full-column integral.
std::vector<double> vertical_integral(std::span<const double> column, const Grid& grid);

}  // namespace moistpe
