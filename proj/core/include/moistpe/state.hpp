#pragma once

#include "moistpe/config.hpp"
#include "moistpe/field.hpp"
#include "moistpe/grid.hpp"

namespace moistpe {

/// Prognostic fields at one time level.
struct State {
  Array3 u, v;            // m/s
  Array3 t;               // K
  Array3 qv, qc, qr;      // kg/kg
  double time = 0.0;      // s

  static State zeros(const Grid& grid);
  [[nodiscard]] bool all_finite() const;

  Array3& scalar(Scalar s);
  [[nodiscard]] const Array3& scalar(Scalar s) const;

  bool operator==(const State&) const = default;
};

/// Fields diagnosed from a State.
struct Diagnosed {
  Array3 omega;  // on pressure faces, (nx, ny, np + 1); omega(.,.,np) = 0
  Array3 phi;    // full geopotential at cell centers
  Array2 phis;   // surface geopotential, zero mean
  Array3 theta;
};

/// Horizontal divergence of collocated (u, v) with zero normal flow on the walls.
/// Face velocities are the mean of the adjacent cells.
Array3 horizontal_divergence(const Array3& u, const Array3& v, const Grid& grid);

/// omega on pressure faces from the column integral of the horizontal divergence.
Array3 diagnose_omega(const Array3& u, const Array3& v, const Grid& grid);

/// Geopotential anomaly: integral of R T / sigma from p to p0 by midpoint rule.
Array3 geopotential_anomaly(const Array3& t, const Grid& grid, double r);

/// phi = phis + geopotential_anomaly.
Array3 diagnose_geopotential(const Array3& t, const Array2& phis, const Grid& grid, double r);

/// theta = T (p0 / p)^kappa, pointwise and on the grid.
double potential_temperature(double t, double p, double p0, double kappa);
double temperature_from_theta(double theta, double p, double p0, double kappa);
Array3 potential_temperature(const Array3& t, const Grid& grid, double kappa);
Array3 temperature_from_theta(const Array3& theta, const Grid& grid, double kappa);

struct BaroclinicSplit {
  Array2 mean;       // vertical average
  Array3 remainder;  // field minus vertical average
};

BaroclinicSplit baroclinic_split(const Array3& f, const Grid& grid);

/// Vertical average of a 3D field.
Array2 vertical_mean(const Array3& f, const Grid& grid);

}  // namespace moistpe
