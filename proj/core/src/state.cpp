#include "moistpe/state.hpp"

#include <cmath>

namespace moistpe {

State State::zeros(const Grid& grid) {
  State s;
  s.u = s.v = s.t = s.qv = s.qc = s.qr = grid.make_field();
  return s;
}

bool State::all_finite() const {
  for (const Array3* f : {&u, &v, &t, &qv, &qc, &qr})
    for (double x : f->values())
      if (!std::isfinite(x)) return false;
  return std::isfinite(time);
}

Array3& State::scalar(Scalar s) {
  switch (s) {
    case Scalar::T: return t;
    case Scalar::Qv: return qv;
    case Scalar::Qc: return qc;
    case Scalar::Qr: return qr;
  }
  return t;
}

const Array3& State::scalar(Scalar s) const { return const_cast<State&>(*this).scalar(s); }

Array3 horizontal_divergence(const Array3& u, const Array3& v, const Grid& grid) {
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  Array3 div = grid.make_field();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        const double ue = i + 1 < nx ? 0.5 * (u(i, j, k) + u(i + 1, j, k)) : 0.0;
        const double uw = i > 0 ? 0.5 * (u(i - 1, j, k) + u(i, j, k)) : 0.0;
        const double vn = j + 1 < ny ? 0.5 * (v(i, j, k) + v(i, j + 1, k)) : 0.0;
        const double vs = j > 0 ? 0.5 * (v(i, j - 1, k) + v(i, j, k)) : 0.0;
        div(i, j, k) = (ue - uw) / grid.dx + (vn - vs) / grid.dy;
      }
  return div;
}

Array3 diagnose_omega(const Array3& u, const Array3& v, const Grid& grid) {
  const Array3 div = horizontal_divergence(u, v, grid);
  Array3 omega = grid.make_face_field();
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      const auto faces = vertical_integral(div.column(i, j), grid);
      auto col = omega.column(i, j);
      std::copy(faces.begin(), faces.end(), col.begin());
    }
  return omega;
}

Array3 geopotential_anomaly(const Array3& t, const Grid& grid, double r) {
  Array3 phi = grid.make_field();
  const double half = 0.5 * grid.dp;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      double below = 0.0;  // integral over the full cells below k
      for (int k = grid.np - 1; k >= 0; --k) {
        const double tk = t(i, j, k);
        // midpoint rule on the lower half cell [p_k, p_k + dp/2]
        phi(i, j, k) = below + r * tk * half / (grid.p[k] + 0.5 * half);
        below += r * tk * grid.dp / grid.p[k];
      }
    }
  return phi;
}

Array3 diagnose_geopotential(const Array3& t, const Array2& phis, const Grid& grid, double r) {
  Array3 phi = geopotential_anomaly(t, grid, r);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (double& x : phi.column(i, j)) x += phis(i, j);
  return phi;
}

double potential_temperature(double t, double p, double p0, double kappa) { return t * std::pow(p0 / p, kappa); }

double temperature_from_theta(double theta, double p, double p0, double kappa) {
  return theta / std::pow(p0 / p, kappa);
}

Array3 potential_temperature(const Array3& t, const Grid& grid, double kappa) {
  Array3 theta = t;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (int k = 0; k < grid.np; ++k) theta(i, j, k) = potential_temperature(t(i, j, k), grid.p[k], grid.p0, kappa);
  return theta;
}

Array3 temperature_from_theta(const Array3& theta, const Grid& grid, double kappa) {
  Array3 t = theta;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (int k = 0; k < grid.np; ++k) t(i, j, k) = temperature_from_theta(theta(i, j, k), grid.p[k], grid.p0, kappa);
  return t;
}

Array2 vertical_mean(const Array3& f, const Grid& grid) {
  Array2 mean = grid.make_surface();
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      double s = 0.0;
      for (double x : f.column(i, j)) s += x;
      mean(i, j) = s / grid.np;
    }
  return mean;
}

BaroclinicSplit baroclinic_split(const Array3& f, const Grid& grid) {
  BaroclinicSplit out{vertical_mean(f, grid), f};
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      for (double& x : out.remainder.column(i, j)) x -= out.mean(i, j);
  return out;
}

}  // namespace moistpe
