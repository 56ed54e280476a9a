#include "moistpe/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace moistpe {

namespace {

double face_u(const Array3& u, int i, int j, int k, int nx) {
  // velocity on the face between i and i+1
  return (i < 0 || i + 1 >= nx) ? 0.0 : 0.5 * (u(i, j, k) + u(i + 1, j, k));
}

double face_v(const Array3& v, int i, int j, int k, int ny) {
  return (j < 0 || j + 1 >= ny) ? 0.0 : 0.5 * (v(i, j, k) + v(i, j + 1, k));
}

double robin_flux(double alpha, double target, double value, double h) {
  return alpha * (target - value) / (1.0 + 0.5 * alpha * h);
}

}  // namespace

Tendency Tendency::zeros(const Grid& grid) {
  Tendency t;
  t.u = t.v = t.t = t.qv = t.qc = t.qr = grid.make_field();
  return t;
}

Array3& Tendency::scalar(Scalar s) {
  switch (s) {
    case Scalar::T: return t;
    case Scalar::Qv: return qv;
    case Scalar::Qc: return qc;
    case Scalar::Qr: return qr;
  }
  return t;
}

RobinSpec robin_at(const BoundaryData& boundary, Scalar s, double time) {
  RobinSpec r = boundary.robin(s);
  r.bottom = boundary.bottom_target(s, time);
  r.lateral = boundary.lateral_target(s, time);
  return r;
}

void horizontal_gradient(const Array3& f, const Grid& grid, Array3& gx, Array3& gy) {
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        const double e = i + 1 < nx ? f(i + 1, j, k) - f(i, j, k) : 0.0;
        const double w = i > 0 ? f(i, j, k) - f(i - 1, j, k) : 0.0;
        const double n = j + 1 < ny ? f(i, j + 1, k) - f(i, j, k) : 0.0;
        const double s = j > 0 ? f(i, j, k) - f(i, j - 1, k) : 0.0;
        gx(i, j, k) = 0.5 * (e + w) / grid.dx;
        gy(i, j, k) = 0.5 * (n + s) / grid.dy;
      }
}

void horizontal_gradient(const Array2& f, const Grid& grid, Array2& gx, Array2& gy) {
  const int nx = grid.nx, ny = grid.ny;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double e = i + 1 < nx ? f(i + 1, j) - f(i, j) : 0.0;
      const double w = i > 0 ? f(i, j) - f(i - 1, j) : 0.0;
      const double n = j + 1 < ny ? f(i, j + 1) - f(i, j) : 0.0;
      const double s = j > 0 ? f(i, j) - f(i, j - 1) : 0.0;
      gx(i, j) = 0.5 * (e + w) / grid.dx;
      gy(i, j) = 0.5 * (n + s) / grid.dy;
    }
}

void advect_scalar(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid,
                   Array3& tend) {
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        const double fc = f(i, j, k);
        const double ue = face_u(u, i, j, k, nx);
        const double uw = face_u(u, i - 1, j, k, nx);
        const double vn = face_v(v, i, j, k, ny);
        const double vs = face_v(v, i, j - 1, k, ny);
        const double fe = ue >= 0.0 ? fc : f(i + 1, j, k);
        const double fw = uw >= 0.0 ? (i > 0 ? f(i - 1, j, k) : fc) : fc;
        const double fn = vn >= 0.0 ? fc : f(i, j + 1, k);
        const double fs = vs >= 0.0 ? (j > 0 ? f(i, j - 1, k) : fc) : fc;
        // omega > 0 moves mass toward larger k
        const double wt = omega(i, j, k);
        const double wb = omega(i, j, k + 1);
        const double ft = (k == 0 || wt < 0.0) ? fc : f(i, j, k - 1);
        const double fb = (wb >= 0.0 || k + 1 >= np) ? fc : f(i, j, k + 1);
        tend(i, j, k) -= (ue * fe - uw * fw) / grid.dx + (vn * fn - vs * fs) / grid.dy + (wb * fb - wt * ft) / grid.dp;
      }
}

void advect_advective(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid,
                      Array3& tend) {
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        const double fc = f(i, j, k);
        double acc = 0.0;
        const double ue = face_u(u, i, j, k, nx);
        const double uw = face_u(u, i - 1, j, k, nx);
        if (ue < 0.0) acc += -ue * (f(i + 1, j, k) - fc) / grid.dx;
        if (uw > 0.0) acc += uw * (f(i - 1, j, k) - fc) / grid.dx;
        const double vn = face_v(v, i, j, k, ny);
        const double vs = face_v(v, i, j - 1, k, ny);
        if (vn < 0.0) acc += -vn * (f(i, j + 1, k) - fc) / grid.dy;
        if (vs > 0.0) acc += vs * (f(i, j - 1, k) - fc) / grid.dy;
        const double wt = omega(i, j, k);
        const double wb = omega(i, j, k + 1);
        if (k > 0 && wt > 0.0) acc += wt * (f(i, j, k - 1) - fc) / grid.dp;
        if (k + 1 < np && wb < 0.0) acc += -wb * (f(i, j, k + 1) - fc) / grid.dp;
        tend(i, j, k) += acc;
      }
}

Array3 advect(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid) {
  Array3 tend = grid.make_field();
  advect_scalar(f, u, v, omega, grid, tend);
  return tend;
}

void diffuse_horizontal(const Array3& f, double mu, const RobinSpec& robin, const Grid& grid, Array3& tend) {
  if (mu == 0.0) return;
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  const double al = robin.alpha_lateral, fb = robin.lateral;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        const double fc = f(i, j, k);
        const double e = i + 1 < nx ? (f(i + 1, j, k) - fc) / grid.dx : robin_flux(al, fb, fc, grid.dx);
        const double w = i > 0 ? (fc - f(i - 1, j, k)) / grid.dx : -robin_flux(al, fb, fc, grid.dx);
        const double n = j + 1 < ny ? (f(i, j + 1, k) - fc) / grid.dy : robin_flux(al, fb, fc, grid.dy);
        const double s = j > 0 ? (fc - f(i, j - 1, k)) / grid.dy : -robin_flux(al, fb, fc, grid.dy);
        tend(i, j, k) += mu * ((e - w) / grid.dx + (n - s) / grid.dy);
      }
}

void diffuse_vertical(const Array3& f, double nu, const RobinSpec& robin, const Grid& grid, Array3& tend) {
  if (nu == 0.0) return;
  const int np = grid.np;
  const double wb2 = grid.weight_face[np] * grid.weight_face[np];
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      auto col = f.column(i, j);
      auto out = tend.column(i, j);
      for (int k = 0; k < np; ++k) {
        double below, above;  // w^2 d_p f on faces k+1 and k
        if (k + 1 < np) {
          const double w = grid.weight_face[k + 1];
          below = w * w * (col[k + 1] - col[k]) / grid.dp;
        } else {
          below = wb2 * robin_flux(robin.alpha_bottom, robin.bottom, col[k], grid.dp);
        }
        if (k > 0) {
          const double w = grid.weight_face[k];
          above = w * w * (col[k] - col[k - 1]) / grid.dp;
        } else {
          above = 0.0;
        }
        out[k] += nu * (below - above) / grid.dp;
      }
    }
}

Array3 diffuse(const Array3& f, const Diffusivity& d, const RobinSpec& robin, const Grid& grid) {
  if (d.mu < 0.0 || d.nu < 0.0) throw std::invalid_argument("diffusivity must be nonnegative");
  if (robin.alpha_bottom < 0.0 || robin.alpha_lateral < 0.0)
    throw std::invalid_argument("Robin coefficients must be nonnegative");
  Array3 tend = grid.make_field();
  diffuse_horizontal(f, d.mu, robin, grid, tend);
  diffuse_vertical(f, d.nu, robin, grid, tend);
  return tend;
}

void diffuse_velocity_horizontal(const Array3& u, const Array3& v, double mu, const Grid& grid, Array3& tu,
                                 Array3& tv) {
  if (mu == 0.0) return;
  const int nx = grid.nx, ny = grid.ny, np = grid.np;
  // normal component: ghost value -f (no flow through the wall); tangential: ghost value f
  auto lap = [&](const Array3& f, int i, int j, int k, bool normal_x) {
    const double fc = f(i, j, k);
    const double e = i + 1 < nx ? f(i + 1, j, k) - fc : (normal_x ? -2.0 * fc : 0.0);
    const double w = i > 0 ? fc - f(i - 1, j, k) : (normal_x ? 2.0 * fc : 0.0);
    const double n = j + 1 < ny ? f(i, j + 1, k) - fc : (normal_x ? 0.0 : -2.0 * fc);
    const double s = j > 0 ? fc - f(i, j - 1, k) : (normal_x ? 0.0 : 2.0 * fc);
    return (e - w) / (grid.dx * grid.dx) + (n - s) / (grid.dy * grid.dy);
  };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < np; ++k) {
        tu(i, j, k) += mu * lap(u, i, j, k, true);
        tv(i, j, k) += mu * lap(v, i, j, k, false);
      }
}

void diffuse_velocity_vertical(const Array3& u, const Array3& v, double nu, double alpha_u, const Grid& grid,
                               Array3& tu, Array3& tv) {
  const RobinSpec drag{alpha_u, 0.0, 0.0, 0.0};
  diffuse_vertical(u, nu, drag, grid, tu);
  diffuse_vertical(v, nu, drag, grid, tv);
}

bool implicit_vertical_diffusion(Array3& f, double nu, double alpha_bottom, double target, double dt,
                                 const Grid& grid) {
  if (nu == 0.0) return true;
  const int np = grid.np;
  std::vector<double> lower(np), diag(np), upper(np), rhs(np);
  std::vector<double> coef(np + 1, 0.0);  // nu dt w^2 / dp^2 on interior faces
  for (int kf = 1; kf < np; ++kf) {
    const double w = grid.weight_face[kf];
    coef[kf] = nu * dt * w * w / (grid.dp * grid.dp);
  }
  const double wb = grid.weight_face[np];
  const double robin = nu * dt * wb * wb * alpha_bottom / (1.0 + 0.5 * alpha_bottom * grid.dp) / grid.dp;

  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      auto col = f.column(i, j);
      for (int k = 0; k < np; ++k) {
        lower[k] = -coef[k];
        upper[k] = -coef[k + 1];
        diag[k] = 1.0 + coef[k] + coef[k + 1];
        rhs[k] = col[k];
      }
      diag[np - 1] += robin;
      rhs[np - 1] += robin * target;
      // Thomas algorithm
      for (int k = 1; k < np; ++k) {
        if (diag[k - 1] == 0.0) return false;
        const double m = lower[k] / diag[k - 1];
        diag[k] -= m * upper[k - 1];
        rhs[k] -= m * rhs[k - 1];
      }
      if (diag[np - 1] == 0.0) return false;
      col[np - 1] = rhs[np - 1] / diag[np - 1];
      for (int k = np - 2; k >= 0; --k) col[k] = (rhs[k] - upper[k] * col[k + 1]) / diag[k];
    }
  return true;
}

void sedimentation(const Array3& qr, double v_fall, const Grid& grid, Array3& tend) {
  if (v_fall == 0.0) return;
  const int np = grid.np;
  std::vector<double> scale(np + 1, 0.0);  // V p / (Rd Tbar) on faces; top face carries no flux
  for (int kf = 1; kf <= np; ++kf) scale[kf] = v_fall * grid.p_face[kf] / (grid.rd * grid.tbar_face[kf]);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      auto col = qr.column(i, j);
      auto out = tend.column(i, j);
      double above = 0.0;
      for (int k = 0; k < np; ++k) {
        const double below = scale[k + 1] * col[k];
        out[k] -= (below - above) / grid.dp;
        above = below;
      }
    }
}

Array3 sedimentation(const Array3& qr, double v_fall, const Grid& grid) {
  Array3 tend = grid.make_field();
  sedimentation(qr, v_fall, grid, tend);
  return tend;
}

double sedimentation_surface_flux(const Array3& qr, double v_fall, const Grid& grid, int i, int j) {
  return v_fall * grid.p0 / (grid.rd * grid.tbar_face[grid.np]) * qr(i, j, grid.np - 1);
}

void coriolis(const Array3& u, const Array3& v, double f, Array3& tu, Array3& tv) {
  if (f == 0.0) return;
  auto uu = u.values();
  auto vv = v.values();
  auto a = tu.values();
  auto b = tv.values();
  for (std::size_t n = 0; n < uu.size(); ++n) {
    a[n] += f * vv[n];
    b[n] -= f * uu[n];
  }
}

void pressure_gradient(const Array3& phi, const Grid& grid, Array3& tu, Array3& tv) {
  Array3 gx = grid.make_field(), gy = grid.make_field();
  horizontal_gradient(phi, grid, gx, gy);
  auto a = tu.values();
  auto b = tv.values();
  auto x = gx.values();
  auto y = gy.values();
  for (std::size_t n = 0; n < a.size(); ++n) {
    a[n] -= x[n];
    b[n] -= y[n];
  }
}

void adiabatic_heating(const Array3& t, const Array3& omega, double kappa, const Grid& grid, Array3& tend) {
  const int np = grid.np;
  std::vector<double> hp(np), hm(np);
  for (int k = 0; k < np; ++k) {
    // lower-half and upper-half midpoint weights of dp / p
    hp[k] = 0.5 * grid.dp / (grid.p[k] + 0.25 * grid.dp);
    hm[k] = grid.dp / grid.p[k] - hp[k];
  }
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      auto col = t.column(i, j);
      auto w = omega.column(i, j);
      auto out = tend.column(i, j);
      for (int k = 0; k < np; ++k) out[k] += kappa * col[k] * (hp[k] * w[k + 1] + hm[k] * w[k]) / grid.dp;
    }
}

MomentumTendency momentum_rhs(const State& state, const Diagnosed& diag, const Grid& grid, const Params& params,
                              const BoundaryData& boundary) {
  MomentumTendency m{grid.make_field(), grid.make_field()};
  advect_advective(state.u, state.u, state.v, diag.omega, grid, m.u);
  advect_advective(state.v, state.u, state.v, diag.omega, grid, m.v);
  coriolis(state.u, state.v, params.f, m.u, m.v);
  pressure_gradient(diag.phi, grid, m.u, m.v);
  diffuse_velocity_horizontal(state.u, state.v, params.u.mu, grid, m.u, m.v);
  diffuse_velocity_vertical(state.u, state.v, params.u.nu, boundary.alpha_u, grid, m.u, m.v);
  return m;
}

}  // namespace moistpe
