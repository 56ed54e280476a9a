#include "moistpe/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moistpe/operators.hpp"
#include "moistpe/state.hpp"

namespace moistpe {

namespace {

double dot(const Array2& a, const Array2& b) {
  return std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double mean(const Array2& a) {
  const auto v = a.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Array2 divergence2d(const Array2& u, const Array2& v, const Grid& grid) {
  const int nx = grid.nx, ny = grid.ny;
  Array2 div = grid.make_surface();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double ue = i + 1 < nx ? 0.5 * (u(i, j) + u(i + 1, j)) : 0.0;
      const double uw = i > 0 ? 0.5 * (u(i - 1, j) + u(i, j)) : 0.0;
      const double vn = j + 1 < ny ? 0.5 * (v(i, j) + v(i, j + 1)) : 0.0;
      const double vs = j > 0 ? 0.5 * (v(i, j - 1) + v(i, j)) : 0.0;
      div(i, j) = (ue - uw) / grid.dx + (vn - vs) / grid.dy;
    }
  return div;
}

Array2 laplacian2d(const Array2& phi, const Grid& grid) {
  Array2 gx = grid.make_surface(), gy = grid.make_surface();
  horizontal_gradient(phi, grid, gx, gy);
  return divergence2d(gx, gy, grid);
}

PoissonResult solve_poisson(const Array2& rhs_in, const Grid& grid, const SolverSpec& solver, double compat_scale) {
  PoissonResult out{grid.make_surface(), 0, 0.0};
  Array2 rhs = rhs_in;
  const double m = mean(rhs);
  const double scale = std::max(compat_scale, max_abs(rhs.values()));
  if (std::abs(m) > 1e-12 * scale) throw EllipticError("incompatible right-hand side: nonzero mean");
  for (double& x : rhs.values()) x -= m;

  // CG on A = -laplacian, which is positive definite on zero-mean fields.
  Array2 r = rhs;
  for (double& x : r.values()) x = -x;
  const double bnorm = std::sqrt(dot(r, r));
  if (bnorm == 0.0) return out;

  Array2 d = r;
  double rr = dot(r, r);
  Array2& x = out.phi;
  int it = 0;
  while (std::sqrt(rr) > solver.tolerance * bnorm) {
    if (it >= solver.max_iterations)
      throw EllipticError("conjugate gradients did not converge in " + std::to_string(it) + " iterations");
    Array2 ad = laplacian2d(d, grid);
    for (double& v : ad.values()) v = -v;
    const double alpha = rr / dot(d, ad);
    auto xv = x.values();
    auto rv = r.values();
    auto dv = d.values();
    auto av = ad.values();
    for (std::size_t n = 0; n < xv.size(); ++n) {
      xv[n] += alpha * dv[n];
      rv[n] -= alpha * av[n];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    for (std::size_t n = 0; n < dv.size(); ++n) dv[n] = rv[n] + beta * dv[n];
    rr = rr_new;
    ++it;
  }
  const double xm = mean(x);
  for (double& v : x.values()) v -= xm;
  out.iterations = it;
  out.relative_residual = std::sqrt(rr) / bnorm;
  return out;
}

ProjectionResult project_barotropic(Array3& u, Array3& v, const Grid& grid, const SolverSpec& solver) {
  const Array2 ubar = vertical_mean(u, grid);
  const Array2 vbar = vertical_mean(v, grid);
  const Array2 div = divergence2d(ubar, vbar, grid);
  // roundoff in the discrete divergence scales with the face fluxes, not with the divergence
  const double flux_scale =
      std::max(max_abs(ubar.values()) / grid.dx, max_abs(vbar.values()) / grid.dy);

  PoissonResult sol = solve_poisson(div, grid, solver, flux_scale);
  Array2 gx = grid.make_surface(), gy = grid.make_surface();
  horizontal_gradient(sol.phi, grid, gx, gy);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      for (double& x : u.column(i, j)) x -= gx(i, j);
      for (double& x : v.column(i, j)) x -= gy(i, j);
    }

  ProjectionResult out;
  out.phi = std::move(sol.phi);
  out.iterations = sol.iterations;
  out.max_divergence = max_abs(divergence2d(vertical_mean(u, grid), vertical_mean(v, grid), grid).values());
  return out;
}

}  // namespace moistpe
