#pragma once

#include "moistpe/config.hpp"
#include "moistpe/field.hpp"
#include "moistpe/grid.hpp"
#include "moistpe/state.hpp"

namespace moistpe {

/// Time derivatives of every prognostic field.
struct Tendency {
  Array3 u, v, t, qv, qc, qr;

  static Tendency zeros(const Grid& grid);
  Array3& scalar(Scalar s);
};

/// Robin data with the time modulation already applied to the targets.
RobinSpec robin_at(const BoundaryData& boundary, Scalar s, double time);

/// Per-level horizontal gradient, the negative adjoint of horizontal_divergence:
/// each cell averages the differences across its interior faces (walls contribute 0).
void horizontal_gradient(const Array3& f, const Grid& grid, Array3& gx, Array3& gy);
void horizontal_gradient(const Array2& f, const Grid& grid, Array2& gx, Array2& gy);

/// Upwind flux-form transport -div((u, v, omega) f), accumulated into tend.
/// The top face carries omega f of the top cell, so constants are transported exactly.
void advect_scalar(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid,
                   Array3& tend);

/// Upwind advective form -(u . grad_h + omega d_p) f, accumulated into tend.
void advect_advective(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid,
                      Array3& tend);

/// Flux-form scalar advection tendency.
Array3 advect(const Array3& f, const Array3& u, const Array3& v, const Array3& omega, const Grid& grid);

/// mu Laplacian with Robin walls d_n f = alpha (target - f), accumulated into tend.
void diffuse_horizontal(const Array3& f, double mu, const RobinSpec& robin, const Grid& grid, Array3& tend);

/// nu d_p(w^2 d_p f) with d_p f = 0 on top and d_p f = alpha (target - f) on the surface.
void diffuse_vertical(const Array3& f, double nu, const RobinSpec& robin, const Grid& grid, Array3& tend);

/// Full anisotropic diffusion of a scalar. Throws std::invalid_argument for negative coefficients.
Array3 diffuse(const Array3& f, const Diffusivity& d, const RobinSpec& robin, const Grid& grid);

/// Horizontal viscosity with free-slip walls: zero normal velocity, zero normal
/// derivative of the tangential component.
void diffuse_velocity_horizontal(const Array3& u, const Array3& v, double mu, const Grid& grid, Array3& tu,
                                 Array3& tv);

/// Vertical viscosity with surface drag d_p u = -alpha_u u and free top.
void diffuse_velocity_vertical(const Array3& u, const Array3& v, double nu, double alpha_u, const Grid& grid,
                               Array3& tu, Array3& tv);

/// Backward Euler step of nu d_p(w^2 d_p f) with the Robin surface closure, one
/// tridiagonal solve per column. Returns false if a pivot vanishes.
bool implicit_vertical_diffusion(Array3& f, double nu, double alpha_bottom, double target, double dt,
                                 const Grid& grid);

/// -V d_p(p qr / (Rd Tbar)) with upwind fluxes toward p0, zero flux through p1, outflow at p0.
void sedimentation(const Array3& qr, double v_fall, const Grid& grid, Array3& tend);
Array3 sedimentation(const Array3& qr, double v_fall, const Grid& grid);

/// Downward rain flux through the surface, per unit area (Pa/s times kg/kg).
double sedimentation_surface_flux(const Array3& qr, double v_fall, const Grid& grid, int i, int j);

/// (f v, -f u), accumulated.
void coriolis(const Array3& u, const Array3& v, double f, Array3& tu, Array3& tv);

/// -grad_h phi, accumulated.
void pressure_gradient(const Array3& phi, const Grid& grid, Array3& tu, Array3& tv);

/// kappa T omega / p, evaluated so that its heat content balances the work of the
/// geopotential anomaly gradient exactly except for the flow through p1.
void adiabatic_heating(const Array3& t, const Array3& omega, double kappa, const Grid& grid, Array3& tend);

struct MomentumTendency {
  Array3 u, v;
};

/// Advection, Coriolis, -grad_h phi and explicit viscosity for (u, v).
MomentumTendency momentum_rhs(const State& state, const Diagnosed& diag, const Grid& grid, const Params& params,
                              const BoundaryData& boundary);

}  // namespace moistpe
