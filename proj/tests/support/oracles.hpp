#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// the library routine it is meant to check.

#include <cstdint>
#include <vector>

#include "moistpe/config.hpp"
#include "moistpe/field.hpp"
#include "moistpe/grid.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;
using Vector = std::vector<long double>;

/// Desk-scale configuration shared by the tests.
moistpe::RunConfig desk_config(int nx = 16, int ny = 16, int np = 8);

/// Gaussian elimination with partial pivoting.
Vector dense_solve(Matrix a, Vector b);

/// Midpoint-rule norms by explicit triple loops in long double.
long double l2_sq(const moistpe::Array3& f, const moistpe::Grid& g);
long double l1(const moistpe::Array3& f, const moistpe::Grid& g);

/// Matrix of the 2D Neumann operator div(grad) where the cell gradient averages
/// the differences across interior faces and the face velocity averages the
/// adjacent cells, both with nothing through the walls. Row/column n = i * ny + j.
Matrix wide_laplacian_matrix(const moistpe::Grid& g);

/// Zero-mean solution of wide_laplacian_matrix(g) phi = rhs via a bordered system.
Vector poisson_dense(const moistpe::Grid& g, const Vector& rhs);

/// Backward Euler of nu d_p(w^2 d_p f) on one column, with zero flux through p1 and
/// the flux w(p0)^2 alpha (target - f_bottom) / (1 + alpha dp / 2) through p0,
/// assembled as a dense matrix.
Vector implicit_column(const moistpe::Grid& g, const Vector& f, double nu, double alpha, double target, double dt);

struct Sources {
  long double sev, scd, sac, scr;
};
/// Closures written out from their definitions.
long double qvs_reference(double t, const moistpe::Params& p);
Sources sources_raw_reference(double t, double qv, double qc, double qr, const moistpe::Params& p);
Sources sources_eps_reference(double t, double qv, double qc, double qr, double eps, const moistpe::Params& p);

/// Field filled from a function of the cell centre (x, y, p).
template <class F>
moistpe::Array3 sample(const moistpe::Grid& g, F&& f) {
  moistpe::Array3 a = g.make_field();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) a(i, j, k) = f(g.x[i], g.y[j], g.p[k]);
  return a;
}

/// Random smooth field: a few sine modes with seeded amplitudes and phases, plus an offset.
moistpe::Array3 random_smooth(const moistpe::Grid& g, std::uint64_t seed, double offset = 0.0);

}  // namespace oracle
