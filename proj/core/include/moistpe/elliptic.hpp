#pragma once

#include <stdexcept>

#include "moistpe/config.hpp"
#include "moistpe/field.hpp"
#include "moistpe/grid.hpp"

namespace moistpe {

class EllipticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2D horizontal divergence of (u, v) with no flow through the walls.
Array2 divergence2d(const Array2& u, const Array2& v, const Grid& grid);

/// divergence2d of horizontal_gradient: a wide-stencil Neumann Laplacian whose
/// null space is the constants.
Array2 laplacian2d(const Array2& phi, const Grid& grid);

struct PoissonResult {
  Array2 phi;  // zero mean
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves laplacian2d(phi) = rhs by conjugate gradients. The mean of rhs is
/// removed when it is roundoff relative to compat_scale (default: max |rhs|);
/// otherwise EllipticError. Also throws when max_iterations is exhausted.
PoissonResult solve_poisson(const Array2& rhs, const Grid& grid, const SolverSpec& solver, double compat_scale = 0.0);

struct ProjectionResult {
  Array2 phi;             // potential removed from (u, v) at every level
  int iterations = 0;
  double max_divergence = 0.0;  // max |div of the vertical mean| after projection
};

/// Removes grad_h phi from (u, v) at every level so that the vertical mean of
/// the velocity is discretely divergence free. Works equally on a velocity or
/// a velocity tendency; the correction is orthogonal in the discrete L2 norm.
ProjectionResult project_barotropic(Array3& u, Array3& v, const Grid& grid, const SolverSpec& solver);

}  // namespace moistpe
