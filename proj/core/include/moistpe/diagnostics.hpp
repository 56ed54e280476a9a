#pragma once

#include <array>
#include <string>

#include "moistpe/config.hpp"
#include "moistpe/grid.hpp"
#include "moistpe/state.hpp"
#include "moistpe/timestepper.hpp"

namespace moistpe {

struct Extremum {
  double value = 0.0;
  int i = 0, j = 0, k = 0;
};

struct FieldRange {
  Extremum min, max;
};

/// Monitored quantities of one time level. Norms use midpoint quadrature;
/// derivatives are differences across interior cell faces.
struct InvariantReport {
  std::array<FieldRange, 4> range{};  // indexed by Scalar
  double u_l2_sq = 0.0;               // ||(u, v)||^2
  double grad_u_sq = 0.0;             // ||grad_h (u, v)||^2
  double dp_u_weighted_sq = 0.0;      // ||d_p (u, v)||_w^2 with weight g p / (Rd Tbar)
  double t_l1 = 0.0;
  double t_l2_sq = 0.0;
  double u_l6 = 0.0;
  std::array<double, 3> grad_q_sq{};  // qv, qc, qr: horizontal plus weighted vertical
  double energy = 0.0;                // 0.5 ||u||^2 + cp ||T||_L1
  double energy_functional = 0.0;     // integral of |u|^2 + T
  double dissipation = 0.0;           // mu_u ||grad_h u||^2 + nu_u ||d_p u||_w^2
  double div_residual = 0.0;          // max |omega(p1)|
  double h_cancel_residual = 0.0;
  double q_sev_residual = 0.0;
  ClipStats clip;

  [[nodiscard]] const FieldRange& operator[](Scalar s) const { return range[static_cast<std::size_t>(s)]; }
};

/// Everything except h_cancel_residual and clip, which come from the step that produced the state.
InvariantReport compute_report(const State& state, const Diagnosed& diag, const Grid& grid, const Params& params,
                               double eps);

/// omega, full geopotential and theta for a state.
Diagnosed diagnose(const State& state, const Array2& phis, const Grid& grid, const Params& params);

/// Largest |Q source| change when Cev is doubled and eps halved, over all cells.
double q_sev_residual(const State& state, const Grid& grid, const Params& params, double eps);

/// Upper bounds for T, qv, qc, qr. qv_star follows the explicit formula from the
/// initial and boundary data; the others are running maxima.
struct Ceilings {
  std::array<double, 4> value{};  // indexed by Scalar
  [[nodiscard]] double operator[](Scalar s) const { return value[static_cast<std::size_t>(s)]; }
};

Ceilings initial_ceilings(const State& initial, const RunConfig& cfg, const Grid& grid);

/// Raises the running maxima of T, qc, qr; qv_star is left untouched.
void update_running_ceilings(Ceilings& c, const InvariantReport& r);

struct BoundEntry {
  bool ok = true;
  double margin = 0.0;  // negative when violated
  Extremum where;       // location that sets the margin
};

struct BoundCheck {
  std::array<BoundEntry, 4> field{};
  [[nodiscard]] bool ok() const;
  [[nodiscard]] std::string describe() const;
};

/// Nonnegativity within negativity_tolerance * ceiling for every field, finiteness,
/// and max qv <= qv_star + ceiling_tolerance.
BoundCheck check_prop_bounds(const InvariantReport& r, const Ceilings& c, double negativity_tolerance = 1e-12,
                             double ceiling_tolerance = 1e-10);

/// sup_p ||f||_L1(horizontal) <= ||f||_L1 / (p0 - p1) + ||d_p f||_L1.
struct ColumnLemma {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};
ColumnLemma lemma_column_check(const Array3& f, const Grid& grid);

/// lhs = integral over the plane of (int |phi| dp)(int |psi chi| dp), and the two
/// norm products bounding it; c_* = lhs / rhs_*.
struct ProductLemma {
  double lhs = 0.0, rhs_first = 0.0, rhs_second = 0.0, c_first = 0.0, c_second = 0.0;
};
ProductLemma lemma_ladyzhenskaya_check(const Array3& phi, const Array3& psi, const Array3& chi, const Grid& grid);

struct QHFields {
  Array3 q, h;
};
/// Q = qv + qr, H = T - (L/cp)(qc + qr).
QHFields transform_QH(const State& state, const Params& params);
/// Recovers (qv, T) from (Q, H) and the condensate.
std::pair<Array3, Array3> inverse_QH(const QHFields& qh, const Array3& qc, const Array3& qr, const Params& params);

/// ||du||^2 + ||(dQ, dH)||^2 + weight ||(dqr, dqc)||^2 between two states.
double twin_norm(const State& a, const State& b, const Grid& grid, const Params& params, double weight);

/// Squared L2 norms and face-difference gradient norms shared with the tests.
double l2_sq(const Array3& f, const Grid& grid);
double l1(const Array3& f, const Grid& grid);
double grad_h_sq(const Array3& f, const Grid& grid);
double dp_weighted_sq(const Array3& f, const Grid& grid);

/// Growth rate bound for 0.5||u||^2 + cp||T||_L1 from boundary heating and latent release.
double energy_growth_bound(const RunConfig& cfg, const Grid& grid, double qv_star, double qc_star);

}  // namespace moistpe
