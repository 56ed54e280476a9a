#pragma once

#include "moistpe/config.hpp"

namespace moistpe {

/// Saturation mixing ratio: tent in T peaking at qvs_star midway between t_a and t_b,
/// zero outside (t_a, t_b). Optionally scaled by min(1, p_ref / p).
double saturation_mixing_ratio(double p, double t, const Params& params);

/// Lipschitz constant of saturation_mixing_ratio in T.
double saturation_lipschitz(const Params& params);

/// Largest value saturation_mixing_ratio attains on [p1, p0].
double saturation_ceiling(const Params& params, double p1);

/// Source rates in kg/kg/s; latent_t in K/s.
struct SourceEval {
  double sev = 0.0;  // rain evaporation
  double scd = 0.0;  // condensation minus cloud evaporation
  double sac = 0.0;  // autoconversion
  double scr = 0.0;  // collection of cloud by rain
  double latent_t = 0.0;

  [[nodiscard]] double max_magnitude() const;
};

/// Closures with the exponent form of evaporation (no gas constant, no regularization).
SourceEval sources_raw(double t, double qv, double qc, double qr, double p, const Params& params);

/// Closures of the regularized system: positive parts on every input and
/// evaporation Cev R T+ qr+ (qr+ + eps)^(beta-1) (qvs - qv)+.
SourceEval sources_eps(double t, double qv, double qc, double qr, double p, double eps, const Params& params);

/// Tendencies of qv, qc, qr and T implied by a SourceEval.
struct MoistureTendency {
  double qv, qc, qr, t;
};
MoistureTendency moisture_tendency(const SourceEval& s);

/// Sources of Q = qv + qr and H = T - (L/cp)(qc + qr).
struct TransformedSources {
  double q = 0.0;  // Sac + Scr - Scd, evaporation eliminated algebraically
  double h = 0.0;  // latent heating minus (L/cp) times the condensate tendency
};
TransformedSources transformed_sources(const SourceEval& s, const Params& params);

/// One cell of moist air.
struct MoistCell {
  double t, qv, qc, qr;
};

/// Result of the implicit microphysics update of one cell.
struct MicrophysicsUpdate {
  MoistCell cell;
  SourceEval effective;  // amounts moved during the step divided by dt
};

/// Advances the sources over dt with unconditionally positive implicit substeps:
/// vapour/cloud exchange, cloud-to-rain conversion, rain evaporation. Every
/// transfer is bounded by its donor, vapour never rises above saturation through
/// evaporation, and T follows the latent heat of the condensate change.
MicrophysicsUpdate microphysics_update(const MoistCell& in, double p, double dt, double eps, const Params& params);

}  // namespace moistpe
