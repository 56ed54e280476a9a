#include "moistpe/microphysics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace moistpe {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

// x (x + eps)^(beta - 1) and its derivative in x.
double regularized_power(double x, double eps, double beta) { return x * std::pow(x + eps, beta - 1.0); }
double regularized_power_slope(double x, double eps, double beta) {
  return std::pow(x + eps, beta - 1.0) * (1.0 + (beta - 1.0) * x / (x + eps));
}

// Root of a x^2 + b x - c = 0 with a, c >= 0 that is nonnegative, computed without cancellation.
double positive_root(double a, double b, double c) {
  if (a == 0.0) return b > 0.0 ? c / b : 0.0;
  const double disc = std::sqrt(b * b + 4.0 * a * c);
  return b >= 0.0 ? 2.0 * c / (b + disc) : (disc - b) / (2.0 * a);
}

}  // namespace

double saturation_mixing_ratio(double p, double t, const Params& params) {
  if (t <= params.t_a || t >= params.t_b) return 0.0;
  const double mid = 0.5 * (params.t_a + params.t_b);
  const double tent = 1.0 - std::abs(2.0 * (t - mid) / (params.t_b - params.t_a));
  double q = params.qvs_star * std::max(0.0, tent);
  if (params.qvs_pressure_scaling) q *= std::min(1.0, params.p_ref / p);
  return q;
}

double saturation_lipschitz(const Params& params) {
  if (params.t_b <= params.t_a) return 0.0;
  return 2.0 * params.qvs_star / (params.t_b - params.t_a);
}

double saturation_ceiling(const Params& params, double p1) {
  if (params.t_b <= params.t_a) return 0.0;
  double q = params.qvs_star;
  if (params.qvs_pressure_scaling) q *= std::min(1.0, params.p_ref / p1);
  return q;
}

double SourceEval::max_magnitude() const {
  return std::max({std::abs(sev), std::abs(scd), std::abs(sac), std::abs(scr)});
}

SourceEval sources_raw(double t, double qv, double qc, double qr, double p, const Params& params) {
  const double qvs = saturation_mixing_ratio(p, t, params);
  SourceEval s;
  s.sev = params.c_ev * t * std::pow(pos(qr), params.beta) * pos(qvs - qv);
  s.scr = params.c_cr * qc * qr;
  s.sac = params.c_ac * pos(qc - params.qac_star);
  s.scd = params.c_cd * (qv - qvs) * qc + params.c_cn * pos(qv - qvs);
  s.latent_t = params.latent_over_cp() * (s.scd - s.sev);
  return s;
}

SourceEval sources_eps(double t, double qv, double qc, double qr, double p, double eps, const Params& params) {
  const double qvs = saturation_mixing_ratio(p, t, params);
  SourceEval s;
  s.sev = params.c_ev * params.r * pos(t) * regularized_power(pos(qr), eps, params.beta) * pos(qvs - qv);
  s.scr = params.c_cr * pos(qc) * pos(qr);
  s.sac = params.c_ac * pos(qc - params.qac_star);
  s.scd = params.c_cd * (pos(qv) - qvs) * pos(qc) + params.c_cn * pos(qv - qvs);
  s.latent_t = params.latent_over_cp() * (s.scd - s.sev);
  return s;
}

MoistureTendency moisture_tendency(const SourceEval& s) {
  return {s.sev - s.scd, s.scd - s.sac - s.scr, s.sac + s.scr - s.sev, s.latent_t};
}

namespace {

// a - b as a rounded value plus its exact rounding error
std::pair<double, double> two_diff(double a, double b) {
  const double d = a - b;
  const double bb = a - d;
  return {d, (a - (d + bb)) + (bb - b)};
}

}  // namespace

TransformedSources transformed_sources(const SourceEval& s, const Params& params) {
  const MoistureTendency m = moisture_tendency(s);
  // qc + qr tendency with the conversion terms cancelled exactly
  const double conv = s.sac + s.scr;
  const auto [dc, ec] = two_diff(s.scd, conv);
  const auto [dr, er] = two_diff(conv, s.sev);
  const double condensate = dc + dr + (ec + er);
  TransformedSources out;
  out.q = conv - s.scd;
  out.h = m.t - params.latent_over_cp() * condensate;
  return out;
}

MicrophysicsUpdate microphysics_update(const MoistCell& in, double p, double dt, double eps, const Params& params) {
  MoistCell c = in;
  const double qvs = saturation_mixing_ratio(p, in.t, params);
  const double lc = params.latent_over_cp();

  // Vapour <-> cloud. Condensation when supersaturated, cloud evaporation otherwise.
  double cond = 0.0;
  if (c.qv > qvs) {
    const double y0 = c.qv - qvs;
    const double a = dt * params.c_cd;
    const double b = 1.0 + dt * (params.c_cd * (c.qc + y0) + params.c_cn);
    // a y^2 - b y + y0 = 0, smaller root
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * y0));
    const double y = std::clamp(2.0 * y0 / (b + disc), 0.0, y0);
    cond = y0 - y;
  } else if (c.qv < qvs && c.qc > 0.0) {
    const double x0 = c.qc;
    const double gap = qvs - c.qv - x0;  // qvs - qv after full evaporation
    const double a = dt * params.c_cd;
    const double x = std::clamp(positive_root(a, 1.0 + a * gap, x0), std::max(0.0, -gap), x0);
    cond = x - x0;
  }
  c.qv -= cond;
  c.qc += cond;

  // Cloud -> rain by autoconversion and collection, implicit in qc with qr frozen.
  double conv = 0.0;
  double sac = 0.0, scr = 0.0;
  if (c.qc > 0.0) {
    const double k_cr = params.c_cr * c.qr;
    double qc_new = (c.qc + dt * params.c_ac * params.qac_star) / (1.0 + dt * (k_cr + params.c_ac));
    if (qc_new < params.qac_star || params.c_ac == 0.0) qc_new = c.qc / (1.0 + dt * k_cr);
    qc_new = std::clamp(qc_new, 0.0, c.qc);
    conv = c.qc - qc_new;
    sac = params.c_ac * pos(qc_new - params.qac_star);
    scr = k_cr * qc_new;
  }
  c.qc -= conv;
  c.qr += conv;

  // Rain evaporation: g(x) = x + dt k x (x + eps)^(beta-1) (x + gap)+ - x0 = 0 on [max(0,-gap), x0].
  double evap = 0.0;
  const double k_ev = params.c_ev * params.r * pos(in.t);
  if (c.qr > 0.0 && c.qv < qvs && k_ev > 0.0) {
    const double x0 = c.qr;
    const double gap = qvs - c.qv - x0;
    const double beta = params.beta;
    auto g = [&](double x) { return x + dt * k_ev * regularized_power(x, eps, beta) * pos(x + gap) - x0; };
    double lo = std::max(0.0, -gap);
    double hi = x0;
    double x = hi;
    for (int it = 0; it < 100; ++it) {
      const double gx = g(x);
      if (gx == 0.0) break;
      if (gx > 0.0) hi = x;
      else lo = x;
      const double slope = 1.0 + dt * k_ev *
                                     (regularized_power_slope(x, eps, beta) * pos(x + gap) +
                                      (x + gap > 0.0 ? regularized_power(x, eps, beta) : 0.0));
      double next = x - gx / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * x0) {
        x = next;
        break;
      }
      x = next;
    }
    x = std::clamp(x, std::max(0.0, -gap), x0);
    evap = x0 - x;
  }
  c.qr -= evap;
  c.qv += evap;

  c.t += lc * (cond - evap);

  MicrophysicsUpdate out;
  out.cell = c;
  out.effective.scd = cond / dt;
  // keep the split of the conversion amount exact: sac + scr = conv / dt
  const double conv_rate = conv / dt;
  if (sac + scr > 0.0) {
    out.effective.sac = conv_rate * sac / (sac + scr);
    out.effective.scr = conv_rate - out.effective.sac;
  } else {
    out.effective.sac = conv_rate;
    out.effective.scr = 0.0;
  }
  out.effective.sev = evap / dt;
  out.effective.latent_t = lc * (out.effective.scd - out.effective.sev);
  return out;
}

}  // namespace moistpe
