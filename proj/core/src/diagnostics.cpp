#include "moistpe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moistpe/microphysics.hpp"

namespace moistpe {

namespace {

constexpr std::array<Scalar, 4> kScalars{Scalar::T, Scalar::Qv, Scalar::Qc, Scalar::Qr};
constexpr std::array<const char*, 4> kNames{"T", "qv", "qc", "qr"};

FieldRange field_range(const Array3& f, const Grid& g) {
  FieldRange r;
  r.min.value = std::numeric_limits<double>::infinity();
  r.max.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const double x = f(i, j, k);
        // NaN compares false, so it must be caught explicitly
        if (x < r.min.value || std::isnan(x)) r.min = {x, i, j, k};
        if (x > r.max.value || std::isnan(x)) r.max = {x, i, j, k};
      }
  return r;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double l2_sq(const Array3& f, const Grid& g) {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return s * g.cell_volume();
}

double l1(const Array3& f, const Grid& g) {
  double s = 0.0;
  for (double x : f.values()) s += std::abs(x);
  return s * g.cell_volume();
}

double grad_h_sq(const Array3& f, const Grid& g) {
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        if (i + 1 < g.nx) {
          const double d = (f(i + 1, j, k) - f(i, j, k)) / g.dx;
          sx += d * d;
        }
        if (j + 1 < g.ny) {
          const double d = (f(i, j + 1, k) - f(i, j, k)) / g.dy;
          sy += d * d;
        }
      }
  return (sx + sy) * g.cell_volume();
}

double dp_weighted_sq(const Array3& f, const Grid& g) {
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      auto c = f.column(i, j);
      for (int k = 0; k + 1 < g.np; ++k) {
        const double d = g.weight_face[k + 1] * (c[k + 1] - c[k]) / g.dp;
        s += d * d;
      }
    }
  return s * g.cell_volume();
}

Diagnosed diagnose(const State& state, const Array2& phis, const Grid& grid, const Params& params) {
  Diagnosed d;
  d.omega = diagnose_omega(state.u, state.v, grid);
  d.phis = phis;
  d.phi = diagnose_geopotential(state.t, phis, grid, params.r);
  d.theta = potential_temperature(state.t, grid, params.kappa());
  return d;
}

double q_sev_residual(const State& s, const Grid& g, const Params& params, double eps) {
  Params doubled = params;
  doubled.c_ev *= 2.0;
  double worst = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int k = 0; k < g.np; ++k) {
        const double t = s.t(i, j, k), qv = s.qv(i, j, k), qc = s.qc(i, j, k), qr = s.qr(i, j, k);
        const double a = transformed_sources(sources_eps(t, qv, qc, qr, g.p[k], eps, params), params).q;
        const double b = transformed_sources(sources_eps(t, qv, qc, qr, g.p[k], 0.5 * eps, doubled), doubled).q;
        worst = std::max(worst, std::abs(a - b));
      }
  return worst;
}

InvariantReport compute_report(const State& s, const Diagnosed& diag, const Grid& g, const Params& params,
                               double eps) {
  InvariantReport r;
  for (Scalar sc : kScalars) r.range[static_cast<std::size_t>(sc)] = field_range(s.scalar(sc), g);

  r.u_l2_sq = l2_sq(s.u, g) + l2_sq(s.v, g);
  r.grad_u_sq = grad_h_sq(s.u, g) + grad_h_sq(s.v, g);
  r.dp_u_weighted_sq = dp_weighted_sq(s.u, g) + dp_weighted_sq(s.v, g);
  r.t_l1 = l1(s.t, g);
  r.t_l2_sq = l2_sq(s.t, g);

  double l6 = 0.0;
  auto u = s.u.values();
  auto v = s.v.values();
  for (std::size_t n = 0; n < u.size(); ++n) l6 += std::pow(u[n] * u[n] + v[n] * v[n], 3);
  r.u_l6 = std::pow(l6 * g.cell_volume(), 1.0 / 6.0);

  const std::array<const Array3*, 3> q{&s.qv, &s.qc, &s.qr};
  for (std::size_t n = 0; n < 3; ++n) r.grad_q_sq[n] = grad_h_sq(*q[n], g) + dp_weighted_sq(*q[n], g);

  r.energy = 0.5 * r.u_l2_sq + params.cp * r.t_l1;
  double t_integral = 0.0;
  for (double x : s.t.values()) t_integral += x;
  r.energy_functional = r.u_l2_sq + t_integral * g.cell_volume();
  r.dissipation = params.u.mu * r.grad_u_sq + params.u.nu * r.dp_u_weighted_sq;

  double top = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) top = std::max(top, std::abs(diag.omega(i, j, 0)));
  r.div_residual = top;
  r.q_sev_residual = q_sev_residual(s, g, params, eps);
  return r;
}

Ceilings initial_ceilings(const State& s0, const RunConfig& cfg, const Grid& grid) {
  Ceilings c;
  const auto& b = cfg.boundary;
  for (Scalar sc : kScalars) {
    const auto idx = static_cast<std::size_t>(sc);
    c.value[idx] = std::max({max_abs(s0.scalar(sc).values()), b.max_bottom_target(sc), b.max_lateral_target(sc)});
  }
  auto& qv = c.value[static_cast<std::size_t>(Scalar::Qv)];
  qv = std::max(qv, saturation_ceiling(cfg.params, grid.p1));
  return c;
}

void update_running_ceilings(Ceilings& c, const InvariantReport& r) {
  for (Scalar sc : {Scalar::T, Scalar::Qc, Scalar::Qr}) {
    const auto idx = static_cast<std::size_t>(sc);
    c.value[idx] = std::max(c.value[idx], r.range[idx].max.value);
  }
}

bool BoundCheck::ok() const {
  return std::all_of(field.begin(), field.end(), [](const BoundEntry& e) { return e.ok; });
}

std::string BoundCheck::describe() const {
  std::ostringstream os;
  for (std::size_t n = 0; n < 4; ++n) {
    const auto& e = field[n];
    os << kNames[n] << (e.ok ? " ok" : " VIOLATED") << " margin=" << e.margin << " at (" << e.where.i << ","
       << e.where.j << "," << e.where.k << ")";
    if (n + 1 < 4) os << "; ";
  }
  return os.str();
}

BoundCheck check_prop_bounds(const InvariantReport& r, const Ceilings& c, double negativity_tolerance,
                             double ceiling_tolerance) {
  BoundCheck out;
  for (Scalar sc : kScalars) {
    const auto idx = static_cast<std::size_t>(sc);
    const FieldRange& fr = r.range[idx];
    BoundEntry e;
    e.margin = fr.min.value + negativity_tolerance * c.value[idx];
    e.where = fr.min;
    if (sc == Scalar::Qv) {
      const double upper = c.value[idx] + ceiling_tolerance - fr.max.value;
      if (upper < e.margin || std::isnan(upper)) {
        e.margin = upper;
        e.where = fr.max;
      }
    } else if (!std::isfinite(fr.max.value)) {
      e.margin = -std::numeric_limits<double>::infinity();
      e.where = fr.max;
    }
    e.ok = e.margin >= 0.0;
    out.field[idx] = e;
  }
  return out;
}

ColumnLemma lemma_column_check(const Array3& f, const Grid& g) {
  ColumnLemma out;
  double total = 0.0, dp_total = 0.0;
  for (int k = 0; k < g.np; ++k) {
    double level = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) level += std::abs(f(i, j, k));
    level *= g.column_area();
    out.lhs = std::max(out.lhs, level);
    total += level * g.dp;
  }
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      auto c = f.column(i, j);
      for (int k = 0; k + 1 < g.np; ++k) dp_total += std::abs(c[k + 1] - c[k]);
    }
  dp_total *= g.column_area();  // |df/dp| dp summed over faces
  out.rhs = total / (g.p0 - g.p1) + dp_total;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : (out.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return out;
}

ProductLemma lemma_ladyzhenskaya_check(const Array3& phi, const Array3& psi, const Array3& chi, const Grid& g) {
  ProductLemma out;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double a = 0.0, b = 0.0;
      for (int k = 0; k < g.np; ++k) {
        a += std::abs(phi(i, j, k));
        b += std::abs(psi(i, j, k) * chi(i, j, k));
      }
      out.lhs += a * g.dp * b * g.dp;
    }
  out.lhs *= g.column_area();

  auto norm = [&](const Array3& f) { return std::sqrt(l2_sq(f, g)); };
  auto grad = [&](const Array3& f) { return std::sqrt(grad_h_sq(f, g)); };
  auto half = [&](const Array3& f) { return std::sqrt(norm(f)) * (std::sqrt(norm(f)) + std::sqrt(grad(f))); };
  out.rhs_first = norm(phi) * half(psi) * half(chi);
  out.rhs_second = half(phi) * half(psi) * norm(chi);
  auto ratio = [&](double rhs) { return rhs > 0.0 ? out.lhs / rhs : 0.0; };
  out.c_first = ratio(out.rhs_first);
  out.c_second = ratio(out.rhs_second);
  return out;
}

QHFields transform_QH(const State& s, const Params& params) {
  QHFields out{s.qv, s.t};
  const double lc = params.latent_over_cp();
  auto q = out.q.values();
  auto h = out.h.values();
  auto qc = s.qc.values();
  auto qr = s.qr.values();
  for (std::size_t n = 0; n < q.size(); ++n) {
    q[n] += qr[n];
    h[n] -= lc * (qc[n] + qr[n]);
  }
  return out;
}

std::pair<Array3, Array3> inverse_QH(const QHFields& qh, const Array3& qc, const Array3& qr, const Params& params) {
  Array3 qv = qh.q, t = qh.h;
  const double lc = params.latent_over_cp();
  auto a = qv.values();
  auto b = t.values();
  auto c = qc.values();
  auto r = qr.values();
  for (std::size_t n = 0; n < a.size(); ++n) {
    a[n] -= r[n];
    b[n] += lc * (c[n] + r[n]);
  }
  return {std::move(qv), std::move(t)};
}

double twin_norm(const State& a, const State& b, const Grid& g, const Params& params, double weight) {
  const QHFields qa = transform_QH(a, params), qb = transform_QH(b, params);
  auto sq = [](std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += (x[n] - y[n]) * (x[n] - y[n]);
    return s;
  };
  const double s = sq(a.u.values(), b.u.values()) + sq(a.v.values(), b.v.values()) +
                   sq(qa.q.values(), qb.q.values()) + sq(qa.h.values(), qb.h.values()) +
                   weight * (sq(a.qr.values(), b.qr.values()) + sq(a.qc.values(), b.qc.values()));
  return s * g.cell_volume();
}

double energy_growth_bound(const RunConfig& cfg, const Grid& g, double qv_star, double qc_star) {
  const auto& p = cfg.params;
  const auto& b = cfg.boundary;
  const double wall_area = 2.0 * (g.lx + g.ly) * (g.p0 - g.p1);
  const double w0 = g.weight_face[g.np];
  const double boundary = p.cp * (p.t.mu * b.t.alpha_lateral * b.max_lateral_target(Scalar::T) * wall_area +
                                  p.t.nu * w0 * w0 * b.t.alpha_bottom * b.max_bottom_target(Scalar::T) * g.area());
  const double latent = p.latent * g.volume() * (p.c_cd * qv_star * qc_star + p.c_cn * qv_star);
  return boundary + latent;
}

}  // namespace moistpe
