#include "moistpe/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "moistpe/grid.hpp"
#include "moistpe/initial.hpp"
#include "moistpe/snapshot.hpp"
#include "moistpe/timeseries.hpp"
#include "moistpe/timestepper.hpp"

namespace moistpe {

namespace fs = std::filesystem;

namespace {

constexpr std::array<Scalar, 4> kScalars{Scalar::T, Scalar::Qv, Scalar::Qc, Scalar::Qr};
constexpr std::array<const char*, 4> kScalarNames{"T", "qv", "qc", "qr"};
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPerturbationSalt = 0x9E3779B97F4A7C15ULL;

std::string label_number(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

double max_speed(const State& s) {
  double m = 0.0;
  for (const Array3* f : {&s.u, &s.v})
    for (double x : f->values()) m = std::max(m, std::abs(x));
  return m;
}

// Per-step invariant monitoring and time-series output for one run.
class Monitor {
 public:
  Monitor(const RunConfig& cfg, const Grid& grid, const State& s0, fs::path dir)
      : cfg_(cfg), grid_(grid), dir_(std::move(dir)) {
    totals_.ceilings = initial_ceilings(s0, cfg, grid);
    totals_.min_relative = kInf;
    totals_.qv_excess = -kInf;
    totals_.energy_excess = -kInf;
    for (Scalar s : kScalars) {
      const auto n = static_cast<std::size_t>(s);
      const double integral = l1(s0.scalar(s), grid);
      totals_.clip_reference[n] = integral > 0.0 ? integral : totals_.ceilings[s] * grid.volume();
    }
  }

  void observe(long step, const State& s, const Array2& phis, const StepReport* rep, double eps) {
    const Params& prm = cfg_.params;
    InvariantReport r = compute_report(s, diagnose(s, phis, grid_, prm), grid_, prm, eps);
    if (rep != nullptr) {
      r.h_cancel_residual = rep->h_cancel_residual;
      r.clip = rep->clip;
    }
    update_running_ceilings(totals_.ceilings, r);
    auto& t = totals_;

    for (Scalar sc : kScalars) {
      const auto n = static_cast<std::size_t>(sc);
      const double c = t.ceilings[sc];
      const double lo = std::min(r.range[n].min.value, rep != nullptr ? rep->clip.min_before[n] : kInf);
      const double rel = c > 0.0 ? lo / c : (lo < 0.0 ? -kInf : 0.0);
      t.min_relative = std::min(t.min_relative, std::isnan(rel) ? -kInf : rel);
      t.clip_mass[n] += r.clip.mass[n];
      t.clip_ratio = std::max(t.clip_ratio, t.clip_mass[n] / t.clip_reference[n]);
    }
    t.qv_excess = std::max(t.qv_excess, r[Scalar::Qv].max.value - t.ceilings[Scalar::Qv]);
    t.h_cancel = std::max(t.h_cancel, r.h_cancel_residual);
    t.q_sev = std::max(t.q_sev, r.q_sev_residual);

    const double scale = max_speed(s) / std::max(grid_.lx, grid_.ly) * (grid_.p0 - grid_.p1);
    const double div = scale > 0.0 ? r.div_residual / scale : (r.div_residual > 0.0 ? kInf : 0.0);
    t.divergence_ratio = std::max(t.divergence_ratio, div);

    t.energy_bound_rate =
        energy_growth_bound(cfg_, grid_, t.ceilings[Scalar::Qv], t.ceilings[Scalar::Qc]);
    if (rep != nullptr) {
      const double excess = (r.energy - energy_ - t.energy_bound_rate * rep->dt) / std::abs(energy_);
      t.energy_excess = std::max(t.energy_excess, std::isnan(excess) ? kInf : excess);
      t.steps = step;
    }
    energy_ = r.energy;

    if (!dir_.empty()) t.non_finite_output |= append_timeseries(to_timeseries_row(step, s.time, r), dir_ / "timeseries.csv");
  }

  [[nodiscard]] const MonitorTotals& totals() const { return totals_; }

 private:
  const RunConfig& cfg_;
  const Grid& grid_;
  fs::path dir_;
  MonitorTotals totals_;
  double energy_ = 0.0;
};

// One run inside a lockstep ensemble.
struct Member {
  Member(std::string label, double parameter, const RunConfig& cfg, const Grid& grid, State initial, fs::path dir,
         double eps)
      : stepper(cfg, grid), state(std::move(initial)), last_good(state), eps(eps), monitor(cfg, grid, state, dir) {
    record.label = std::move(label);
    record.parameter = parameter;
    record.dir = std::move(dir);
  }

  Stepper stepper;
  State state;
  State last_good;
  double eps;
  Monitor monitor;
  RunRecord record;
};

void save(const State& s, const Grid& g, const fs::path& dir, const std::string& name) {
  if (!dir.empty()) write_snapshot(s, g, dir / name);
}

std::string snapshot_name(long step) {
  std::ostringstream os;
  os << "snap_" << std::setw(6) << std::setfill('0') << step << ".bin";
  return os.str();
}

fs::path prepare_dir(const fs::path& out_dir, const std::string& label, const RunConfig& cfg) {
  if (out_dir.empty()) return {};
  const fs::path dir = out_dir / label;
  fs::create_directories(dir);
  fs::remove(dir / "timeseries.csv");
  std::ofstream(dir / "config.txt") << to_config_text(cfg);
  return dir;
}

// Advances every member with the same dt sequence until the horizon, the step
// limit, or the first failure. on_step runs after every completed step.
template <class OnStep>
void run_lockstep(std::vector<std::unique_ptr<Member>>& members, const RunConfig& cfg, const Grid& grid,
                  OnStep&& on_step) {
  const TimeSpec& ts = cfg.time;
  for (auto& m : members) {
    m->monitor.observe(0, m->state, m->stepper.surface_geopotential(), nullptr, m->eps);
    save(m->state, grid, m->record.dir, snapshot_name(0));
  }
  bool failed = false;
  long step = 0;
  double time = members.front()->state.time;
  while (time < ts.horizon * (1.0 - 1e-12) && (ts.max_steps <= 0 || step < ts.max_steps)) {
    double dt = kInf;
    try {
      for (auto& m : members) dt = std::min(dt, cfl_dt(m->state, grid, cfg.params, ts));
    } catch (const NonFiniteStateError& e) {
      for (auto& m : members) m->record.failure = e.what();
      failed = true;
      break;
    }
    dt = std::min(dt, ts.horizon - time);
    ++step;
    for (auto& m : members) {
      try {
        m->last_good = m->state;
        const StepReport rep = m->stepper.step(m->state, dt, m->eps);
        m->monitor.observe(step, m->state, m->stepper.surface_geopotential(), &rep, m->eps);
      } catch (const std::exception& e) {
        m->record.failure = e.what();
        save(m->last_good, grid, m->record.dir, "last_good.bin");
        failed = true;
      }
    }
    if (failed) break;
    time = members.front()->state.time;
    on_step(step);
    if (ts.output_every > 0 && step % ts.output_every == 0)
      for (auto& m : members) save(m->state, grid, m->record.dir, snapshot_name(step));
  }
  for (auto& m : members) {
    RunRecord& r = m->record;
    r.completed = !failed && r.failure.empty();
    if (failed && r.failure.empty()) r.failure = "aborted: another run of the study failed";
    r.time = m->state.time;
    r.final_state = m->state;
    r.totals = m->monitor.totals();
    if (r.completed) save(m->state, grid, r.dir, "final.bin");
  }
}

void add_check(ExperimentResult& res, const std::string& run, const std::string& name, double value, double limit,
               bool pass) {
  res.checks.push_back({run, name, value, limit, pass});
}

// Monitor outcomes of one run against the thresholds in the config.
void add_run_checks(ExperimentResult& res, const RunRecord& r, const RunConfig& cfg, bool check_energy) {
  const ExperimentSpec& x = cfg.experiment;
  const MonitorTotals& t = r.totals;
  add_check(res, r.label, "completed", r.completed ? 1.0 : 0.0, 1.0, r.completed);
  add_check(res, r.label, "finite_output", t.non_finite_output ? 1.0 : 0.0, 0.0, !t.non_finite_output);
  add_check(res, r.label, "nonnegativity", t.min_relative, -x.negativity_tolerance,
            t.min_relative >= -x.negativity_tolerance);
  add_check(res, r.label, "qv_ceiling", t.qv_excess, x.ceiling_tolerance, t.qv_excess <= x.ceiling_tolerance);
  add_check(res, r.label, "clip_mass", t.clip_ratio, x.clip_mass_tolerance, t.clip_ratio <= x.clip_mass_tolerance);
  add_check(res, r.label, "h_cancel", t.h_cancel, x.h_cancel_tolerance, t.h_cancel <= x.h_cancel_tolerance);
  add_check(res, r.label, "q_sev", t.q_sev, 0.0, t.q_sev == 0.0);
  add_check(res, r.label, "divergence", t.divergence_ratio, x.divergence_tolerance,
            t.divergence_ratio <= x.divergence_tolerance);
  if (check_energy)
    add_check(res, r.label, "energy", t.energy_excess, x.energy_tolerance, t.energy_excess <= x.energy_tolerance);
}

void finish(ExperimentResult& res, const fs::path& out_dir) {
  if (out_dir.empty()) return;
  res.summary_csv = out_dir / "summary.csv";
  write_summary(res, res.summary_csv);
}

double l2_difference(const Array3& a, const Array3& b, const Grid& g) {
  Array3 d = a;
  auto dv = d.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < dv.size(); ++n) dv[n] -= bv[n];
  return std::sqrt(l2_sq(d, g));
}

}  // namespace

bool ExperimentResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ExperimentResult::find(const std::string& run, const std::string& name) const {
  for (const Check& c : checks)
    if (c.run == run && c.name == name) return &c;
  return nullptr;
}

ExperimentResult run_scenario(const RunConfig& cfg, const fs::path& out_dir) {
  validate(cfg);
  const Grid grid = build_grid(cfg);
  ExperimentResult res;
  res.name = "scenario";
  std::vector<std::unique_ptr<Member>> members;
  members.push_back(std::make_unique<Member>("scenario", 0.0, cfg, grid,
                                             make_initial_state(cfg, grid, cfg.experiment.seed),
                                             prepare_dir(out_dir, "scenario", cfg), cfg.time.epsilon));
  run_lockstep(members, cfg, grid, [](long) {});
  res.runs.push_back(std::move(members.front()->record));
  add_run_checks(res, res.runs.back(), cfg, true);
  finish(res, out_dir);
  return res;
}

ExperimentResult run_epsilon_study(const RunConfig& cfg, const std::vector<double>& epsilons, const fs::path& out_dir) {
  if (epsilons.empty()) throw std::invalid_argument("epsilon ladder is empty");
  for (std::size_t n = 0; n < epsilons.size(); ++n) {
    if (!(epsilons[n] > 0.0 && epsilons[n] <= 1.0)) throw std::invalid_argument("epsilon in (0,1] violated");
    if (n > 0 && !(epsilons[n] < epsilons[n - 1]))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing");
  }
  validate(cfg);
  const Grid grid = build_grid(cfg);
  const State initial = make_initial_state(cfg, grid, cfg.experiment.seed);

  std::set<double, std::greater<>> values;
  for (double e : epsilons) {
    values.insert(e);
    values.insert(0.5 * e);
  }
  std::vector<std::unique_ptr<Member>> members;
  for (double e : values) {
    const std::string label = "eps_" + label_number(e);
    RunConfig run_cfg = cfg;
    run_cfg.time.epsilon = e;
    members.push_back(std::make_unique<Member>(label, e, cfg, grid, initial, prepare_dir(out_dir, label, run_cfg), e));
  }
  run_lockstep(members, cfg, grid, [](long) {});

  ExperimentResult res;
  res.name = "epsilon";
  res.epsilons = epsilons;
  for (auto& m : members) res.runs.push_back(std::move(m->record));
  for (const RunRecord& r : res.runs) add_run_checks(res, r, cfg, false);

  auto run_of = [&](double e) -> const RunRecord& {
    return *std::find_if(res.runs.begin(), res.runs.end(), [&](const RunRecord& r) { return r.parameter == e; });
  };
  for (double e : epsilons) {
    const State& a = run_of(e).final_state;
    const State& b = run_of(0.5 * e).final_state;
    res.cauchy.push_back({l2_difference(a.qr, b.qr, grid), l2_difference(a.qv, b.qv, grid),
                          l2_difference(a.t, b.t, grid)});
  }
  constexpr std::array<const char*, 3> kCauchyNames{"cauchy_qr_decreasing", "cauchy_qv_decreasing",
                                                    "cauchy_T_decreasing"};
  for (std::size_t x = 0; x < 3; ++x) {
    double worst = 0.0;
    bool pass = true;
    for (std::size_t n = 1; n < res.cauchy.size(); ++n) {
      const double prev = res.cauchy[n - 1][x], cur = res.cauchy[n][x];
      pass &= std::isfinite(cur) && cur < prev;
      worst = std::max(worst, prev > 0.0 ? cur / prev : (cur > 0.0 ? kInf : 1.0));
    }
    add_check(res, "study", kCauchyNames[x], worst, 1.0, pass);
  }

  for (Scalar sc : kScalars) {
    const auto n = static_cast<std::size_t>(sc);
    double lo = kInf, hi = 0.0;
    for (const RunRecord& r : res.runs) {
      lo = std::min(lo, r.totals.ceilings[sc]);
      hi = std::max(hi, r.totals.ceilings[sc]);
    }
    res.ceiling_spread[n] = hi > 0.0 ? (hi - lo) / hi : 0.0;
    add_check(res, "study", std::string("ceiling_spread_") + kScalarNames[n], res.ceiling_spread[n],
              cfg.experiment.epsilon_ceiling_spread, res.ceiling_spread[n] < cfg.experiment.epsilon_ceiling_spread);
  }
  finish(res, out_dir);
  return res;
}

double fit_growth_rate(const std::vector<std::pair<double, double>>& series) {
  if (series.empty() || !(series.front().second > 0.0)) return 0.0;
  const double t0 = series.front().first, n0 = series.front().second;
  double rate = -kInf;
  for (const auto& [t, n] : series)
    if (t > t0) rate = std::max(rate, std::log(n / n0) / (t - t0));
  return rate == -kInf ? 0.0 : rate;
}

ExperimentResult run_twin_uniqueness(const RunConfig& cfg, const std::vector<double>& deltas, const fs::path& out_dir) {
  if (deltas.empty()) throw std::invalid_argument("delta list is empty");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("perturbation amplitudes must be >= 0");
  validate(cfg);
  const Grid grid = build_grid(cfg);
  const State initial = make_initial_state(cfg, grid, cfg.experiment.seed);
  const double weight = cfg.experiment.twin_weight;
  const double eps = cfg.time.epsilon;

  ExperimentResult res;
  res.name = "twin";
  res.deltas = deltas;
  bool all_completed = true;
  for (double delta : deltas) {
    const std::string label = "delta_" + label_number(delta);
    State perturbed = initial;
    perturb_vapour(perturbed, grid, delta, cfg.experiment.seed ^ kPerturbationSalt);

    std::vector<std::unique_ptr<Member>> pair;
    pair.push_back(std::make_unique<Member>(label + "_base", delta, cfg, grid, initial,
                                            prepare_dir(out_dir, label + "_base", cfg), eps));
    pair.push_back(std::make_unique<Member>(label + "_perturbed", delta, cfg, grid, perturbed,
                                            prepare_dir(out_dir, label + "_perturbed", cfg), eps));
    std::vector<std::pair<double, double>> series;
    auto sample = [&] {
      series.emplace_back(pair[0]->state.time,
                          twin_norm(pair[0]->state, pair[1]->state, grid, cfg.params, weight));
    };
    sample();
    run_lockstep(pair, cfg, grid, [&](long) { sample(); });

    if (!out_dir.empty()) {
      std::ofstream os(out_dir / (label + "_norm.csv"));
      os << "t,N\n";
      for (const auto& [t, n] : series) os << format_double(t) << ',' << format_double(n) << '\n';
    }
    res.n0.push_back(series.front().second);
    res.rates.push_back(fit_growth_rate(series));
    res.twin_series.push_back(std::move(series));
    for (auto& m : pair) {
      all_completed &= m->record.completed;
      res.runs.push_back(std::move(m->record));
    }
  }
  for (const RunRecord& r : res.runs) add_run_checks(res, r, cfg, false);

  const ExperimentSpec& x = cfg.experiment;
  const std::size_t m = deltas.size();
  bool finite = all_completed;
  for (double c : res.rates) finite &= std::isfinite(c);
  add_check(res, "study", "rate_finite", finite ? 1.0 : 0.0, 1.0, finite);

  // All rates must share a sign for the factor comparison to make sense.
  double lo = kInf, hi = 0.0;
  bool same_sign = true;
  for (double c : res.rates) {
    same_sign &= (c > 0.0) == (res.rates.front() > 0.0);
    lo = std::min(lo, std::abs(c));
    hi = std::max(hi, std::abs(c));
  }
  const double ratio = hi == 0.0 ? 1.0 : (lo > 0.0 && same_sign ? hi / lo : kInf);
  add_check(res, "study", "rate_ratio", ratio, x.twin_rate_ratio, finite && ratio <= x.twin_rate_ratio);

  // N(0) / delta^2 must agree across the ladder up to the rounding of qv + delta mode.
  double spread = 0.0, ref = 0.0;
  std::vector<double> final_scaled;
  for (std::size_t n = 0; n < m; ++n) {
    if (deltas[n] == 0.0) continue;
    if (ref == 0.0) ref = res.n0[n] / (deltas[n] * deltas[n]);
    spread = std::max(spread, std::abs(res.n0[n] / (deltas[n] * deltas[n]) - ref) / ref);
    final_scaled.push_back(res.twin_series[n].back().second / (deltas[n] * deltas[n]));
  }
  add_check(res, "study", "n0_delta_squared", spread, 1e-6, spread <= 1e-6);

  double linear = 0.0;
  if (!final_scaled.empty()) {
    const auto [a, b] = std::minmax_element(final_scaled.begin(), final_scaled.end());
    linear = *b > 0.0 ? (*b - *a) / *b : 0.0;
  }
  add_check(res, "study", "linear_scaling", linear, 0.2, linear <= 0.2);

  // The tightest rate of the ladder has to cover every amplitude.
  double envelope = 0.0;
  const double c_min = *std::min_element(res.rates.begin(), res.rates.end());
  for (std::size_t n = 0; n < m; ++n) {
    const auto& s = res.twin_series[n];
    if (!(s.front().second > 0.0)) continue;
    for (const auto& [t, v] : s)
      envelope = std::max(envelope, v / s.front().second / std::exp(c_min * (t - s.front().first)));
  }
  add_check(res, "study", "envelope", envelope, x.twin_envelope, envelope <= x.twin_envelope);
  finish(res, out_dir);
  return res;
}

ExperimentResult run_experiment(const RunConfig& cfg, const fs::path& out_dir) {
  const std::string& name = cfg.experiment.name;
  if (name == "scenario") return run_scenario(cfg, out_dir);
  if (name == "epsilon") return run_epsilon_study(cfg, cfg.experiment.epsilons, out_dir);
  if (name == "twin") return run_twin_uniqueness(cfg, cfg.experiment.deltas, out_dir);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

void write_summary(const ExperimentResult& result, const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "experiment,run,check,value,limit,pass\n";
  for (const Check& c : result.checks)
    os << result.name << ',' << c.run << ',' << c.name << ',' << format_double(c.value) << ','
       << format_double(c.limit) << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace moistpe
