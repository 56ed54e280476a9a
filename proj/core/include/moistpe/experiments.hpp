#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "moistpe/config.hpp"
#include "moistpe/diagnostics.hpp"
#include "moistpe/state.hpp"

namespace moistpe {

/// Extremes of the per-step monitors over one run.
struct MonitorTotals {
  long steps = 0;
  double min_relative = 0.0;      // min over steps and scalars of min(field) / ceiling
  double qv_excess = 0.0;         // max over steps of max qv - qv_star
  double clip_ratio = 0.0;        // max over scalars of clipped mass / reference integral
  double h_cancel = 0.0;          // max per-step H source residual
  double divergence_ratio = 0.0;  // max |omega(p1)| / ((U / L) (p0 - p1))
  double energy_excess = 0.0;     // max (E(n+1) - E(n) - Cb dt) / |E(n)|
  double q_sev = 0.0;             // max Q source change under (2 Cev, eps / 2)
  double energy_bound_rate = 0.0; // Cb at the last step
  std::array<double, 4> clip_mass{};
  std::array<double, 4> clip_reference{};  // initial integral, or ceiling times volume when that is zero
  Ceilings ceilings;                       // qv_star and running maxima of T, qc, qr
  bool non_finite_output = false;
};

struct RunRecord {
  std::string label;
  double parameter = 0.0;  // eps or delta, 0 for a plain scenario
  std::filesystem::path dir;  // empty when nothing is written
  bool completed = false;
  std::string failure;
  double time = 0.0;
  State final_state;
  MonitorTotals totals;
};

struct Check {
  std::string run;
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string name;
  std::vector<RunRecord> runs;
  std::vector<Check> checks;

  // epsilon study: ladder and ||X_eps - X_eps/2|| for X = qr, qv, T
  std::vector<double> epsilons;
  std::vector<std::array<double, 3>> cauchy;
  std::array<double, 4> ceiling_spread{};

  // twin study
  std::vector<double> deltas;
  std::vector<double> n0;
  std::vector<double> rates;
  std::vector<std::vector<std::pair<double, double>>> twin_series;  // (t, N(t)) per delta

  std::filesystem::path summary_csv;

  [[nodiscard]] bool passed() const;
  /// Null when no such check exists.
  [[nodiscard]] const Check* find(const std::string& run, const std::string& name) const;
};

/// Integrates one run to the horizon with every monitor active.
/// Outputs go to out_dir/<run>/ and out_dir/summary.csv; an empty out_dir writes nothing.
/// A non-finite state stops the run and saves last_good.bin.
ExperimentResult run_scenario(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Runs every eps of a strictly decreasing ladder and its half in lockstep.
/// Throws std::invalid_argument for an empty or non-decreasing ladder.
ExperimentResult run_epsilon_study(const RunConfig& cfg, const std::vector<double>& epsilons,
                                   const std::filesystem::path& out_dir);

/// Pairs of runs whose initial vapour differs by delta times a seeded smooth mode.
ExperimentResult run_twin_uniqueness(const RunConfig& cfg, const std::vector<double>& deltas,
                                     const std::filesystem::path& out_dir);

/// Dispatches on cfg.experiment.name: scenario, epsilon or twin.
ExperimentResult run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Columns: experiment, run, check, value, limit, pass.
void write_summary(const ExperimentResult& result, const std::filesystem::path& path);

/// Smallest c with N(t) <= N(t0) exp(c (t - t0)) at every sample; 0 when N(t0) = 0.
double fit_growth_rate(const std::vector<std::pair<double, double>>& series);

}  // namespace moistpe
