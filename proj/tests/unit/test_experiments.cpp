#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "moistpe/experiments.hpp"
#include "moistpe/snapshot.hpp"
#include "oracles.hpp"

using namespace moistpe;
namespace fs = std::filesystem;

namespace {

RunConfig small(double horizon) {
  RunConfig c = oracle::desk_config(8, 8, 4);
  c.time.horizon = horizon;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("moistpe_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, QuiescentStateAtItsTargetsStaysPut) {
  RunConfig c = small(600.0);
  c.initial.recipe = "quiescent";
  c.boundary.t = RobinSpec{1e-4, 1e-5, 285.0, 285.0};
  c.boundary.qv = RobinSpec{1e-4, 1e-5, 0.005, 0.005};
  const ExperimentResult r = run_scenario(c, {});
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_TRUE(r.passed());
  const State& s = r.runs[0].final_state;
  for (double x : s.t.values()) EXPECT_NEAR(x, 285.0, 1e-9);
  for (double x : s.qv.values()) EXPECT_NEAR(x, 0.005, 1e-15);
  for (double x : s.u.values()) EXPECT_NEAR(x, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.runs[0].time, 600.0);
}

TEST(Scenario, DryRunKeepsMoistureExactlyZero) {
  RunConfig c = small(900.0);
  c.initial.recipe = "dry-dynamics";
  c.boundary.qv = RobinSpec{};
  const ExperimentResult r = run_scenario(c, {});
  EXPECT_TRUE(r.runs[0].completed);
  for (const Array3* q : {&r.runs[0].final_state.qv, &r.runs[0].final_state.qc, &r.runs[0].final_state.qr})
    for (double x : q->values()) EXPECT_EQ(x, 0.0);
}

TEST(Scenario, BubblePassesEveryCheckAndWritesOutputs) {
  RunConfig c = small(300.0);
  c.time.output_every = 5;
  const fs::path dir = fresh_dir("scenario");
  const ExperimentResult r = run_scenario(c, dir);
  for (const Check& k : r.checks) EXPECT_TRUE(k.pass) << k.run << " " << k.name << " = " << k.value;
  EXPECT_TRUE(r.passed());
  const fs::path run = dir / "scenario";
  EXPECT_TRUE(fs::exists(run / "config.txt"));
  EXPECT_TRUE(fs::exists(run / "snap_000000.bin"));
  EXPECT_TRUE(fs::exists(run / "snap_000005.bin"));
  EXPECT_EQ(parse_config(slurp(run / "config.txt")), c);

  const Snapshot final = read_snapshot(run / "final.bin");
  EXPECT_EQ(final.state, r.runs[0].final_state);
  EXPECT_EQ(final.header.time, r.runs[0].time);

  const std::string ts = slurp(run / "timeseries.csv");
  EXPECT_EQ(ts.substr(0, ts.find('\n')),
            "step,t,min_T,max_T,min_qv,max_qv,min_qc,max_qc,min_qr,max_qr,l2_u,l1_T,energy,dissipation,"
            "div_residual,H_cancel_residual,Q_sev_residual");
  const long rows = std::count(ts.begin(), ts.end(), '\n') - 1;
  EXPECT_EQ(rows, r.runs[0].totals.steps + 1);

  const std::string summary = slurp(dir / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "experiment,run,check,value,limit,pass");
  EXPECT_NE(summary.find("scenario,scenario,energy,"), std::string::npos);
  EXPECT_EQ(summary.find("FAIL"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Scenario, EmptyOutputDirectoryWritesNothing) {
  const fs::path cwd = fs::current_path();
  const fs::path dir = fresh_dir("nowrite");
  fs::create_directories(dir);
  fs::current_path(dir);
  run_scenario(small(60.0), {});
  fs::current_path(cwd);
  EXPECT_TRUE(fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST(Scenario, IsDeterministic) {
  const RunConfig c = small(240.0);
  const ExperimentResult a = run_scenario(c, {}), b = run_scenario(c, {});
  EXPECT_EQ(a.runs[0].final_state, b.runs[0].final_state);
}

TEST(Scenario, BlowUpStopsAndKeepsTheLastGoodState) {
  RunConfig c = small(1e9);
  c.time.dt_min = 2e4;
  c.time.dt_max = 2e4;
  c.time.max_steps = 2000;
  const fs::path dir = fresh_dir("blowup");
  const ExperimentResult r = run_scenario(c, dir);
  ASSERT_FALSE(r.runs[0].completed);
  EXPECT_FALSE(r.runs[0].failure.empty());
  EXPECT_FALSE(r.passed());
  EXPECT_TRUE(fs::exists(dir / "scenario" / "last_good.bin"));
  EXPECT_NE(r.runs[0].failure.find("non-finite"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "scenario" / "final.bin"));
  fs::remove_all(dir);
}

TEST(EpsilonStudy, InvalidLaddersThrow) {
  const RunConfig c = small(60.0);
  EXPECT_THROW(run_epsilon_study(c, {}, {}), std::invalid_argument);
  EXPECT_THROW(run_epsilon_study(c, {1e-2, 1e-1}, {}), std::invalid_argument);
  EXPECT_THROW(run_epsilon_study(c, {1e-2, 1e-2}, {}), std::invalid_argument);
  EXPECT_THROW(run_epsilon_study(c, {2.0}, {}), std::invalid_argument);
  EXPECT_THROW(run_epsilon_study(c, {0.0}, {}), std::invalid_argument);
}

TEST(EpsilonStudy, BetaOneLadderIsBitIdentical) {
  RunConfig c = small(120.0);
  c.params.beta = 1.0;
  const ExperimentResult r = run_epsilon_study(c, {1e-1, 1e-2, 1e-3}, {});
  ASSERT_GE(r.runs.size(), 2u);
  for (const RunRecord& run : r.runs) EXPECT_EQ(run.final_state, r.runs.front().final_state) << run.label;
  for (const auto& c3 : r.cauchy)
    for (double x : c3) EXPECT_EQ(x, 0.0);
}

TEST(EpsilonStudy, RunsEveryEpsilonAndItsHalf) {
  const RunConfig c = small(60.0);
  const ExperimentResult r = run_epsilon_study(c, {1e-1, 5e-2, 1e-2}, {});
  // 0.1, 0.05, 0.025, 0.01, 0.005: halves are shared where they coincide
  EXPECT_EQ(r.runs.size(), 5u);
  EXPECT_EQ(r.epsilons.size(), 3u);
  EXPECT_EQ(r.cauchy.size(), 3u);
  for (const RunRecord& run : r.runs) EXPECT_DOUBLE_EQ(run.time, 60.0);
}

TEST(TwinStudy, ZeroPerturbationGivesZeroDistance) {
  const RunConfig c = small(120.0);
  const ExperimentResult r = run_twin_uniqueness(c, {0.0}, {});
  ASSERT_EQ(r.twin_series.size(), 1u);
  for (const auto& [t, n] : r.twin_series[0]) EXPECT_EQ(n, 0.0);
  EXPECT_EQ(r.rates[0], 0.0);
}

TEST(TwinStudy, InitialDistanceScalesWithDeltaSquared) {
  const RunConfig c = small(60.0);
  const ExperimentResult r = run_twin_uniqueness(c, {2e-5, 1e-5}, {});
  ASSERT_EQ(r.n0.size(), 2u);
  EXPECT_NEAR(r.n0[1] / r.n0[0], 0.25, 1e-6);
  const Check* k = r.find("study", "n0_delta_squared");
  ASSERT_NE(k, nullptr);
  EXPECT_TRUE(k->pass);
}

TEST(TwinStudy, WritesNormSeries) {
  const RunConfig c = small(60.0);
  const fs::path dir = fresh_dir("twin");
  const ExperimentResult r = run_twin_uniqueness(c, {1e-6}, dir);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir))
    found |= e.path().filename().string().find("_norm.csv") != std::string::npos;
  EXPECT_TRUE(found);
  EXPECT_EQ(r.runs.size(), 2u);
  fs::remove_all(dir);
}

TEST(GrowthRate, TightestExponentialEnvelope) {
  EXPECT_EQ(fit_growth_rate({{0.0, 1.0}}), 0.0);
  EXPECT_EQ(fit_growth_rate({{0.0, 0.0}, {1.0, 5.0}}), 0.0);
  EXPECT_NEAR(fit_growth_rate({{0.0, 1.0}, {1.0, std::exp(2.0)}, {2.0, std::exp(3.0)}}), 2.0, 1e-14);
  EXPECT_NEAR(fit_growth_rate({{0.0, 2.0}, {1.0, 2.0 * std::exp(-1.0)}, {3.0, 2.0 * std::exp(-0.3)}}), -0.1, 1e-14);
  const double c = fit_growth_rate({{0.0, 1.0}, {1.0, 3.0}, {2.0, 4.0}, {4.0, 30.0}});
  for (auto [t, n] : {std::pair{1.0, 3.0}, std::pair{2.0, 4.0}, std::pair{4.0, 30.0}})
    EXPECT_LE(n, std::exp(c * t) * (1.0 + 1e-12));
}

TEST(Dispatch, UnknownExperimentThrows) {
  RunConfig c = small(60.0);
  c.experiment.name = "scenario";
  EXPECT_NO_THROW(run_experiment(c, {}));
  c.experiment.name = "nope";
  EXPECT_THROW(run_experiment(c, {}), std::exception);
}
