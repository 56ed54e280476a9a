#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>

#include "moistpe/config.hpp"
#include "moistpe/experiments.hpp"

// Exit status: 0 all checks pass, 1 a check failed, 2 bad arguments or a run error.
int main(int argc, char** argv) {
  CLI::App app{"Moist primitive-equation simulator"};
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "out";
  std::string experiment;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Directory for the summary CSV and per-run directories");
  auto* exp_opt = app.add_option("--experiment", experiment, "Experiment to run, overrides the config")
                      ->check(CLI::IsMember({"scenario", "epsilon", "twin"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random initial data and perturbations");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help exits cleanly
  }

  try {
    moistpe::RunConfig cfg = moistpe::load_config(config_path);
    if (*exp_opt) cfg.experiment.name = experiment;
    if (*seed_opt) cfg.experiment.seed = seed;
    std::filesystem::create_directories(out_dir);

    const moistpe::ExperimentResult res = moistpe::run_experiment(cfg, out_dir);
    for (const auto& r : res.runs)
      std::cout << r.label << ": " << (r.completed ? "completed" : "FAILED (" + r.failure + ")") << " at t = " << r.time
                << " after " << r.totals.steps << " steps\n";
    for (const auto& c : res.checks)
      if (!c.pass) std::cout << "FAIL " << c.run << " " << c.name << " value=" << c.value << " limit=" << c.limit << '\n';
    std::cout << "summary: " << res.summary_csv.string() << '\n' << (res.passed() ? "PASS" : "FAIL") << '\n';
    return res.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
