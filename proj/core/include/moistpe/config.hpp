#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace moistpe {

/// Malformed configuration text. Carries the 1-based line number.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed configuration that violates a model invariant.
class ConfigValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TbarProfile { Constant, Linear };

struct GridSpec {
  int nx = 0;
  int ny = 0;
  int np = 0;
  double lx = 0.0;  // m
  double ly = 0.0;  // m
  double p1 = 0.0;  // Pa, top
  double p0 = 0.0;  // Pa, surface
  TbarProfile tbar_profile = TbarProfile::Constant;
  double tbar_top = 300.0;     // K, used at p1 (and everywhere when constant)
  double tbar_bottom = 300.0;  // K, used at p0 for the linear profile

  bool operator==(const GridSpec&) const = default;
};

struct Diffusivity {
  double mu = 0.0;  // horizontal, m^2/s
  double nu = 0.0;  // vertical, m^2/s (scaled by (g p / (Rd Tbar))^2)

  bool operator==(const Diffusivity&) const = default;
};

/// Physical and closure constants.
struct Params {
  double r = 287.0;
  double rd = 287.0;
  double cp = 1004.0;
  double latent = 2.5e6;
  double g = 9.81;
  double f = 1.0e-4;
  double v_fall = 50.0;  // sedimentation flux is V p qr / (Rd Tbar), Pa/s per unit qr

  double beta = 0.5;
  double qvs_star = 0.02;
  double t_a = 240.0;
  double t_b = 320.0;
  bool qvs_pressure_scaling = false;
  double p_ref = 1.0e5;

  double c_ev = 1.0;
  double c_cr = 1.0;
  double c_ac = 1.0;
  double c_cd = 1.0;
  double c_cn = 1.0;
  double qac_star = 1.0e-4;

  Diffusivity u{1.0e3, 10.0};
  Diffusivity t{1.0e3, 10.0};
  Diffusivity qv{1.0e3, 10.0};
  Diffusivity qc{1.0e3, 10.0};
  Diffusivity qr{1.0e3, 10.0};

  [[nodiscard]] double kappa() const { return r / cp; }
  [[nodiscard]] double latent_over_cp() const { return latent / cp; }

  bool operator==(const Params&) const = default;
};

enum class Scalar { T, Qv, Qc, Qr };

/// Robin data for one scalar: d_n f = alpha (target - f) on the walls and the surface.
struct RobinSpec {
  double alpha_bottom = 0.0;  // 1/Pa, on p = p0
  double alpha_lateral = 0.0; // 1/m, on the lateral walls
  double bottom = 0.0;
  double lateral = 0.0;

  bool operator==(const RobinSpec&) const = default;
};

struct BoundaryData {
  double alpha_u = 0.0;  // 1/Pa, surface drag d_p u = -alpha_u u
  RobinSpec t{1.0e-4, 1.0e-5, 295.0, 280.0};
  RobinSpec qv{1.0e-4, 1.0e-5, 0.008, 0.006};
  RobinSpec qc{};
  RobinSpec qr{};
  // Targets are modulated by (1 + amplitude sin(2 pi t / period)); amplitude in [0, 1].
  double modulation_amplitude = 0.0;
  double modulation_period = 86400.0;

  [[nodiscard]] const RobinSpec& robin(Scalar s) const;
  [[nodiscard]] double modulation(double time) const;
  [[nodiscard]] double bottom_target(Scalar s, double time) const { return robin(s).bottom * modulation(time); }
  [[nodiscard]] double lateral_target(Scalar s, double time) const { return robin(s).lateral * modulation(time); }
  /// Largest value a target takes over all time.
  [[nodiscard]] double max_bottom_target(Scalar s) const { return robin(s).bottom * (1.0 + modulation_amplitude); }
  [[nodiscard]] double max_lateral_target(Scalar s) const { return robin(s).lateral * (1.0 + modulation_amplitude); }

  bool operator==(const BoundaryData&) const = default;
};

struct InitialSpec {
  std::string recipe = "supersaturated-bubble";
  double t_surface = 295.0;   // K at p0
  double t_top = 255.0;       // K at p1
  double rh = 0.7;            // background qv / qvs
  double bubble_amplitude = 0.3;  // qv = qvs (1 + amplitude) at the bubble center
  double bubble_radius = 0.25;    // fraction of the domain
  double u_amplitude = 5.0;       // m/s
  double t_anomaly = 1.0;         // K, smooth horizontal temperature anomaly

  bool operator==(const InitialSpec&) const = default;
};

enum class ExplicitScheme { Euler, Ssprk2 };

struct TimeSpec {
  double horizon = 0.0;  // s
  long max_steps = 0;    // 0: no limit
  double cfl = 0.12;
  double dt_min = 1.0e-6;
  double dt_max = 60.0;
  long output_every = 0;  // snapshot cadence in steps, 0 disables snapshots
  double epsilon = 1.0e-2;
  ExplicitScheme scheme = ExplicitScheme::Euler;

  bool operator==(const TimeSpec&) const = default;
};

struct SolverSpec {
  double tolerance = 1.0e-10;
  int max_iterations = 5000;

  bool operator==(const SolverSpec&) const = default;
};

struct ExperimentSpec {
  std::string name = "scenario";
  std::vector<double> epsilons{1.0e-1, 1.0e-2, 1.0e-3, 1.0e-4};
  std::vector<double> deltas{1.0e-5, 1.0e-6, 1.0e-7};
  double twin_weight = 10.0;
  std::uint64_t seed = 0;

  double ceiling_tolerance = 1.0e-10;
  double negativity_tolerance = 1.0e-12;
  double clip_mass_tolerance = 1.0e-8;
  double h_cancel_tolerance = 1.0e-14;
  double divergence_tolerance = 1.0e-8;
  double energy_tolerance = 1.0e-10;
  double epsilon_ceiling_spread = 0.01;
  double twin_rate_ratio = 2.0;
  double twin_envelope = 1.5;

  bool operator==(const ExperimentSpec&) const = default;
};

struct RunConfig {
  GridSpec grid;
  Params params;
  BoundaryData boundary;
  InitialSpec initial;
  TimeSpec time;
  SolverSpec solver;
  ExperimentSpec experiment;

  bool operator==(const RunConfig&) const = default;
};

/// Parse sectioned `key = value` text. Throws ConfigParseError or ConfigValidationError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigValidationError naming the first violated invariant.
void validate(const RunConfig& cfg);

/// Serialize every key (defaults included); parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& cfg);

}  // namespace moistpe
