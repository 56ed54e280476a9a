#include "moistpe/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace moistpe {

const RobinSpec& BoundaryData::robin(Scalar s) const {
  switch (s) {
    case Scalar::T: return t;
    case Scalar::Qv: return qv;
    case Scalar::Qc: return qc;
    case Scalar::Qr: return qr;
  }
  return t;
}

double BoundaryData::modulation(double time) const {
  if (modulation_amplitude == 0.0) return 1.0;
  return 1.0 + modulation_amplitude * std::sin(2.0 * std::numbers::pi * time / modulation_period);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, int line) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigParseError(line, "expected a decimal number, got '" + std::string(v) + "'");
  return out;
}

template <class Int>
Int to_integer(std::string_view v, int line) {
  Int out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigParseError(line, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigParseError(line, "expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> to_list(std::string_view v, int line) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_double(trim(v.substr(0, comma)), line));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigParseError(line, "expected a comma-separated list of numbers");
  return out;
}

std::string fmt(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

struct Key {
  std::string section;
  std::string name;
  bool required;
  std::function<void(RunConfig&, std::string_view, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Key real(std::string section, std::string name, Access acc, bool required = false) {
  return {std::move(section), std::move(name), required,
          [acc](RunConfig& c, std::string_view v, int line) { acc(c) = to_double(v, line); },
          [acc](const RunConfig& c) { return fmt(acc(c)); }};
}

template <class Int, class Access>
Key integer(std::string section, std::string name, Access acc, bool required = false) {
  return {std::move(section), std::move(name), required,
          [acc](RunConfig& c, std::string_view v, int line) { acc(c) = to_integer<Int>(v, line); },
          [acc](const RunConfig& c) { return std::to_string(acc(c)); }};
}

template <class Access>
Key boolean(std::string section, std::string name, Access acc) {
  return {std::move(section), std::move(name), false,
          [acc](RunConfig& c, std::string_view v, int line) { acc(c) = to_bool(v, line); },
          [acc](const RunConfig& c) { return std::string(acc(c) ? "true" : "false"); }};
}

template <class Access>
Key text(std::string section, std::string name, Access acc) {
  return {std::move(section), std::move(name), false,
          [acc](RunConfig& c, std::string_view v, int) { acc(c) = std::string(v); },
          [acc](const RunConfig& c) { return acc(c); }};
}

template <class Access>
Key list(std::string section, std::string name, Access acc) {
  return {std::move(section), std::move(name), false,
          [acc](RunConfig& c, std::string_view v, int line) { acc(c) = to_list(v, line); },
          [acc](const RunConfig& c) {
            std::string out;
            for (double x : acc(c)) out += (out.empty() ? "" : ", ") + fmt(x);
            return out;
          }};
}

void add_robin(std::vector<Key>& keys, const std::string& tag, RobinSpec BoundaryData::*member) {
  keys.push_back(real("boundary", "alpha0_" + tag, [member](auto& c) -> auto& { return (c.boundary.*member).alpha_bottom; }));
  keys.push_back(real("boundary", "alphal_" + tag, [member](auto& c) -> auto& { return (c.boundary.*member).alpha_lateral; }));
  keys.push_back(real("boundary", tag + "_b0", [member](auto& c) -> auto& { return (c.boundary.*member).bottom; }));
  keys.push_back(real("boundary", tag + "_bl", [member](auto& c) -> auto& { return (c.boundary.*member).lateral; }));
}

void add_diffusivity(std::vector<Key>& keys, const std::string& tag, Diffusivity Params::*member) {
  keys.push_back(real("diffusion", "mu_" + tag, [member](auto& c) -> auto& { return (c.params.*member).mu; }));
  keys.push_back(real("diffusion", "nu_" + tag, [member](auto& c) -> auto& { return (c.params.*member).nu; }));
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(integer<int>("grid", "nx", [](auto& c) -> auto& { return c.grid.nx; }, true));
    k.push_back(integer<int>("grid", "ny", [](auto& c) -> auto& { return c.grid.ny; }, true));
    k.push_back(integer<int>("grid", "np", [](auto& c) -> auto& { return c.grid.np; }, true));
    k.push_back(real("grid", "lx", [](auto& c) -> auto& { return c.grid.lx; }, true));
    k.push_back(real("grid", "ly", [](auto& c) -> auto& { return c.grid.ly; }, true));
    k.push_back(real("grid", "p1", [](auto& c) -> auto& { return c.grid.p1; }, true));
    k.push_back(real("grid", "p0", [](auto& c) -> auto& { return c.grid.p0; }, true));
    k.push_back({"grid", "tbar_profile", false,
                 [](RunConfig& c, std::string_view v, int line) {
                   if (v == "constant") c.grid.tbar_profile = TbarProfile::Constant;
                   else if (v == "linear") c.grid.tbar_profile = TbarProfile::Linear;
                   else throw ConfigParseError(line, "tbar_profile must be constant or linear");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.grid.tbar_profile == TbarProfile::Constant ? "constant" : "linear");
                 }});
    k.push_back(real("grid", "tbar_top", [](auto& c) -> auto& { return c.grid.tbar_top; }));
    k.push_back(real("grid", "tbar_bottom", [](auto& c) -> auto& { return c.grid.tbar_bottom; }));

    k.push_back(real("physics", "r", [](auto& c) -> auto& { return c.params.r; }));
    k.push_back(real("physics", "rd", [](auto& c) -> auto& { return c.params.rd; }));
    k.push_back(real("physics", "cp", [](auto& c) -> auto& { return c.params.cp; }));
    k.push_back(real("physics", "latent", [](auto& c) -> auto& { return c.params.latent; }));
    k.push_back(real("physics", "g", [](auto& c) -> auto& { return c.params.g; }));
    k.push_back(real("physics", "f", [](auto& c) -> auto& { return c.params.f; }));
    k.push_back(real("physics", "v_fall", [](auto& c) -> auto& { return c.params.v_fall; }));
    k.push_back(real("physics", "beta", [](auto& c) -> auto& { return c.params.beta; }));
    k.push_back(real("physics", "qvs_star", [](auto& c) -> auto& { return c.params.qvs_star; }));
    k.push_back(real("physics", "t_a", [](auto& c) -> auto& { return c.params.t_a; }));
    k.push_back(real("physics", "t_b", [](auto& c) -> auto& { return c.params.t_b; }));
    k.push_back(boolean("physics", "qvs_pressure_scaling", [](auto& c) -> auto& { return c.params.qvs_pressure_scaling; }));
    k.push_back(real("physics", "p_ref", [](auto& c) -> auto& { return c.params.p_ref; }));
    k.push_back(real("physics", "c_ev", [](auto& c) -> auto& { return c.params.c_ev; }));
    k.push_back(real("physics", "c_cr", [](auto& c) -> auto& { return c.params.c_cr; }));
    k.push_back(real("physics", "c_ac", [](auto& c) -> auto& { return c.params.c_ac; }));
    k.push_back(real("physics", "c_cd", [](auto& c) -> auto& { return c.params.c_cd; }));
    k.push_back(real("physics", "c_cn", [](auto& c) -> auto& { return c.params.c_cn; }));
    k.push_back(real("physics", "qac_star", [](auto& c) -> auto& { return c.params.qac_star; }));

    add_diffusivity(k, "u", &Params::u);
    add_diffusivity(k, "t", &Params::t);
    add_diffusivity(k, "qv", &Params::qv);
    add_diffusivity(k, "qc", &Params::qc);
    add_diffusivity(k, "qr", &Params::qr);

    k.push_back(real("boundary", "alpha_u", [](auto& c) -> auto& { return c.boundary.alpha_u; }));
    add_robin(k, "t", &BoundaryData::t);
    add_robin(k, "qv", &BoundaryData::qv);
    add_robin(k, "qc", &BoundaryData::qc);
    add_robin(k, "qr", &BoundaryData::qr);
    k.push_back(real("boundary", "modulation_amplitude", [](auto& c) -> auto& { return c.boundary.modulation_amplitude; }));
    k.push_back(real("boundary", "modulation_period", [](auto& c) -> auto& { return c.boundary.modulation_period; }));

    k.push_back(text("initial", "recipe", [](auto& c) -> auto& { return c.initial.recipe; }));
    k.push_back(real("initial", "t_surface", [](auto& c) -> auto& { return c.initial.t_surface; }));
    k.push_back(real("initial", "t_top", [](auto& c) -> auto& { return c.initial.t_top; }));
    k.push_back(real("initial", "rh", [](auto& c) -> auto& { return c.initial.rh; }));
    k.push_back(real("initial", "bubble_amplitude", [](auto& c) -> auto& { return c.initial.bubble_amplitude; }));
    k.push_back(real("initial", "bubble_radius", [](auto& c) -> auto& { return c.initial.bubble_radius; }));
    k.push_back(real("initial", "u_amplitude", [](auto& c) -> auto& { return c.initial.u_amplitude; }));
    k.push_back(real("initial", "t_anomaly", [](auto& c) -> auto& { return c.initial.t_anomaly; }));

    k.push_back(real("time", "horizon", [](auto& c) -> auto& { return c.time.horizon; }, true));
    k.push_back(integer<long>("time", "max_steps", [](auto& c) -> auto& { return c.time.max_steps; }));
    k.push_back(real("time", "cfl", [](auto& c) -> auto& { return c.time.cfl; }));
    k.push_back(real("time", "dt_min", [](auto& c) -> auto& { return c.time.dt_min; }));
    k.push_back(real("time", "dt_max", [](auto& c) -> auto& { return c.time.dt_max; }));
    k.push_back(integer<long>("time", "output_every", [](auto& c) -> auto& { return c.time.output_every; }));
    k.push_back(real("time", "epsilon", [](auto& c) -> auto& { return c.time.epsilon; }));
    k.push_back({"time", "scheme", false,
                 [](RunConfig& c, std::string_view v, int line) {
                   if (v == "euler") c.time.scheme = ExplicitScheme::Euler;
                   else if (v == "ssprk2") c.time.scheme = ExplicitScheme::Ssprk2;
                   else throw ConfigParseError(line, "scheme must be euler or ssprk2");
                 },
                 [](const RunConfig& c) { return std::string(c.time.scheme == ExplicitScheme::Euler ? "euler" : "ssprk2"); }});

    k.push_back(real("solver", "tolerance", [](auto& c) -> auto& { return c.solver.tolerance; }));
    k.push_back(integer<int>("solver", "max_iterations", [](auto& c) -> auto& { return c.solver.max_iterations; }));

    k.push_back(text("experiment", "name", [](auto& c) -> auto& { return c.experiment.name; }));
    k.push_back(list("experiment", "epsilons", [](auto& c) -> auto& { return c.experiment.epsilons; }));
    k.push_back(list("experiment", "deltas", [](auto& c) -> auto& { return c.experiment.deltas; }));
    k.push_back(real("experiment", "twin_weight", [](auto& c) -> auto& { return c.experiment.twin_weight; }));
    k.push_back(integer<std::uint64_t>("experiment", "seed", [](auto& c) -> auto& { return c.experiment.seed; }));
    k.push_back(real("experiment", "ceiling_tolerance", [](auto& c) -> auto& { return c.experiment.ceiling_tolerance; }));
    k.push_back(real("experiment", "negativity_tolerance", [](auto& c) -> auto& { return c.experiment.negativity_tolerance; }));
    k.push_back(real("experiment", "clip_mass_tolerance", [](auto& c) -> auto& { return c.experiment.clip_mass_tolerance; }));
    k.push_back(real("experiment", "h_cancel_tolerance", [](auto& c) -> auto& { return c.experiment.h_cancel_tolerance; }));
    k.push_back(real("experiment", "divergence_tolerance", [](auto& c) -> auto& { return c.experiment.divergence_tolerance; }));
    k.push_back(real("experiment", "energy_tolerance", [](auto& c) -> auto& { return c.experiment.energy_tolerance; }));
    k.push_back(real("experiment", "epsilon_ceiling_spread", [](auto& c) -> auto& { return c.experiment.epsilon_ceiling_spread; }));
    k.push_back(real("experiment", "twin_rate_ratio", [](auto& c) -> auto& { return c.experiment.twin_rate_ratio; }));
    k.push_back(real("experiment", "twin_envelope", [](auto& c) -> auto& { return c.experiment.twin_envelope; }));
    return k;
  }();
  return table;
}

void require(bool ok, const std::string& invariant) {
  if (!ok) throw ConfigValidationError(invariant + " violated");
}

}  // namespace

void validate(const RunConfig& c) {
  const auto& g = c.grid;
  require(g.nx >= 2, "nx >= 2");
  require(g.ny >= 2, "ny >= 2");
  require(g.np >= 2, "np >= 2");
  require(g.lx > 0.0 && g.ly > 0.0, "lx, ly > 0");
  require(g.p1 > 0.0, "0 < p1");
  require(g.p1 < g.p0, "p1 < p0");
  require(g.tbar_top > 0.0 && g.tbar_bottom > 0.0, "tbar > 0");

  const auto& p = c.params;
  require(p.r > 0.0 && p.rd > 0.0 && p.cp > 0.0 && p.g > 0.0, "r, rd, cp, g > 0");
  require(p.latent >= 0.0, "latent >= 0");
  require(p.beta > 0.0 && p.beta <= 1.0, "beta in (0,1]");
  require(p.t_a >= 0.0, "t_a >= 0");
  require(p.t_a <= p.t_b, "t_a <= t_b");
  require(p.qvs_star >= 0.0, "qvs_star >= 0");
  require(p.c_ev >= 0.0 && p.c_cr >= 0.0 && p.c_ac >= 0.0 && p.c_cd >= 0.0 && p.c_cn >= 0.0,
          "rate constants >= 0");
  require(p.qac_star >= 0.0, "qac_star >= 0");
  require(p.v_fall >= 0.0, "v_fall >= 0");
  require(p.p_ref > 0.0, "p_ref > 0");
  for (const Diffusivity* d : {&p.u, &p.t, &p.qv, &p.qc, &p.qr}) require(d->mu >= 0.0 && d->nu >= 0.0, "diffusivities >= 0");

  const auto& b = c.boundary;
  require(b.alpha_u >= 0.0, "alpha_u >= 0");
  for (const RobinSpec* r : {&b.t, &b.qv, &b.qc, &b.qr}) {
    require(r->alpha_bottom >= 0.0 && r->alpha_lateral >= 0.0, "Robin coefficients >= 0");
    require(r->bottom >= 0.0 && r->lateral >= 0.0, "boundary targets >= 0");
  }
  require(b.modulation_amplitude >= 0.0 && b.modulation_amplitude <= 1.0, "modulation_amplitude in [0,1]");
  require(b.modulation_period > 0.0, "modulation_period > 0");

  const auto& t = c.time;
  require(t.horizon > 0.0, "horizon > 0");
  require(t.max_steps >= 0, "max_steps >= 0");
  require(t.cfl > 0.0 && t.cfl <= 1.0, "cfl in (0,1]");
  require(t.dt_min > 0.0 && t.dt_min <= t.dt_max, "0 < dt_min <= dt_max");
  require(t.output_every >= 0, "output_every >= 0");
  require(t.epsilon > 0.0 && t.epsilon <= 1.0, "epsilon in (0,1]");

  require(c.solver.tolerance > 0.0 && c.solver.max_iterations > 0, "solver tolerance > 0 and max_iterations > 0");

  const auto& e = c.experiment;
  for (double eps : e.epsilons) require(eps > 0.0 && eps <= 1.0, "epsilons in (0,1]");
  for (std::size_t i = 1; i < e.epsilons.size(); ++i)
    require(e.epsilons[i] < e.epsilons[i - 1], "epsilons strictly decreasing");
  for (double d : e.deltas) require(d >= 0.0, "deltas >= 0");
  require(e.twin_weight > 0.0, "twin_weight > 0");
}

RunConfig parse_config(std::string_view input) {
  const auto& table = key_table();
  std::map<std::pair<std::string, std::string>, const Key*> lookup;
  std::set<std::string> sections;
  for (const auto& key : table) {
    lookup[{key.section, key.name}] = &key;
    sections.insert(key.section);
  }

  RunConfig cfg;
  std::set<const Key*> seen;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(input)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigParseError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.contains(section)) throw ConfigParseError(line_no, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigParseError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigParseError(line_no, "key outside of any section");
    const std::string name(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = lookup.find({section, name});
    if (it == lookup.end()) throw ConfigParseError(line_no, "unknown key '" + name + "' in [" + section + "]");
    if (value.empty()) throw ConfigParseError(line_no, "empty value for '" + name + "'");
    if (!seen.insert(it->second).second) throw ConfigParseError(line_no, "duplicate key '" + name + "'");
    it->second->set(cfg, value, line_no);
  }

  for (const auto& key : table) {
    if (key.required && !seen.contains(&key))
      throw ConfigParseError(line_no, "missing required key '" + key.name + "' in [" + key.section + "]");
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& key : key_table()) {
    if (key.section != section) {
      section = key.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += key.name + " = " + key.get(cfg) + "\n";
  }
  return out;
}

}  // namespace moistpe
