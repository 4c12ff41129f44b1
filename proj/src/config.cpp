#include "shuttle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace shuttle {

namespace {

enum class Dim { None, Length, Time, Frequency, Mass, Friction, Temperature, Voltage, Energy,
                 InverseLength, Velocity };

const std::map<std::string, double>& units_of(Dim d) {
  using namespace units;
  static const std::map<Dim, std::map<std::string, double>> table{
      {Dim::None, {{"", 1.0}, {"1", 1.0}}},
      {Dim::Length, {{"nm", 1.0}, {"pm", 1e-3}, {"um", 1e3}, {"mm", 1e6}, {"m", metre}}},
      {Dim::Time, {{"ns", 1.0}, {"ps", 1e-3}, {"us", 1e3}, {"s", 1e9}}},
      {Dim::Frequency, {{"GHz", 1.0}, {"1/ns", 1.0}, {"MHz", 1e-3}, {"THz", 1e3}, {"Hz", 1e-9},
                        {"1/s", 1e-9}}},
      {Dim::Mass, {{"kg", kilogram}, {"g", 1e-3 * kilogram}}},
      {Dim::Friction, {{"kg/s", kilogram_per_second}}},
      {Dim::Temperature, {{"K", 1.0}, {"mK", 1e-3}}},
      {Dim::Voltage, {{"V", volt}, {"mV", 1e-3 * volt}}},
      {Dim::Energy, {{"eV", 1.0}, {"meV", 1e-3}}},
      {Dim::InverseLength, {{"1/nm", 1.0}, {"1/m", 1e-9}}},
      {Dim::Velocity, {{"nm/ns", 1.0}, {"m/s", 1.0}}},
  };
  return table.at(d);
}

std::string default_unit(Dim d) {
  switch (d) {
    case Dim::None: return "";
    case Dim::Length: return "nm";
    case Dim::Time: return "ns";
    case Dim::Frequency: return "GHz";
    case Dim::Mass: return "kg";
    case Dim::Friction: return "kg/s";
    case Dim::Temperature: return "K";
    case Dim::Voltage: return "V";
    case Dim::Energy: return "eV";
    case Dim::InverseLength: return "1/nm";
    case Dim::Velocity: return "nm/ns";
  }
  return "";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// "1, 2, 4 kg" -> numbers {1, 2, 4} and unit "kg"; the unit follows the last number.
bool split_values(const std::string& raw, std::vector<std::string>& numbers, std::string& unit) {
  std::vector<std::string> parts;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.empty()) return false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::string p = parts[i];
    if (i + 1 == parts.size()) {
      const auto sp = p.find_first_of(" \t");
      if (sp != std::string::npos) {
        unit = trim(std::string_view(p).substr(sp));
        p = p.substr(0, sp);
      }
    }
    if (p.empty()) return false;
    numbers.push_back(p);
  }
  return true;
}

struct Entry {
  Dim dim;
  bool list;
  std::function<void(ExperimentConfig&, const std::vector<double>&)> apply;
};

template <class T>
bool is_integral(double v, T& out) {
  if (!(std::abs(v) < 9e15) || v != std::floor(v)) return false;
  out = static_cast<T>(v);
  return true;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Figure2: return "figure2";
    case ExperimentKind::Figure3Sweep: return "figure3-sweep";
    case ExperimentKind::StrokeAudit: return "stroke-audit";
    case ExperimentKind::Feasibility: return "feasibility";
    case ExperimentKind::Custom: return "custom";
  }
  return "?";
}

std::optional<ExperimentKind> parse_kind(std::string_view text) {
  for (auto k : {ExperimentKind::Figure2, ExperimentKind::Figure3Sweep, ExperimentKind::StrokeAudit,
                 ExperimentKind::Feasibility, ExperimentKind::Custom})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

EnsembleOptions ExperimentConfig::ensemble_options() const {
  EnsembleOptions o;
  o.checkpoints = checkpoints.empty() ? evenly_spaced_checkpoints(params, checkpoint_count)
                                      : checkpoints;
  o.grid = grid;
  o.workers = workers;
  return o;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument([&] {
        std::string s = "invalid configuration:";
        for (const auto& e : errors) s += "\n  - " + e;
        return s;
      }()),
      errors_(std::move(errors)) {}

namespace {

using Apply = std::function<void(ExperimentConfig&, const std::vector<double>&)>;

template <class F>
Entry scalar(Dim d, F f) {
  return {d, false, [f](ExperimentConfig& c, const std::vector<double>& v) { f(c, v[0]); }};
}

const std::map<std::string, Entry>& numeric_keys() {
  static const std::map<std::string, Entry> keys{
      {"omega", scalar(Dim::Frequency, [](auto& c, double v) { c.params.omega = v; })},
      {"mass", scalar(Dim::Mass, [](auto& c, double v) { c.params.mass = v; })},
      {"gamma", scalar(Dim::Friction, [](auto& c, double v) { c.params.gamma = v; })},
      {"temperature", scalar(Dim::Temperature, [](auto& c, double v) { c.params.temperature = v; })},
      {"alpha", scalar(Dim::InverseLength, [](auto& c, double v) { c.params.alpha = v; })},
      {"voltage", scalar(Dim::Voltage, [](auto& c, double v) { c.params.voltage = v; })},
      {"eps0", scalar(Dim::Energy, [](auto& c, double v) { c.params.eps0 = v; })},
      {"gamma0", scalar(Dim::Frequency, [](auto& c, double v) { c.params.gamma0 = v; })},
      {"lambda", scalar(Dim::Length, [](auto& c, double v) { c.params.lambda_tun = v; })},
      {"x0", scalar(Dim::Length, [](auto& c, double v) { c.params.x0 = v; })},
      {"v0", scalar(Dim::Velocity, [](auto& c, double v) { c.params.v0 = v; })},
      {"dt", scalar(Dim::Time, [](auto& c, double v) { c.params.dt = v; })},
      {"t_final", scalar(Dim::Time, [](auto& c, double v) { c.params.t_final = v; })},
      {"sample_interval", scalar(Dim::Time, [](auto& c, double v) { c.params.sample_interval = v; })},
      {"sweep_mass", {Dim::None, true, [](auto& c, const auto& v) { c.mass_factors = v; }}},
      {"sweep_gamma", {Dim::None, true, [](auto& c, const auto& v) { c.gamma_factors = v; }}},
      {"checkpoint_times", {Dim::Time, true, [](auto& c, const auto& v) { c.checkpoints = v; }}},
      {"grid_x_min", scalar(Dim::Length, [](auto& c, double v) { c.grid.x_min = v; })},
      {"grid_x_max", scalar(Dim::Length, [](auto& c, double v) { c.grid.x_max = v; })},
      {"grid_v_min", scalar(Dim::Velocity, [](auto& c, double v) { c.grid.v_min = v; })},
      {"grid_v_max", scalar(Dim::Velocity, [](auto& c, double v) { c.grid.v_max = v; })},
      {"stroke_threshold", scalar(Dim::None, [](auto& c, double v) { c.schedule.threshold = v; })},
      {"stroke_min_contrast",
       scalar(Dim::None, [](auto& c, double v) { c.schedule.min_contrast = v; })},
      {"reduced_max_rate_step",
       scalar(Dim::None, [](auto& c, double v) { c.reduced.max_rate_step = v; })},
      {"diameter", scalar(Dim::Length, [](auto& c, double v) { c.diameter = v; })},
      {"electrons", scalar(Dim::None, [](auto& c, double v) { c.electrons = v; })},
  };
  return keys;
}

// Keys that take a non-negative integer without unit.
const std::vector<std::string>& integer_keys() {
  static const std::vector<std::string> keys{
      "q0", "n_traj", "seed", "checkpoints", "workers", "grid_bins_x", "grid_bins_v",
      "stroke_resolution", "steps_per_cycle"};
  return keys;
}

void set_integer(ExperimentConfig& c, const std::string& key, std::uint64_t v) {
  if (key == "q0") c.params.q0 = static_cast<int>(v);
  else if (key == "n_traj") c.params.n_traj = v;
  else if (key == "seed") c.params.master_seed = v;
  else if (key == "checkpoints") c.checkpoint_count = v;
  else if (key == "workers") c.workers = static_cast<unsigned>(v);
  else if (key == "grid_bins_x") c.grid.nx = static_cast<int>(v);
  else if (key == "grid_bins_v") c.grid.nv = static_cast<int>(v);
  else if (key == "stroke_resolution") c.schedule.resolution = static_cast<std::int64_t>(v);
  else if (key == "steps_per_cycle") c.reduced.steps_per_cycle = static_cast<int>(v);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_keys() {
  std::vector<std::pair<std::string, std::string>> out{{"kind", ""}, {"output_dir", ""},
                                                       {"stroke_continuous", ""}};
  for (const auto& [k, e] : numeric_keys()) out.emplace_back(k, default_unit(e.dim));
  for (const auto& k : integer_keys()) out.emplace_back(k, "");
  return out;
}

std::vector<std::string> check_config(const ExperimentConfig& c) {
  std::vector<std::string> errors = check_invariants(c.params);
  if (c.kind == ExperimentKind::Figure3Sweep) {
    if (c.mass_factors.empty()) errors.emplace_back("sweep_mass must not be empty");
    if (c.gamma_factors.empty()) errors.emplace_back("sweep_gamma must not be empty");
  }
  for (double f : c.mass_factors)
    if (!(f > 0)) errors.emplace_back("sweep_mass factors must be > 0");
  for (double f : c.gamma_factors)
    if (!(f >= 0)) errors.emplace_back("sweep_gamma factors must be >= 0");
  if (c.checkpoints.empty() && c.checkpoint_count < 2)
    errors.emplace_back("checkpoints must be >= 2");
  for (double t : c.checkpoints)
    if (!(t >= 0 && t <= c.params.t_final)) errors.emplace_back("checkpoint_times outside [0, t_final]");
  if (!(c.grid.x_max > c.grid.x_min)) errors.emplace_back("grid_x_max must exceed grid_x_min");
  if (!(c.grid.v_max > c.grid.v_min)) errors.emplace_back("grid_v_max must exceed grid_v_min");
  if (c.grid.nx < 1 || c.grid.nv < 1) errors.emplace_back("grid bins must be >= 1");
  if (!(c.schedule.threshold > 0)) errors.emplace_back("stroke_threshold must be > 0");
  if (c.schedule.resolution < 4 || c.schedule.resolution % 4 != 0)
    errors.emplace_back("stroke_resolution must be a positive multiple of 4");
  if (c.reduced.steps_per_cycle < 1) errors.emplace_back("steps_per_cycle must be >= 1");
  if (!(c.reduced.max_rate_step > 0)) errors.emplace_back("reduced_max_rate_step must be > 0");
  if (c.kind == ExperimentKind::Feasibility) {
    if (!(c.diameter > 0)) errors.emplace_back("diameter must be > 0");
    if (!(c.params.voltage > 0)) errors.emplace_back("feasibility needs voltage > 0");
    if (!(c.electrons > 0)) errors.emplace_back("electrons must be > 0");
  }
  return errors;
}

ConfigResult validate_config(std::string_view text) {
  ConfigResult result;
  ExperimentConfig c;
  auto& errors = result.errors;
  std::map<std::string, int> seen;

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value', got '" + body + "'");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (seen[key]++) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    if (value.empty()) {
      errors.push_back(where + "missing value for '" + key + "'");
      continue;
    }
    c.echo.emplace_back(key, value);

    if (key == "kind") {
      if (auto k = parse_kind(value))
        c.kind = *k;
      else
        errors.push_back(where + "unknown kind '" + value +
                         "' (figure2, figure3-sweep, stroke-audit, feasibility, custom)");
      continue;
    }
    if (key == "output_dir") {
      c.output_dir = value;
      continue;
    }
    if (key == "stroke_continuous") {
      if (value == "true" || value == "false")
        c.schedule.continuous = value == "true";
      else
        errors.push_back(where + "stroke_continuous must be true or false");
      continue;
    }

    const auto& ints = integer_keys();
    const bool is_int = std::find(ints.begin(), ints.end(), key) != ints.end();
    if (!is_int && !numeric_keys().count(key)) {
      errors.push_back(where + "unknown key '" + key + "'");
      continue;
    }

    std::vector<std::string> numbers;
    std::string unit;
    if (!split_values(value, numbers, unit)) {
      errors.push_back(where + "malformed value for '" + key + "'");
      continue;
    }
    std::vector<double> values;
    bool bad = false;
    for (const auto& n : numbers) {
      double v;
      if (!parse_double(n, v)) {
        errors.push_back(where + "'" + n + "' is not a number (key '" + key + "')");
        bad = true;
        break;
      }
      values.push_back(v);
    }
    if (bad) continue;

    if (is_int) {
      std::uint64_t iv = 0;
      const std::string& n = numbers[0];
      if (!unit.empty() || values.size() != 1) {
        errors.push_back(where + "'" + key + "' takes a single integer without unit");
      } else if (auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), iv);
                 ec == std::errc() && ptr == n.data() + n.size()) {
        set_integer(c, key, iv);
      } else if (values[0] >= 0 && is_integral(values[0], iv)) {
        set_integer(c, key, iv);
      } else {
        errors.push_back(where + "'" + key + "' must be a non-negative integer");
      }
      continue;
    }

    const Entry& e = numeric_keys().at(key);
    if (!e.list && values.size() != 1) {
      errors.push_back(where + "'" + key + "' takes a single value");
      continue;
    }
    const auto& table = units_of(e.dim);
    const std::string u = unit.empty() ? default_unit(e.dim) : unit;
    const auto scale = table.find(u);
    if (scale == table.end()) {
      std::string accepted;
      for (const auto& [name, f] : table) accepted += (accepted.empty() ? "" : ", ") + (name.empty() ? "(none)" : name);
      errors.push_back(where + "unit '" + unit + "' does not fit '" + key + "' (accepted: " +
                       accepted + ")");
      continue;
    }
    for (double& v : values) v *= scale->second;
    e.apply(c, values);
  }

  // The bias is applied symmetrically around the on-site energy.
  c.params.center_bias();
  for (auto& e : check_config(c)) errors.push_back(std::move(e));
  if (errors.empty()) result.config = std::move(c);
  return result;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto r = validate_config(ss.str());
  if (!r.ok()) throw ConfigError(std::move(r.errors));
  return std::move(*r.config);
}

}  // namespace shuttle
