// Command line front end: run experiments, estimate electron counts,
// validate config files.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "shuttle/config.hpp"
#include "shuttle/experiment.hpp"

using namespace shuttle;

namespace {

int run_command(const std::string& path, const std::string& out, std::optional<std::uint64_t> seed,
                std::optional<unsigned> workers, const std::string& kind) {
  ExperimentConfig c = load_config(path);
  if (!out.empty()) c.output_dir = out;
  if (seed) c.params.master_seed = *seed;
  if (workers) c.workers = *workers;
  if (!kind.empty()) {
    auto k = parse_kind(kind);
    if (!k) throw ConfigError({"unknown kind '" + kind + "'"});
    c.kind = *k;
    c.echo.emplace_back("kind", kind);
  }
  if (auto errors = check_config(c); !errors.empty()) throw ConfigError(std::move(errors));

  const RunSummary s = run_experiment(c, {&std::clog});
  std::cout << "wrote " << s.dir.string() << "/manifest.json";
  for (const auto& f : s.files) std::cout << "\n  " << f.string();
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-electron shuttle simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, out, kind;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (overrides output_dir)");
  run->add_option("--seed", seed, "Master seed (overrides seed)");
  run->add_option("--workers", workers, "Worker threads, 0 = all cores");
  run->add_option("--kind", kind, "figure2, figure3-sweep, stroke-audit, feasibility or custom");

  double diameter = 5, voltage = 25;
  std::optional<double> electrons;
  auto* feas = app.add_subcommand("feasibility", "Electron number for a pillar diameter and bias");
  feas->add_option("--diameter", diameter, "Pillar diameter [nm]")->capture_default_str();
  feas->add_option("--voltage", voltage, "Bias voltage [V]")->capture_default_str();
  feas->add_option("--electrons", electrons, "Also report the diameter [nm] for this N");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check a config file and print the resolved values");
  val->add_option("config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, out, seed, workers, kind);

    if (*feas) {
      const Feasibility f = feasibility(diameter, voltage);
      std::cout << std::setprecision(6) << "d = " << f.diameter << " nm, V = " << f.voltage
                << " V\nC = " << f.capacitance << " F\nN = " << f.electrons << " (~" << f.rounded
                << ")\n";
      if (electrons)
        std::cout << "d(N = " << *electrons << ") = " << feasibility_diameter(*electrons, voltage)
                  << " nm\n";
      return 0;
    }

    if (*val) {
      std::ifstream in(validate_path);
      if (!in) throw std::runtime_error("cannot read config file '" + validate_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      const ConfigResult r = validate_config(ss.str());
      if (!r.ok()) {
        for (const auto& e : r.errors) std::cerr << validate_path << ": " << e << '\n';
        return 1;
      }
      const auto& c = *r.config;
      const Params& p = c.params;
      std::cout << "kind = " << to_string(c.kind) << "\n"
                << std::setprecision(17) << "omega = " << p.omega << " 1/ns\n"
                << "mass = " << p.mass / units::kilogram << " kg\n"
                << "gamma = " << p.gamma / units::kilogram_per_second << " kg/s\n"
                << "temperature = " << p.temperature << " K\n"
                << "voltage = " << p.voltage << " V (mu_L = " << p.mu_left
                << " eV, mu_R = " << p.mu_right << " eV)\n"
                << "n_traj = " << p.n_traj << ", seed = " << p.master_seed << "\n"
                << "ok\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
