#pragma once

// Flat "key = value [unit]" experiment files. Lines starting with '#' are
// comments; list values are comma separated and share one trailing unit.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shuttle/ensemble.hpp"
#include "shuttle/params.hpp"
#include "shuttle/reduced.hpp"
#include "shuttle/stroke.hpp"

namespace shuttle {

enum class ExperimentKind { Figure2, Figure3Sweep, StrokeAudit, Feasibility, Custom };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view text);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Custom;
  Params params;

  std::vector<double> mass_factors{1, 2, 4};       // multiples of params.mass
  std::vector<double> gamma_factors{0.1, 1, 10};   // multiples of params.gamma

  std::size_t checkpoint_count = 11;
  std::vector<double> checkpoints;  // [ns]; overrides checkpoint_count when set
  HistogramGrid grid;
  std::string output_dir = "shuttle-out";
  unsigned workers = 0;

  ReducedOptions reduced;
  ScheduleOptions schedule;

  double diameter = 5.0;   // feasibility pillar diameter [nm]
  double electrons = 1.0;  // feasibility inverse: diameter for this N

  // Key/value pairs as written, in file order.
  std::vector<std::pair<std::string, std::string>> echo;

  EnsembleOptions ensemble_options() const;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // every problem found, in file order
  bool ok() const { return errors.empty(); }
};

ConfigResult validate_config(std::string_view text);

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Reads and validates a file; throws ConfigError or std::runtime_error on I/O failure.
ExperimentConfig load_config(const std::string& path);

// Invariants that only involve already converted values (used after CLI overrides).
std::vector<std::string> check_config(const ExperimentConfig& c);

// Documented keys with their default unit, for help output.
std::vector<std::pair<std::string, std::string>> config_keys();

}  // namespace shuttle
