#pragma once

// Batch experiments: ensemble runs, mass/friction sweeps, stroke audits and
// the electron-count estimate, each written to its own directory as CSV files
// plus manifest.json.

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "shuttle/config.hpp"
#include "shuttle/ensemble.hpp"
#include "shuttle/reduced.hpp"
#include "shuttle/thermo.hpp"

namespace shuttle {

inline constexpr const char* kVersion = SHUTTLE_VERSION;

struct Feasibility {
  double diameter = 0;     // [nm]
  double voltage = 0;      // [V]
  double capacitance = 0;  // [F]
  double electrons = 0;    // N = sqrt(2 C V / e)
  long rounded = 0;
};

// Self-capacitance 4 pi eps0 d of the pillar tip; d > 0 and V > 0.
Feasibility feasibility(double diameter_nm, double voltage);
// Inverse: the diameter [nm] at which N electrons match e V.
double feasibility_diameter(double electrons, double voltage);

struct LoopGeometry {
  double area = 0;         // shoelace area, positive counterclockwise in (eps, P_1)
  double closure_gap = 0;  // distance between first and last point
  double diagonal = 0;     // bounding-box diagonal
  double relative_gap() const { return diagonal > 0 ? closure_gap / diagonal : 0.0; }
};

LoopGeometry loop_geometry(const Eigen::ArrayXd& energy, const Eigen::ArrayXd& occupation);

struct Figure2Analysis {
  double window_start = 0;  // final five periods [ns]
  AutonomousComparison comparison;
  LoopGeometry reduced_loop;   // last period
  LoopGeometry ensemble_loop;  // last period, eps evaluated at <x>
};

Figure2Analysis analyze_figure2(const ReducedTrace& reduced, const EnsembleSeries& ensemble);

// Mean |first-law residual| over n trajectories at p.dt and p.dt / 2.
struct OrderCheck {
  std::size_t trajectories = 0;
  double dt = 0;
  double residual = 0;       // at dt [eV]
  double residual_half = 0;  // at dt / 2 [eV]
  double transferred = 0;    // mean sum |Q_nu| + |W_chem| at dt [eV]
  double ratio() const { return residual / residual_half; }
  double relative() const { return residual / transferred; }
};

OrderCheck first_law_order(const Params& p, std::size_t trajectories, unsigned workers = 0);

struct SweepPoint {
  std::size_t index = 0;
  double mass_factor = 1;
  double gamma_factor = 1;
  Params params;
  Estimate osc_energy_change;  // Delta U_O [eV]
  Estimate heat_osc;           // Q_O [eV]
  double work_mech_reduced = 0;
  double conditional_entropy_change = 0;  // Delta S_O|D [k_B]
  double dot_entropy_scale = 0;           // max |Delta S_D| [k_B]
  double max_clipped_mass = 0;
  CycleMatching matching;
};

struct RunSummary {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;  // every CSV written, relative to dir
  nlohmann::json manifest;
  std::vector<SweepPoint> sweep;  // figure3-sweep only
};

struct RunOptions {
  std::ostream* log = nullptr;  // progress lines, optional
};

// Runs config.kind into config.output_dir (created if needed).
// Ensemble faults are recorded in the manifest before being rethrown.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace shuttle
