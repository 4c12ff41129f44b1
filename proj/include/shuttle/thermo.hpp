#pragma once

// Ensemble-level thermodynamics of the autonomous shuttle: internal energies,
// phase-space entropies, first/second-law bookkeeping and the conditions under
// which it reduces to the driven-dot (cycle) description.
//
// Entropies are in units of k_B and are measured relative to one histogram
// cell dx*dv; only differences between checkpoints carry physical meaning.

#include <vector>

#include "shuttle/ensemble.hpp"

namespace shuttle {

struct Estimate {
  double value = 0;
  double sem = 0;
};

struct InternalEnergy {
  Estimate total;  // U_DO
  Estimate dot;    // U_D
  Estimate osc;    // U_O
};

// Throws std::out_of_range when t is not on the ensemble grid.
InternalEnergy internal_energy(const EnsembleSeries& ensemble, double t);

struct Entropies {
  double joint = 0;        // S_DO
  double dot = 0;          // S_D
  double conditional = 0;  // S_O|D = S_DO - S_D
};

Entropies entropies(const PhaseHistogram& hist);

// Sampling error of the joint entropy estimate from n samples, sqrt(Var[ln p] / n).
double entropy_stderr(const PhaseHistogram& hist, std::size_t samples);

struct ThermoCheckpoint {
  double time = 0;
  Estimate system_energy;
  Estimate dot_energy;
  Estimate osc_energy;
  Entropies entropy;
  Estimate heat_left;
  Estimate heat_right;
  Estimate heat_osc;
  Estimate work_chem;
  Estimate heat_total;
  Estimate first_law_residual;
  double clipped_mass = 0;
};

struct ThermoReport {
  double kT = 0;  // [eV]
  std::vector<ThermoCheckpoint> checkpoints;
  // S_D from P_1 at every output sample; checkpoints can alias with the period
  Eigen::ArrayXd dot_entropy_series;

  const ThermoCheckpoint& initial() const { return checkpoints.front(); }
  const ThermoCheckpoint& final() const { return checkpoints.back(); }
};

ThermoReport build_report(const EnsembleSeries& ensemble, const Params& p);

// Entropy production in units of k_B at every checkpoint, in the joint form
// Delta S_DO - sum_nu Q_nu / kT and in the form split into dot, lead, conditional
// and oscillator-bath contributions. `sem` comes from the heat statistics.
struct EntropyProduction {
  std::vector<double> time;
  std::vector<double> total;
  std::vector<double> decomposed;
  std::vector<double> sem;
};

EntropyProduction second_law_check(const ThermoReport& report);

// Whether the oscillator behaves as an ideal work source over the run:
// negligible bath heat and no change of the conditional entropy.
struct CycleMatching {
  double heat_osc = 0;                     // Q_O [eV]
  double heat_osc_over_kT = 0;             // Q_O / kT
  double osc_energy_change = 0;            // Delta U_O [eV]
  double conditional_entropy_change = 0;   // Delta S_O|D
  double dot_entropy_scale = 0;            // max_t |Delta S_D(t)| over all samples
  double lead_entropy_flow = 0;            // |Q_L + Q_R| / kT
  double heat_ratio = 0;                   // |Q_O| / |Delta U_O|
  double entropy_ratio = 0;                // |Delta S_O|D| / dot_entropy_scale
  bool heat_condition = false;
  bool entropy_condition = false;
  bool cycle_consistent = false;
};

CycleMatching cycle_matching_conditions(const ThermoReport& report, double tolerance = 0.1);

}  // namespace shuttle
