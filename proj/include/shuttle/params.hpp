#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shuttle/units.hpp"

namespace shuttle {

// Physical constants and numerical knobs, all in internal units.
// Defaults reproduce the nanopillar shuttle parameter set.
struct Params {
  double omega = 0.25 * units::gigahertz;                  // angular frequency [1/ns]
  double mass = 20e-19 * units::kilogram;                  // [eV ns^2/nm^2]
  double gamma = 0.05e-10 * units::kilogram_per_second;    // friction [eV ns/nm^2]
  double temperature = 1.0;                                // [K]
  double alpha = 0.01;                                     // field strength [1/nm]
  double voltage = 25.0 * units::volt;                     // [V]
  double eps0 = 0.0;                                       // on-site energy [eV]
  double mu_left = 12.5;                                   // [eV]
  double mu_right = -12.5;                                 // [eV]
  double gamma0 = 0.01 * units::gigahertz;                 // bare tunneling rate [1/ns]
  double lambda_tun = 1.0;                                 // tunneling length [nm]

  double x0 = -6.0;  // initial position [nm]
  double v0 = 0.0;   // initial velocity [nm/ns]
  int q0 = 1;        // initial occupation

  double dt = 1e-4;               // integrator step [ns]
  double t_final = 250.0;         // horizon [ns]
  double sample_interval = 0.05;  // output grid spacing [ns]
  std::size_t n_traj = 1000;
  std::uint64_t master_seed = 20200417;

  double spring() const { return mass * omega * omega; }  // [eV/nm^2]
  double kT() const { return units::boltzmann * temperature; }
  double beta() const { return 1.0 / kT(); }
  double cycle_period() const { return 2.0 * units::pi / omega; }

  // Sets mu_left/mu_right symmetrically around eps0 so that mu_left - mu_right = e V.
  void center_bias() {
    mu_left = eps0 + 0.5 * voltage;
    mu_right = eps0 - 0.5 * voltage;
  }

  // Steps between two output samples.
  std::size_t sample_stride() const;
  std::size_t sample_count() const;
};

// Human-readable invariant violations; empty when the parameter set is usable.
std::vector<std::string> check_invariants(const Params& p);

// Throws std::invalid_argument listing every violation.
void require_valid(const Params& p);

}  // namespace shuttle
