#pragma once

// Dot master equation driven by the ideal oscillator trajectory
// x_t = x0 cos(omega t), with mechanical work, lead heats and chemical work.

#include <Eigen/Core>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "shuttle/ensemble.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/params.hpp"

namespace shuttle {

struct ReducedOptions {
  int steps_per_cycle = 4096;
  double max_rate_step = 0.5;  // largest admissible escape rate * step
};

// Solution sampled at every integrator step t_n = n * step.
struct ReducedTrace {
  Params params;
  double step = 0;  // [ns]
  int steps_per_cycle = 0;

  Eigen::ArrayXd time;            // [ns]
  Eigen::ArrayXd occupation;      // P_1
  Eigen::ArrayXd occupation_rate; // dP_1/dt [1/ns]
  Eigen::ArrayXd position;        // x_t [nm]
  Eigen::ArrayXd energy;          // eps(x_t) [eV]
  Eigen::ArrayXd work_mech;       // cumulative, [eV]
  Eigen::ArrayXd heat_left;
  Eigen::ArrayXd heat_right;
  Eigen::ArrayXd work_chem;
  Eigen::ArrayXd dot_energy;      // U_D = eps P_1 [eV]
  Eigen::ArrayXd dot_entropy;     // S_D [k_B]

  Eigen::Index size() const { return time.size(); }
  std::size_t full_cycles() const {
    return static_cast<std::size_t>((time.size() - 1) / steps_per_cycle);
  }
  // Cubic Hermite interpolation of P_1; throws std::out_of_range outside the trace.
  double occupation_at(double t) const;
  // Linear interpolation of a cumulative column.
  double interpolate(const Eigen::ArrayXd& column, double t) const;
};

ReducedTrace solve_reduced(const Params& p, double t_final, const ReducedOptions& options = {});

// Closed (eps, P_1) orbit reached by the driven dot.
struct LimitCycle {
  std::size_t cycle = 0;       // index of the first converged cycle
  double convergence = 0;      // sup |P_1| distance to the previous cycle
  Eigen::ArrayXd energy;       // eps over the cycle (closed: last = first period end)
  Eigen::ArrayXd occupation;
  // Signed enclosed area; positive when the orbit runs clockwise with P_1 on
  // the abscissa and eps on the ordinate (counterclockwise in the (eps, P_1)
  // plane). Equals the work extracted per cycle, -W_mech.
  double area = 0;
  double work_mech = 0;        // W_mech accumulated over the same cycle [eV]
};

class LimitCycleError : public std::runtime_error {
 public:
  LimitCycleError(const std::string& what, double last_distance)
      : std::runtime_error(what), last_distance_(last_distance) {}
  double last_distance() const { return last_distance_; }

 private:
  double last_distance_;
};

LimitCycle limit_cycle(const ReducedTrace& trace, double tolerance = 1e-4);

// Shoelace area of the polygon (energy_i, occupation_i), closed implicitly,
// with the orientation convention of LimitCycle::area.
double extracted_work_area(const Eigen::ArrayXd& energy, const Eigen::ArrayXd& occupation);

struct ReducedLaws {
  double dot_energy_change = 0;
  double heat_left = 0;
  double heat_right = 0;
  double work_chem = 0;
  double work_mech = 0;
  double first_law_residual = 0;  // dU_D - (Q_L + Q_R + W_chem + W_mech)
  double relative_residual = 0;   // relative to the sum of magnitudes of the flows
  double dot_entropy_change = 0;  // [k_B]
  double entropy_production = 0;  // dS_D - (Q_L + Q_R)/kT  [k_B]
};

// Laws between two sample indices (default: the whole trace).
ReducedLaws reduced_laws(const ReducedTrace& trace, Eigen::Index from, Eigen::Index to);
ReducedLaws reduced_laws(const ReducedTrace& trace);

struct AutonomousComparison {
  double sup_occupation = 0;
  double rms_occupation = 0;
  double rms_occupation_window = 0;  // over t >= window_start
  double sup_parametric = 0;         // (eps / eps_scale, P_1) distance at equal times
  double rms_parametric = 0;
  double heat_left_deviation = 0;    // Q_L(end) - reduced Q_L(end) [eV]
  double heat_right_deviation = 0;
  std::size_t samples = 0;
  std::size_t window_samples = 0;
};

class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

AutonomousComparison compare_to_autonomous(const ReducedTrace& trace,
                                           const EnsembleSeries& ensemble,
                                           double window_start = 0.0);

}  // namespace shuttle
