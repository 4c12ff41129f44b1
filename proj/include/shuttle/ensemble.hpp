#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shuttle/params.hpp"
#include "shuttle/trajectory.hpp"

namespace shuttle {

// Uniform (x, v) grid shared by all checkpoints of a run.
struct HistogramGrid {
  double x_min = -12.0;
  double x_max = 12.0;
  int nx = 120;
  double v_min = -12.0;
  double v_max = 12.0;
  int nv = 120;

  double dx() const { return (x_max - x_min) / nx; }
  double dv() const { return (v_max - v_min) / nv; }
  // False when (x, v) falls outside the grid.
  bool locate(double x, double v, int& ix, int& iv) const;
  HistogramGrid refined(int factor) const;
};

// Joint probabilities P_q(bin) of a phase-space snapshot.
struct PhaseHistogram {
  HistogramGrid grid;
  double time = 0;
  std::array<Eigen::MatrixXd, 2> prob;  // nx x nv per occupation
  double clipped_mass = 0;              // fraction of samples outside the grid

  double total() const { return prob[0].sum() + prob[1].sum(); }

  // Normalizes raw counts over the in-grid samples; `outside` samples are reported as clipped.
  static PhaseHistogram from_counts(const HistogramGrid& grid, double time,
                                    const std::array<Eigen::MatrixXd, 2>& counts, double outside);
};

// Accumulates samples into counts; used by the ensemble and by tests.
class HistogramCounter {
 public:
  explicit HistogramCounter(const HistogramGrid& grid);
  void add(double x, double v, int q);
  void merge(const HistogramCounter& other);
  PhaseHistogram normalized(double time) const;

 private:
  HistogramGrid grid_;
  std::array<Eigen::MatrixXd, 2> counts_;
  double outside_ = 0;
};

struct SeriesStat {
  Eigen::ArrayXd mean;
  Eigen::ArrayXd sem;  // standard error of the mean; NaN when fewer than two trajectories
};

// Time-gridded ensemble means of one run.
struct EnsembleSeries {
  Eigen::ArrayXd time;  // [ns]
  std::size_t n_traj = 0;

  SeriesStat occupation;          // P_1(t)
  SeriesStat osc_energy;          // U_O [eV]
  SeriesStat dot_energy;          // U_D = <eps(x) q> [eV]
  SeriesStat system_energy;       // U_DO = U_O + U_D [eV]
  SeriesStat heat_left;           // Q_L [eV]
  SeriesStat heat_right;          // Q_R [eV]
  SeriesStat heat_osc;            // Q_O [eV]
  SeriesStat work_chem;           // W_chem [eV]
  SeriesStat heat_total;          // Q_L + Q_R + Q_O [eV]
  SeriesStat first_law_residual;  // Delta U_DO - sum Q - W_chem [eV]
  SeriesStat amplitude;           // [nm]
  SeriesStat position;            // [nm]
  SeriesStat velocity;            // [nm/ns]

  std::vector<std::size_t> checkpoint_index;  // into `time`
  std::vector<PhaseHistogram> snapshots;      // aligned with checkpoint_index

  bool has_stderr() const { return n_traj > 1; }
  // Index of grid point t; throws std::out_of_range when t is not on the grid.
  std::size_t index_of(double t) const;
  // Snapshot taken at t; throws std::out_of_range when t is not a checkpoint.
  const PhaseHistogram& snapshot_at(double t) const;
  double max_clipped_mass() const;
};

struct EnsembleOptions {
  std::vector<double> checkpoints;  // [ns]; empty -> 11 evenly spaced
  HistogramGrid grid;
  unsigned workers = 0;  // 0 -> hardware concurrency
  std::size_t block_size = 8;
};

std::vector<double> evenly_spaced_checkpoints(const Params& p, std::size_t count);

class EnsembleFault : public std::runtime_error {
 public:
  EnsembleFault(const std::string& what, std::size_t trajectory, std::uint64_t seed)
      : std::runtime_error(what), trajectory_(trajectory), seed_(seed) {}
  std::size_t trajectory() const { return trajectory_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t trajectory_;
  std::uint64_t seed_;
};

// Runs p.n_traj trajectories. Trajectory i uses
// RandomStream::trajectory_seed(p.master_seed, i); trajectories are reduced in
// fixed blocks combined in index order, so the result does not depend on the
// number of workers. Any trajectory fault aborts the whole ensemble.
EnsembleSeries simulate_ensemble(const Params& p, const EnsembleOptions& options = {});

}  // namespace shuttle
