#include "shuttle/ensemble.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "shuttle/parallel.hpp"

namespace shuttle {

bool HistogramGrid::locate(double x, double v, int& ix, int& iv) const {
  const double fx = (x - x_min) / dx();
  const double fv = (v - v_min) / dv();
  if (!(fx >= 0 && fx < nx && fv >= 0 && fv < nv)) return false;
  ix = static_cast<int>(fx);
  iv = static_cast<int>(fv);
  return true;
}

HistogramGrid HistogramGrid::refined(int factor) const {
  HistogramGrid g = *this;
  g.nx *= factor;
  g.nv *= factor;
  return g;
}

PhaseHistogram PhaseHistogram::from_counts(const HistogramGrid& grid, double time,
                                           const std::array<Eigen::MatrixXd, 2>& counts,
                                           double outside) {
  PhaseHistogram h;
  h.grid = grid;
  h.time = time;
  const double inside = counts[0].sum() + counts[1].sum();
  const double all = inside + outside;
  for (int q = 0; q < 2; ++q)
    h.prob[q] = inside > 0 ? Eigen::MatrixXd(counts[q] / inside)
                           : Eigen::MatrixXd::Zero(grid.nx, grid.nv);
  h.clipped_mass = all > 0 ? outside / all : 0.0;
  return h;
}

HistogramCounter::HistogramCounter(const HistogramGrid& grid) : grid_(grid) {
  if (grid.nx <= 0 || grid.nv <= 0 || !(grid.x_max > grid.x_min) || !(grid.v_max > grid.v_min))
    throw std::invalid_argument("histogram grid must have positive extent and bin counts");
  for (auto& c : counts_) c = Eigen::MatrixXd::Zero(grid.nx, grid.nv);
}

void HistogramCounter::add(double x, double v, int q) {
  int ix = 0, iv = 0;
  if (grid_.locate(x, v, ix, iv))
    counts_[q](ix, iv) += 1.0;
  else
    outside_ += 1.0;
}

void HistogramCounter::merge(const HistogramCounter& other) {
  for (int q = 0; q < 2; ++q) counts_[q] += other.counts_[q];
  outside_ += other.outside_;
}

PhaseHistogram HistogramCounter::normalized(double time) const {
  return PhaseHistogram::from_counts(grid_, time, counts_, outside_);
}

std::size_t EnsembleSeries::index_of(double t) const {
  if (time.size() == 0) throw std::out_of_range("empty ensemble series");
  const double spacing = time.size() > 1 ? time[1] - time[0] : 1.0;
  const double f = (t - time[0]) / spacing;
  const long i = std::lround(f);
  if (i < 0 || i >= time.size() || std::abs(time[i] - t) > 1e-6 * spacing) {
    std::ostringstream msg;
    msg << "t = " << t << " ns is not on the ensemble output grid";
    throw std::out_of_range(msg.str());
  }
  return static_cast<std::size_t>(i);
}

const PhaseHistogram& EnsembleSeries::snapshot_at(double t) const {
  const std::size_t i = index_of(t);
  for (std::size_t k = 0; k < checkpoint_index.size(); ++k)
    if (checkpoint_index[k] == i) return snapshots[k];
  std::ostringstream msg;
  msg << "no phase-space checkpoint at t = " << t << " ns";
  throw std::out_of_range(msg.str());
}

double EnsembleSeries::max_clipped_mass() const {
  double m = 0;
  for (const auto& s : snapshots) m = std::max(m, s.clipped_mass);
  return m;
}

std::vector<double> evenly_spaced_checkpoints(const Params& p, std::size_t count) {
  if (count < 2) return {0.0, p.t_final};
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = p.t_final * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

namespace {

enum Obs : int {
  kOccupation,
  kOscEnergy,
  kDotEnergy,
  kSystemEnergy,
  kHeatLeft,
  kHeatRight,
  kHeatOsc,
  kWorkChem,
  kHeatTotal,
  kResidual,
  kAmplitude,
  kPosition,
  kVelocity,
  kObsCount
};

// Welford accumulators of one block of trajectories; rows = observables, cols = time.
struct BlockStats {
  double count = 0;
  Eigen::ArrayXXd mean;
  Eigen::ArrayXXd m2;
  std::vector<HistogramCounter> histograms;

  BlockStats(std::size_t samples, const std::vector<std::size_t>& checkpoints,
             const HistogramGrid& grid)
      : mean(Eigen::ArrayXXd::Zero(kObsCount, samples)),
        m2(Eigen::ArrayXXd::Zero(kObsCount, samples)),
        histograms(checkpoints.size(), HistogramCounter(grid)) {}

  // Chan et al. pairwise update; `other` follows `this` in trajectory order.
  void combine(const BlockStats& other) {
    if (other.count == 0) return;
    const double n = count + other.count;
    const Eigen::ArrayXXd delta = other.mean - mean;
    mean += delta * (other.count / n);
    m2 += other.m2 + delta.square() * (count * other.count / n);
    count = n;
    for (std::size_t k = 0; k < histograms.size(); ++k) histograms[k].merge(other.histograms[k]);
  }
};

SeriesStat extract(const BlockStats& s, int row) {
  SeriesStat out;
  out.mean = s.mean.row(row).transpose();
  if (s.count > 1)
    out.sem = (s.m2.row(row).transpose() / ((s.count - 1) * s.count)).sqrt();
  else
    out.sem = Eigen::ArrayXd::Constant(out.mean.size(), std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace

EnsembleSeries simulate_ensemble(const Params& p, const EnsembleOptions& options) {
  require_valid(p);
  const std::size_t n_samples = p.sample_count();
  const double spacing = static_cast<double>(p.sample_stride()) * p.dt;

  EnsembleSeries out;
  out.n_traj = p.n_traj;
  out.time = Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(n_samples), 0.0,
                                       spacing * static_cast<double>(n_samples - 1));

  const auto requested =
      options.checkpoints.empty() ? evenly_spaced_checkpoints(p, 11) : options.checkpoints;
  for (double t : requested) {
    const long i = std::lround(t / spacing);
    if (i < 0 || static_cast<std::size_t>(i) >= n_samples)
      throw std::invalid_argument("checkpoint outside the simulated time range");
    out.checkpoint_index.push_back(static_cast<std::size_t>(i));
  }
  // sample index -> checkpoint slot
  std::vector<int> slot(n_samples, -1);
  for (std::size_t k = 0; k < out.checkpoint_index.size(); ++k)
    slot[out.checkpoint_index[k]] = static_cast<int>(k);

  const std::size_t block = std::max<std::size_t>(1, options.block_size);
  const std::size_t n_blocks = (p.n_traj + block - 1) / block;

  BlockStats total(n_samples, out.checkpoint_index, options.grid);
  std::map<std::size_t, BlockStats> pending;
  std::size_t next_block = 0;
  std::mutex mutex;

  parallel_for(n_blocks, options.workers, [&](std::size_t b) {
    BlockStats stats(n_samples, out.checkpoint_index, options.grid);
    const std::size_t first = b * block;
    const std::size_t last = std::min(p.n_traj, first + block);
    Eigen::Array<double, kObsCount, 1> value;
    for (std::size_t traj = first; traj < last; ++traj) {
      const std::uint64_t seed = RandomStream::trajectory_seed(p.master_seed, traj);
      stats.count += 1;
      const double n = stats.count;
      ShuttleState start;
      try {
        run_trajectory(p, seed, [&](std::size_t i, const ShuttleState& s, const ThermoLedger& l) {
          if (i == 0) start = s;
          const double h_o = oscillator_energy(s.x, s.v, p);
          const double u_d = charging_energy(s.x, p) * s.q;
          value[kOccupation] = s.q;
          value[kOscEnergy] = h_o;
          value[kDotEnergy] = u_d;
          value[kSystemEnergy] = h_o + u_d;
          value[kHeatLeft] = l.heat_left;
          value[kHeatRight] = l.heat_right;
          value[kHeatOsc] = l.heat_osc;
          value[kWorkChem] = l.work_chem;
          value[kHeatTotal] = l.total_heat();
          value[kResidual] = first_law_residual(start, s, l, p);
          value[kAmplitude] = amplitude(s, p);
          value[kPosition] = s.x;
          value[kVelocity] = s.v;
          const auto col = static_cast<Eigen::Index>(i);
          const auto delta = (value - stats.mean.col(col)).eval();
          stats.mean.col(col) += delta / n;
          stats.m2.col(col) += delta * (value - stats.mean.col(col));
          if (slot[i] >= 0) stats.histograms[static_cast<std::size_t>(slot[i])].add(s.x, s.v, s.q);
        });
      } catch (const TrajectoryFault& e) {
        std::ostringstream msg;
        msg << "ensemble aborted: trajectory " << traj << " failed: " << e.what();
        throw EnsembleFault(msg.str(), traj, seed);
      }
    }
    std::scoped_lock lock(mutex);
    pending.emplace(b, std::move(stats));
    for (auto it = pending.find(next_block); it != pending.end(); it = pending.find(next_block)) {
      total.combine(it->second);
      pending.erase(it);
      ++next_block;
    }
  });

  out.occupation = extract(total, kOccupation);
  out.osc_energy = extract(total, kOscEnergy);
  out.dot_energy = extract(total, kDotEnergy);
  out.system_energy = extract(total, kSystemEnergy);
  out.heat_left = extract(total, kHeatLeft);
  out.heat_right = extract(total, kHeatRight);
  out.heat_osc = extract(total, kHeatOsc);
  out.work_chem = extract(total, kWorkChem);
  out.heat_total = extract(total, kHeatTotal);
  out.first_law_residual = extract(total, kResidual);
  out.amplitude = extract(total, kAmplitude);
  out.position = extract(total, kPosition);
  out.velocity = extract(total, kVelocity);
  for (std::size_t k = 0; k < out.checkpoint_index.size(); ++k)
    out.snapshots.push_back(total.histograms[k].normalized(out.time[static_cast<Eigen::Index>(out.checkpoint_index[k])]));
  return out;
}

}  // namespace shuttle
