#include "shuttle/thermo.hpp"

#include <algorithm>
#include <cmath>

namespace shuttle {

namespace {

Estimate at(const SeriesStat& s, std::size_t i) {
  const auto k = static_cast<Eigen::Index>(i);
  return {s.mean[k], s.sem[k]};
}

double shannon(const Eigen::MatrixXd& p) {
  double s = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (p(i, j) > 0) s -= p(i, j) * std::log(p(i, j));
  return s;
}

double ratio(double num, double den) {
  if (num == 0) return 0;
  return den == 0 ? INFINITY : num / den;
}

}  // namespace

InternalEnergy internal_energy(const EnsembleSeries& ensemble, double t) {
  const std::size_t i = ensemble.index_of(t);
  return {at(ensemble.system_energy, i), at(ensemble.dot_energy, i), at(ensemble.osc_energy, i)};
}

Entropies entropies(const PhaseHistogram& hist) {
  Entropies s;
  s.joint = shannon(hist.prob[0]) + shannon(hist.prob[1]);
  for (int q = 0; q < 2; ++q) {
    const double pq = hist.prob[q].sum();
    if (pq > 0) s.dot -= pq * std::log(pq);
  }
  s.conditional = s.joint - s.dot;
  return s;
}

double entropy_stderr(const PhaseHistogram& hist, std::size_t samples) {
  double m1 = 0, m2 = 0;
  for (int q = 0; q < 2; ++q) {
    const auto& p = hist.prob[q];
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      for (Eigen::Index i = 0; i < p.rows(); ++i)
        if (p(i, j) > 0) {
          const double l = std::log(p(i, j));
          m1 -= p(i, j) * l;
          m2 += p(i, j) * l * l;
        }
  }
  return std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(samples));
}

ThermoReport build_report(const EnsembleSeries& ensemble, const Params& p) {
  ThermoReport report;
  report.kT = p.kT();
  for (std::size_t k = 0; k < ensemble.checkpoint_index.size(); ++k) {
    const std::size_t i = ensemble.checkpoint_index[k];
    ThermoCheckpoint c;
    c.time = ensemble.time[static_cast<Eigen::Index>(i)];
    c.system_energy = at(ensemble.system_energy, i);
    c.dot_energy = at(ensemble.dot_energy, i);
    c.osc_energy = at(ensemble.osc_energy, i);
    c.entropy = entropies(ensemble.snapshots[k]);
    c.heat_left = at(ensemble.heat_left, i);
    c.heat_right = at(ensemble.heat_right, i);
    c.heat_osc = at(ensemble.heat_osc, i);
    c.work_chem = at(ensemble.work_chem, i);
    c.heat_total = at(ensemble.heat_total, i);
    c.first_law_residual = at(ensemble.first_law_residual, i);
    c.clipped_mass = ensemble.snapshots[k].clipped_mass;
    report.checkpoints.push_back(c);
  }
  const Eigen::ArrayXd& p1 = ensemble.occupation.mean;
  report.dot_entropy_series = p1.unaryExpr([](double q) {
    double s = 0;
    for (double w : {q, 1.0 - q})
      if (w > 0) s -= w * std::log(w);
    return s;
  });
  return report;
}

EntropyProduction second_law_check(const ThermoReport& report) {
  EntropyProduction out;
  if (report.checkpoints.empty()) return out;
  const auto& s0 = report.initial().entropy;
  const double kT = report.kT;
  for (const auto& c : report.checkpoints) {
    out.time.push_back(c.time);
    out.total.push_back((c.entropy.joint - s0.joint) - c.heat_total.value / kT);
    out.decomposed.push_back((c.entropy.dot - s0.dot) - c.heat_left.value / kT -
                             c.heat_right.value / kT +
                             (c.entropy.conditional - s0.conditional) - c.heat_osc.value / kT);
    out.sem.push_back(c.heat_total.sem / kT);
  }
  return out;
}

CycleMatching cycle_matching_conditions(const ThermoReport& report, double tolerance) {
  CycleMatching m;
  if (report.checkpoints.empty()) return m;
  const auto& first = report.initial();
  const auto& last = report.final();
  m.heat_osc = last.heat_osc.value;
  m.heat_osc_over_kT = m.heat_osc / report.kT;
  m.osc_energy_change = last.osc_energy.value - first.osc_energy.value;
  m.conditional_entropy_change = last.entropy.conditional - first.entropy.conditional;
  for (const auto& c : report.checkpoints)
    m.dot_entropy_scale = std::max(m.dot_entropy_scale, std::abs(c.entropy.dot - first.entropy.dot));
  const auto& sd = report.dot_entropy_series;
  if (sd.size() > 0) m.dot_entropy_scale = std::max(m.dot_entropy_scale, (sd - sd[0]).abs().maxCoeff());
  m.lead_entropy_flow = std::abs(last.heat_left.value + last.heat_right.value) / report.kT;
  m.heat_ratio = ratio(std::abs(m.heat_osc), std::abs(m.osc_energy_change));
  m.entropy_ratio = ratio(std::abs(m.conditional_entropy_change), m.dot_entropy_scale);
  m.heat_condition = m.heat_ratio <= tolerance;
  m.entropy_condition = m.entropy_ratio <= tolerance;
  m.cycle_consistent = m.heat_condition && m.entropy_condition;
  return m;
}

}  // namespace shuttle
