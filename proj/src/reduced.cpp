#include "shuttle/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "driven_dot.hpp"
#include "shuttle/model.hpp"

namespace shuttle {

double ReducedTrace::occupation_at(double t) const {
  const double end = time[size() - 1];
  if (!(t >= -1e-12 * end && t <= end * (1 + 1e-12))) {
    std::ostringstream msg;
    msg << "t = " << t << " ns outside the reduced trace [0, " << end << "]";
    throw std::out_of_range(msg.str());
  }
  const auto i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(t / step), 0, size() - 2);
  const double s = (t - time[i]) / step;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * occupation[i] + h10 * step * occupation_rate[i] + h01 * occupation[i + 1] +
         h11 * step * occupation_rate[i + 1];
}

double ReducedTrace::interpolate(const Eigen::ArrayXd& column, double t) const {
  const auto i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(t / step), 0, size() - 2);
  const double s = std::clamp((t - time[i]) / step, 0.0, 1.0);
  return (1 - s) * column[i] + s * column[i + 1];
}

ReducedTrace solve_reduced(const Params& p, double t_final, const ReducedOptions& options) {
  require_valid(p);
  if (options.steps_per_cycle < 1) throw std::invalid_argument("steps_per_cycle must be >= 1");
  if (!(t_final > 0)) throw std::invalid_argument("t_final must be > 0");

  ReducedTrace tr;
  tr.params = p;
  tr.steps_per_cycle = options.steps_per_cycle;
  tr.step = p.cycle_period() / options.steps_per_cycle;
  const auto n_steps = static_cast<Eigen::Index>(std::ceil(t_final / tr.step - 1e-9));
  const Eigen::Index n = n_steps + 1;
  for (auto* col : {&tr.time, &tr.occupation, &tr.occupation_rate, &tr.position, &tr.energy,
                    &tr.work_mech, &tr.heat_left, &tr.heat_right, &tr.work_chem,
                    &tr.dot_energy, &tr.dot_entropy})
    col->resize(n);

  const detail::DrivenDot dot(p, options.max_rate_step, tr.step);
  const double h = tr.step;
  detail::Flow y;
  y.prob << 1.0 - p.q0, static_cast<double>(p.q0);

  auto record = [&](Eigen::Index i, double t, const detail::Flow& state, const detail::Flow& slope) {
    tr.time[i] = t;
    tr.occupation[i] = state.prob[1];
    tr.occupation_rate[i] = slope.prob[1];
    tr.position[i] = dot.position(t);
    tr.energy[i] = charging_energy(tr.position[i], p);
    tr.work_mech[i] = state.work_mech;
    tr.heat_left[i] = state.heat_left;
    tr.heat_right[i] = state.heat_right;
    tr.work_chem[i] = state.work_chem;
    tr.dot_energy[i] = tr.energy[i] * state.prob[1];
    tr.dot_entropy[i] = detail::dot_entropy(state.prob);
  };

  detail::Flow k1 = dot.rhs(0.0, y.prob);
  record(0, 0.0, y, k1);
  for (Eigen::Index i = 0; i < n_steps; ++i) {
    y = dot.rk4(static_cast<double>(i) * h, y, k1, h);
    const double t_next = static_cast<double>(i + 1) * h;
    k1 = dot.rhs(t_next, y.prob);
    record(i + 1, t_next, y, k1);
  }
  return tr;
}

double extracted_work_area(const Eigen::ArrayXd& energy, const Eigen::ArrayXd& occupation) {
  const Eigen::Index n = energy.size();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    sum += energy[i] * occupation[j] - energy[j] * occupation[i];
  }
  return 0.5 * sum;
}

LimitCycle limit_cycle(const ReducedTrace& trace, double tolerance) {
  const std::size_t cycles = trace.full_cycles();
  if (cycles < 3)
    throw std::invalid_argument("limit_cycle: trace must span at least three full periods");
  const Eigen::Index per = trace.steps_per_cycle;
  double distance = INFINITY;
  for (std::size_t c = 1; c < cycles; ++c) {
    const Eigen::Index start = static_cast<Eigen::Index>(c) * per;
    distance = (trace.occupation.segment(start, per + 1) -
                trace.occupation.segment(start - per, per + 1))
                   .abs()
                   .maxCoeff();
    if (distance < tolerance) {
      LimitCycle lc;
      lc.cycle = c;
      lc.convergence = distance;
      lc.energy = trace.energy.segment(start, per + 1);
      lc.occupation = trace.occupation.segment(start, per + 1);
      lc.area = extracted_work_area(lc.energy, lc.occupation);
      lc.work_mech = trace.work_mech[start + per] - trace.work_mech[start];
      return lc;
    }
  }
  std::ostringstream msg;
  msg << "limit cycle not reached within " << cycles << " cycles; last sup distance " << distance
      << " > " << tolerance;
  throw LimitCycleError(msg.str(), distance);
}

ReducedLaws reduced_laws(const ReducedTrace& trace, Eigen::Index from, Eigen::Index to) {
  if (from < 0 || to >= trace.size() || from > to)
    throw std::out_of_range("reduced_laws: invalid index range");
  ReducedLaws r;
  r.dot_energy_change = trace.dot_energy[to] - trace.dot_energy[from];
  r.heat_left = trace.heat_left[to] - trace.heat_left[from];
  r.heat_right = trace.heat_right[to] - trace.heat_right[from];
  r.work_chem = trace.work_chem[to] - trace.work_chem[from];
  r.work_mech = trace.work_mech[to] - trace.work_mech[from];
  r.first_law_residual =
      r.dot_energy_change - (r.heat_left + r.heat_right + r.work_chem + r.work_mech);
  const double scale = std::abs(r.heat_left) + std::abs(r.heat_right) + std::abs(r.work_chem) +
                       std::abs(r.work_mech);
  r.relative_residual = scale > 0 ? std::abs(r.first_law_residual) / scale
                                  : std::abs(r.first_law_residual);
  r.dot_entropy_change = trace.dot_entropy[to] - trace.dot_entropy[from];
  r.entropy_production = r.dot_entropy_change - (r.heat_left + r.heat_right) / trace.params.kT();
  return r;
}

ReducedLaws reduced_laws(const ReducedTrace& trace) { return reduced_laws(trace, 0, trace.size() - 1); }

AutonomousComparison compare_to_autonomous(const ReducedTrace& trace,
                                           const EnsembleSeries& ensemble, double window_start) {
  const double end = trace.time[trace.size() - 1];
  if (ensemble.time.size() == 0 || ensemble.time[0] < -1e-12 ||
      ensemble.time[ensemble.time.size() - 1] > end * (1 + 1e-12)) {
    throw GridMismatchError("ensemble time grid is not covered by the reduced trace");
  }
  const Params& p = trace.params;
  double eps_scale = std::abs(p.alpha * p.voltage * p.x0);
  if (eps_scale == 0) eps_scale = 1;

  AutonomousComparison c;
  double sq = 0, sq_window = 0, sq_param = 0;
  for (Eigen::Index i = 0; i < ensemble.time.size(); ++i) {
    const double t = ensemble.time[i];
    const double dp = ensemble.occupation.mean[i] - trace.occupation_at(t);
    const double de = (charging_energy(ensemble.position.mean[i], p) -
                       charging_energy(p.x0 * std::cos(p.omega * t), p)) / eps_scale;
    const double dist = std::hypot(de, dp);
    c.sup_occupation = std::max(c.sup_occupation, std::abs(dp));
    c.sup_parametric = std::max(c.sup_parametric, dist);
    sq += dp * dp;
    sq_param += dist * dist;
    ++c.samples;
    if (t >= window_start - 1e-9) {
      sq_window += dp * dp;
      ++c.window_samples;
    }
  }
  c.rms_occupation = std::sqrt(sq / static_cast<double>(c.samples));
  c.rms_parametric = std::sqrt(sq_param / static_cast<double>(c.samples));
  c.rms_occupation_window =
      c.window_samples ? std::sqrt(sq_window / static_cast<double>(c.window_samples)) : 0.0;
  const Eigen::Index last = ensemble.time.size() - 1;
  const double t_last = ensemble.time[last];
  c.heat_left_deviation = ensemble.heat_left.mean[last] - trace.interpolate(trace.heat_left, t_last);
  c.heat_right_deviation = ensemble.heat_right.mean[last] - trace.interpolate(trace.heat_right, t_last);
  return c;
}

}  // namespace shuttle
