#include "shuttle/stroke.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "driven_dot.hpp"
#include "shuttle/model.hpp"

namespace shuttle {

Fraction::Fraction(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("fraction with zero denominator");
  if (d < 0) n = -n, d = -d;
  const std::int64_t g = std::gcd(n, d);
  num = n / g;
  den = d / g;
}

std::string Fraction::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

bool operator<(const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; }
Fraction operator+(const Fraction& a, const Fraction& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}
Fraction operator-(const Fraction& a, const Fraction& b) {
  return {a.num * b.den - b.num * a.den, a.den * b.den};
}

const char* to_string(StrokeKind kind) {
  switch (kind) {
    case StrokeKind::LeftDissipative: return "left-dissipative";
    case StrokeKind::Isentropic: return "isentropic";
    case StrokeKind::RightDissipative: return "right-dissipative";
  }
  return "?";
}

StrokeIntegral stroke_integral(double tau_isen, const Params& p) {
  const double period = p.cycle_period();
  if (!(tau_isen > 0 && tau_isen < 0.5 * period)) {
    std::ostringstream msg;
    msg << "isentropic window " << tau_isen << " ns outside (0, " << 0.5 * period << ") ns";
    throw std::invalid_argument(msg.str());
  }
  StrokeIntegral r;
  const double ratio = std::abs(p.x0) / p.lambda_tun;
  r.bound = tau_isen * p.gamma0 * std::exp(ratio * std::sin(0.5 * p.omega * tau_isen));

  // Simpson over the window centred on the zero crossing at pi / (2 omega).
  constexpr int n = 2000;
  const double a = 0.5 * period / 2 - 0.5 * tau_isen;
  const double h = tau_isen / n;
  auto f = [&](double t) {
    const double x = p.x0 * std::cos(p.omega * t);
    return tunneling_rate(x, Lead::Left, p) + tunneling_rate(x, Lead::Right, p);
  };
  double s = f(a) + f(a + tau_isen);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  r.numeric = s * h / 3;
  return r;
}

StrokeKind StrokeSchedule::kind_at(double phase) const {
  for (const auto& iv : intervals)
    if (phase >= iv.begin.value() && phase < iv.end.value()) return iv.kind;
  throw std::out_of_range("phase outside [0, 1)");
}

StrokeSchedule make_schedule(const Params& p, std::int64_t w, std::int64_t resolution) {
  if (resolution <= 0 || resolution % 4 != 0)
    throw std::invalid_argument("schedule resolution must be a positive multiple of 4");
  if (w < 0 || w > resolution / 4)
    throw std::invalid_argument("isentropic half width outside [0, resolution / 4]");
  require_valid(p);

  // The stroke starting at t = 0 sits at x0; it is the left one for x0 < 0.
  const bool flip = p.x0 > 0;
  const StrokeKind first = flip ? StrokeKind::RightDissipative : StrokeKind::LeftDissipative;
  const StrokeKind second = flip ? StrokeKind::LeftDissipative : StrokeKind::RightDissipative;
  const std::int64_t R = resolution, q1 = R / 4, q3 = 3 * R / 4;
  auto fr = [R](std::int64_t k) { return Fraction(k, R); };

  StrokeSchedule s;
  s.resolution = R;
  s.half_width = w;
  s.tau_cycle = p.cycle_period();
  s.tau_isen = s.tau_cycle * static_cast<double>(2 * w) / static_cast<double>(R);
  s.contrast = std::exp(std::abs(p.x0) / p.lambda_tun);
  s.intervals = {
      {'a', first, fr(0), fr(q1 - w)},
      {'b', StrokeKind::Isentropic, fr(q1 - w), fr(q1 + w)},
      {'c', second, fr(q1 + w), fr(q3 - w)},
      {'d', StrokeKind::Isentropic, fr(q3 - w), fr(q3 + w)},
      {'a', first, fr(q3 + w), fr(R)},
  };
  if (w > 0 && 2 * w < R / 2) {
    s.integral = stroke_integral(s.tau_isen, p);
  } else {
    s.integral.numeric = s.integral.bound = NAN;
  }
  return s;
}

StrokeSchedule build_schedule(const Params& p, const ScheduleOptions& o) {
  require_valid(p);
  if (!(o.threshold > 0)) throw std::invalid_argument("stroke threshold must be > 0");
  const std::int64_t R = o.continuous ? (std::int64_t{1} << 22) : o.resolution;
  if (R <= 0 || R % 4 != 0)
    throw std::invalid_argument("schedule resolution must be a positive multiple of 4");

  const double contrast = std::exp(std::abs(p.x0) / p.lambda_tun);
  if (!(contrast >= o.min_contrast)) {
    std::ostringstream msg;
    msg << "tunneling contrast e^{|x0|/lambda} = " << contrast << " < " << o.min_contrast
        << "; the rates do not separate into left and right windows. Increase |x0| or "
           "decrease lambda";
    throw ScheduleError(msg.str());
  }

  const double period = p.cycle_period();
  auto bound = [&](std::int64_t w) {
    return stroke_integral(period * static_cast<double>(2 * w) / static_cast<double>(R), p).bound;
  };
  // The bound increases with the window, so bisect for the largest admissible w.
  std::int64_t lo = 1, hi = R / 4 - 1;
  if (hi < 1 || !(bound(lo) <= o.threshold)) {
    std::ostringstream msg;
    msg << "no isentropic window satisfies I <= " << o.threshold << " (smallest window gives "
        << (hi < 1 ? NAN : bound(lo))
        << "); reduce Gamma0 or |x0|/lambda, or raise the threshold";
    throw ScheduleError(msg.str());
  }
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (bound(mid) <= o.threshold)
      lo = mid;
    else
      hi = mid - 1;
  }
  return make_schedule(p, lo, R);
}

std::vector<std::string> check_schedule(const StrokeSchedule& s) {
  std::vector<std::string> errors;
  Fraction cursor(0, 1);
  for (const auto& iv : s.intervals) {
    if (!(iv.begin == cursor)) errors.push_back("gap or overlap at " + cursor.str());
    if (iv.end < iv.begin) errors.push_back("negative interval at " + iv.begin.str());
    cursor = iv.end;
  }
  if (!(cursor == Fraction(1, 1))) errors.push_back("intervals end at " + cursor.str());

  auto mirror = [](StrokeKind k) {
    if (k == StrokeKind::LeftDissipative) return StrokeKind::RightDissipative;
    if (k == StrokeKind::RightDissipative) return StrokeKind::LeftDissipative;
    return k;
  };
  // Reflection t -> t + 1/2: every boundary maps onto a boundary with L <-> R.
  const Fraction half(1, 2);
  for (const auto& iv : s.intervals) {
    if (iv.length() == Fraction(0, 1)) continue;
    Fraction b = iv.begin + half;
    if (!(b < Fraction(1, 1))) b = b - Fraction(1, 1);
    const double mid = (b + Fraction(iv.length().num, 2 * iv.length().den)).value();
    const double phase = mid >= 1 ? mid - 1 : mid;
    if (s.kind_at(phase) != mirror(iv.kind))
      errors.push_back("schedule not symmetric under half-period shift at " + iv.begin.str());
  }
  return errors;
}

CycleTrace cycle_propagate(const Params& p, const StrokeSchedule& schedule,
                           const Eigen::Vector2d& initial, double t_start, int steps_per_cycle) {
  if (steps_per_cycle < 1) throw std::invalid_argument("steps_per_cycle must be >= 1");
  if (auto errors = check_schedule(schedule); !errors.empty())
    throw std::invalid_argument("invalid schedule: " + errors.front());

  const double period = p.cycle_period();
  std::vector<Eigen::Index> steps;
  Eigen::Index total = 0;
  for (const auto& iv : schedule.intervals) {
    const double len = iv.length().value();
    const auto n = len > 0 ? std::max<Eigen::Index>(
                                 1, static_cast<Eigen::Index>(std::ceil(len * steps_per_cycle - 1e-9)))
                           : 0;
    steps.push_back(n);
    total += n;
  }

  CycleTrace tr;
  for (auto* col : {&tr.time, &tr.occupation, &tr.energy, &tr.work_mech, &tr.heat_left,
                    &tr.heat_right, &tr.work_chem, &tr.dot_entropy})
    col->resize(total + 1);

  detail::Flow y;
  y.prob = initial;
  Eigen::Index k = 0;
  auto record = [&](double t) {
    tr.time[k] = t;
    tr.occupation[k] = y.prob[1];
    tr.energy[k] = charging_energy(p.x0 * std::cos(p.omega * t), p);
    tr.work_mech[k] = y.work_mech;
    tr.heat_left[k] = y.heat_left;
    tr.heat_right[k] = y.heat_right;
    tr.work_chem[k] = y.work_chem;
    tr.dot_entropy[k] = detail::dot_entropy(y.prob);
  };
  record(t_start);

  for (std::size_t j = 0; j < schedule.intervals.size(); ++j) {
    const auto& iv = schedule.intervals[j];
    tr.piece_begin.push_back(k);
    if (steps[j] == 0) continue;
    const double t0 = t_start + iv.begin.value() * period;
    const double h = iv.length().value() * period / static_cast<double>(steps[j]);
    const detail::DrivenDot dot(p, 0.5, h, iv.kind == StrokeKind::LeftDissipative,
                                iv.kind == StrokeKind::RightDissipative);
    for (Eigen::Index i = 0; i < steps[j]; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      const Eigen::Vector2d frozen = y.prob;
      y = dot.rk4(t, y, dot.rhs(t, y.prob), h);
      if (iv.kind == StrokeKind::Isentropic) y.prob = frozen;
      ++k;
      record(i + 1 == steps[j] ? t_start + iv.end.value() * period : t + h);
    }
  }
  tr.piece_begin.push_back(k);
  return tr;
}

CycleTrace periodic_cycle(const Params& p, const StrokeSchedule& schedule, int steps_per_cycle,
                          double tolerance, int max_cycles) {
  Eigen::Vector2d prob(1.0 - p.q0, static_cast<double>(p.q0));
  for (int c = 0; c < max_cycles; ++c) {
    CycleTrace tr = cycle_propagate(p, schedule, prob, 0.0, steps_per_cycle);
    const Eigen::Index last = tr.size() - 1;
    const Eigen::Vector2d next(1.0 - tr.occupation[last], tr.occupation[last]);
    if (std::abs(next[1] - prob[1]) < tolerance) return tr;
    prob = next;
  }
  std::ostringstream msg;
  msg << "stroke-wise cycle did not become periodic within " << max_cycles << " cycles";
  throw LimitCycleError(msg.str(), NAN);
}

std::vector<StrokeReport> stroke_thermo(const CycleTrace& tr, const StrokeSchedule& s,
                                        const Params& p) {
  if (tr.piece_begin.size() != s.intervals.size() + 1)
    throw std::invalid_argument("cycle trace does not match the schedule");
  std::vector<StrokeReport> out;
  for (char label : {'a', 'b', 'c', 'd'}) {
    StrokeReport r;
    r.label = label;
    for (std::size_t j = 0; j < s.intervals.size(); ++j) {
      const auto& iv = s.intervals[j];
      if (iv.label != label) continue;
      r.kind = iv.kind;
      r.length = r.length + iv.length();
      const Eigen::Index a = tr.piece_begin[j], b = tr.piece_begin[j + 1];
      r.dot_energy_change += tr.energy[b] * tr.occupation[b] - tr.energy[a] * tr.occupation[a];
      r.work_mech += tr.work_mech[b] - tr.work_mech[a];
      r.heat_left += tr.heat_left[b] - tr.heat_left[a];
      r.heat_right += tr.heat_right[b] - tr.heat_right[a];
      r.work_chem += tr.work_chem[b] - tr.work_chem[a];
      r.dot_entropy_change += tr.dot_entropy[b] - tr.dot_entropy[a];
    }
    r.duration = r.length.value() * s.tau_cycle;
    r.first_law_residual =
        r.dot_energy_change - (r.heat_left + r.heat_right + r.work_chem + r.work_mech);
    r.entropy_production = r.dot_entropy_change - (r.heat_left + r.heat_right) / p.kT();
    out.push_back(r);
  }
  return out;
}

double StrokeComparison::heat_left_relative() const {
  return std::abs(heat_left_cycle - heat_left_reduced) / std::abs(heat_left_reduced);
}
double StrokeComparison::heat_right_relative() const {
  return std::abs(heat_right_cycle - heat_right_reduced) / std::abs(heat_right_reduced);
}

StrokeComparison compare_cycle(const ReducedTrace& reduced, std::size_t cycle,
                               const CycleTrace& strokes, const StrokeSchedule& schedule) {
  if (cycle + 1 > reduced.full_cycles())
    throw std::out_of_range("reduced trace has no complete cycle " + std::to_string(cycle));
  const double period = schedule.tau_cycle;
  const double start = static_cast<double>(cycle) * period;
  const Eigen::Index a = static_cast<Eigen::Index>(cycle) * reduced.steps_per_cycle;
  const Eigen::Index b = a + reduced.steps_per_cycle;

  StrokeComparison c;
  for (Eigen::Index i = 0; i < strokes.size(); ++i) {
    const double t = start + (strokes.time[i] - strokes.time[0]);
    c.sup_occupation = std::max(
        c.sup_occupation, std::abs(reduced.occupation_at(std::min(t, reduced.time[b])) -
                                   strokes.occupation[i]));
  }
  const Eigen::Index last = strokes.size() - 1;
  c.heat_left_cycle = strokes.heat_left[last] - strokes.heat_left[0];
  c.heat_right_cycle = strokes.heat_right[last] - strokes.heat_right[0];
  c.work_mech_cycle = strokes.work_mech[last] - strokes.work_mech[0];
  c.heat_left_reduced = reduced.heat_left[b] - reduced.heat_left[a];
  c.heat_right_reduced = reduced.heat_right[b] - reduced.heat_right[a];
  c.work_mech_reduced = reduced.work_mech[b] - reduced.work_mech[a];
  return c;
}

}  // namespace shuttle
