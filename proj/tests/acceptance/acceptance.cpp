// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--criterion NAME] [--data DIR] [--workers N]

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "shuttle/experiment.hpp"
#include "shuttle/stroke.hpp"

using namespace shuttle;

namespace {

// Tolerances
constexpr double kFig2RmsWindow = 0.05;
constexpr double kLoopClosure = 0.05;      // closure gap / bounding-box diagonal
constexpr double kFig3WorkMatch = 0.15;    // |dU_O + W_mech| / |W_mech|
constexpr double kFig3HeatRatio = 0.1;     // |Q_O| / |dU_O|
constexpr double kFig3EntropyRatio = 0.1;  // |dS_O|D| / dS_D scale
constexpr std::size_t kFig3Trajectories = 500;
constexpr double kOrderRatio = 1.8;
constexpr double kFirstLawRelative = 1e-2;
constexpr std::size_t kOrderTrajectories = 16;
constexpr double kSigmaErrors = 2.0;
constexpr double kEquipartition = 0.02;
constexpr double kBoundValue = 0.099;
constexpr double kBoundTolerance = 0.001;
constexpr double kCycleSup = 0.05;
constexpr double kCycleHeat = 0.10;
constexpr double kWorkIdentity = 1e-3;

struct Context {
  std::string data = "acceptance_data";
  unsigned workers = 0;
};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ExperimentConfig base_config(const Context& ctx, ExperimentKind kind, const std::string& name) {
  ExperimentConfig c;
  c.kind = kind;
  c.output_dir = ctx.data + "/" + name;
  c.workers = ctx.workers;
  c.echo = {{"kind", to_string(kind)}};
  return c;
}

void fig2(const Context& ctx, Outcome& o) {
  const RunSummary s = run_experiment(base_config(ctx, ExperimentKind::Figure2, "figure2"));
  const auto& d = s.manifest["diagnostics"]["figure2"];
  const double rms = d["rms_P1_window[1]"];
  o.require(rms <= kFig2RmsWindow,
            "rms(P1 - reduced P1) over last 5 cycles = " + fmt(rms) + " <= " + fmt(kFig2RmsWindow));
  for (const char* loop : {"reduced_loop", "ensemble_loop"}) {
    const double area = d[loop]["area[eV]"];
    const double gap = d[loop]["relative_gap"];
    o.require(area > 0, std::string(loop) + " area = " + fmt(area) + " eV > 0");
    o.require(gap <= kLoopClosure, std::string(loop) + " closure = " + fmt(gap) + " <= " + fmt(kLoopClosure));
  }
}

void fig3(const Context& ctx, Outcome& o) {
  ExperimentConfig c = base_config(ctx, ExperimentKind::Figure3Sweep, "figure3");
  c.params.n_traj = kFig3Trajectories;
  c.mass_factors = {1, 2, 4};
  c.gamma_factors = {0.1, 1, 10};
  const RunSummary s = run_experiment(c);
  auto at = [&](double mf, double gf) -> const SweepPoint& {
    for (const auto& p : s.sweep)
      if (p.mass_factor == mf && p.gamma_factor == gf) return p;
    throw std::logic_error("missing sweep point");
  };
  for (double mf : c.mass_factors) {
    const double a = std::abs(at(mf, 0.1).heat_osc.value);
    const double b = std::abs(at(mf, 1).heat_osc.value);
    const double cc = std::abs(at(mf, 10).heat_osc.value);
    o.require(a < b && b < cc, "(a) m=" + fmt(mf) + "m0 |Q_O| = " + fmt(a) + " < " + fmt(b) + " < " + fmt(cc) + " eV");
  }
  const SweepPoint& p = at(4, 0.1);
  const double du = p.osc_energy_change.value;
  const double w = p.work_mech_reduced;
  const double match = std::abs(du + w) / std::abs(w);
  o.require(match <= kFig3WorkMatch, "(b) |dU_O + W_mech|/|W_mech| = " + fmt(match) + " (dU_O = " +
                                         fmt(du) + ", W_mech = " + fmt(w) + ") <= " + fmt(kFig3WorkMatch));
  const double heat = std::abs(p.heat_osc.value) / std::abs(du);
  o.require(heat <= kFig3HeatRatio, "(b) |Q_O|/|dU_O| = " + fmt(heat) + " <= " + fmt(kFig3HeatRatio));
  const double ent = std::abs(p.conditional_entropy_change) / p.dot_entropy_scale;
  o.require(ent <= kFig3EntropyRatio, "(c) |dS_O|D|/dS_D scale = " + fmt(p.conditional_entropy_change) +
                                          "/" + fmt(p.dot_entropy_scale) + " = " + fmt(ent) + " <= " +
                                          fmt(kFig3EntropyRatio));
}

void first_law(const Context& ctx, Outcome& o) {
  const OrderCheck c = first_law_order(Params{}, kOrderTrajectories, ctx.workers);
  o.require(c.ratio() >= kOrderRatio, "residual(dt)/residual(dt/2) = " + fmt(c.residual) + "/" +
                                          fmt(c.residual_half) + " = " + fmt(c.ratio()) + " >= " + fmt(kOrderRatio));
  o.require(c.relative() <= kFirstLawRelative, "residual / transferred energy = " + fmt(c.relative()) +
                                                   " <= " + fmt(kFirstLawRelative));
}

// t = 0 is skipped, Sigma(0) = 0 identically
double worst_sigma(const EntropyProduction& s) {
  double worst = INFINITY;
  for (std::size_t i = 1; i < s.total.size(); ++i)
    worst = std::min(worst, s.total[i] + kSigmaErrors * s.sem[i]);
  return worst;
}

void second_law(const Context& ctx, Outcome& o) {
  EnsembleOptions opt;
  opt.workers = ctx.workers;
  {
    const Params p;
    const EntropyProduction s = second_law_check(build_report(simulate_ensemble(p, opt), p));
    o.require(worst_sigma(s) >= 0, "defaults: min_{t>0} Sigma + 2 stderr = " + fmt(worst_sigma(s)) + " kB >= 0");
  }
  // equilibrium control: no bias, strong friction, start at rest in the trap centre
  Params p;
  p.voltage = 0;
  p.center_bias();
  p.gamma *= 100;
  p.x0 = 0;
  p.v0 = 0;
  p.dt = 1e-3;
  p.n_traj = 2000;
  opt.grid = {-0.1, 0.1, 100, -0.025, 0.025, 100};
  const EnsembleSeries e = simulate_ensemble(p, opt);
  const ThermoReport r = build_report(e, p);
  const EntropyProduction s = second_law_check(r);
  o.require(worst_sigma(s) >= 0, "V=0: min_{t>0} Sigma + 2 stderr = " + fmt(worst_sigma(s)) + " kB >= 0");
  o.require(e.max_clipped_mass() < 1e-4, "V=0: clipped mass = " + fmt(e.max_clipped_mass()));

  const std::size_t a = s.total.size() / 2, b = s.total.size() - 1;
  const double rate = s.total[b] - s.total[a];
  const double err = std::hypot(s.sem[a], s.sem[b]);
  o.require(std::abs(rate) <= kSigmaErrors * err, "V=0: Sigma(" + fmt(s.time[b]) + ") - Sigma(" + fmt(s.time[a]) +
                                                      ") = " + fmt(rate) + " kB, |.| <= " + fmt(kSigmaErrors * err));

  double var = 0;
  int count = 0;
  for (Eigen::Index i = 0; i < e.time.size(); ++i) {
    if (e.time[i] < 100) continue;
    var += e.velocity.sem[i] * e.velocity.sem[i] * static_cast<double>(e.n_traj);
    ++count;
  }
  var /= count;
  const double expect = p.kT() / p.mass;
  const double rel = std::abs(var / expect - 1);
  o.require(rel <= kEquipartition, "V=0: <v^2> / (kT/m) - 1 = " + fmt(var / expect - 1) + ", |.| <= " + fmt(kEquipartition));
}

void stroke_schedule(const Context&, Outcome& o) {
  const Params p;
  const StrokeSchedule s = build_schedule(p);
  const std::vector<std::pair<Fraction, Fraction>> table{
      {{0, 1}, {5, 24}}, {{5, 24}, {7, 24}}, {{7, 24}, {17, 24}}, {{17, 24}, {19, 24}}, {{19, 24}, {1, 1}}};
  bool same = s.intervals.size() == table.size();
  std::string got;
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    got += (i ? " " : "") + std::string("[") + s.intervals[i].begin.str() + "," + s.intervals[i].end.str() + ")";
    if (same) same = s.intervals[i].begin == table[i].first && s.intervals[i].end == table[i].second;
  }
  same = same && s.intervals[0].kind == StrokeKind::LeftDissipative &&
         s.intervals[1].kind == StrokeKind::Isentropic && s.intervals[2].kind == StrokeKind::RightDissipative &&
         s.intervals[3].kind == StrokeKind::Isentropic && s.intervals[4].kind == StrokeKind::LeftDissipative;
  o.require(same, "intervals " + got);
  const double ratio = s.tau_cycle / s.tau_isen;
  o.require(std::abs(ratio - 12) < 1e-12, "tau_cycle/tau_isen = " + fmt(ratio));
  o.require(std::abs(s.integral.bound - kBoundValue) <= kBoundTolerance,
            "bound = " + fmt(s.integral.bound) + " (0.099 +- 0.001)");
}

void cycle_propagator(const Context&, Outcome& o) {
  auto run = [](const Params& p, const StrokeSchedule& s, double cycles) {
    const ReducedTrace red = solve_reduced(p, cycles * p.cycle_period());
    const LimitCycle lc = limit_cycle(red);
    return compare_cycle(red, lc.cycle, periodic_cycle(p, s), s);
  };
  const Params p;
  const StrokeComparison c = run(p, build_schedule(p), 10);
  const double heat = std::max(c.heat_left_relative(), c.heat_right_relative());
  o.require(c.sup_occupation <= kCycleSup, "defaults: sup|P1 - [P1]_cycle| = " + fmt(c.sup_occupation) + " <= " + fmt(kCycleSup));
  o.require(heat <= kCycleHeat, "defaults: stroke heat sums vs reduced = " + fmt(heat) + " <= " + fmt(kCycleHeat));

  Params v = p;
  v.lambda_tun = 6;  // e^{|x0|/lambda} = e
  const StrokeComparison d = run(v, make_schedule(v, 1), 40);
  const double vheat = std::max(d.heat_left_relative(), d.heat_right_relative());
  o.require(d.sup_occupation > kCycleSup, "lambda=6nm: sup|P1 - [P1]_cycle| = " + fmt(d.sup_occupation) + " > " + fmt(kCycleSup));
  o.require(vheat > kCycleHeat, "lambda=6nm: stroke heat sums vs reduced = " + fmt(vheat) + " > " + fmt(kCycleHeat));
}

void work_identity(const Context&, Outcome& o) {
  const Params p;
  const ReducedTrace tr = solve_reduced(p, p.t_final);
  const LimitCycle lc = limit_cycle(tr);
  const Eigen::Index per = tr.steps_per_cycle;
  double worst = 0;
  for (std::size_t c = lc.cycle; c < tr.full_cycles(); ++c) {
    const Eigen::Index a = static_cast<Eigen::Index>(c) * per;
    const double area = extracted_work_area(tr.energy.segment(a, per + 1), tr.occupation.segment(a, per + 1));
    const double w = tr.work_mech[a + per] - tr.work_mech[a];
    worst = std::max(worst, std::abs(area + w) / std::abs(w));
  }
  o.require(worst <= kWorkIdentity, "cycles " + std::to_string(lc.cycle) + ".." + std::to_string(tr.full_cycles() - 1) +
                                        ": area = " + fmt(lc.area) + " eV, W_mech = " + fmt(lc.work_mech) +
                                        " eV, max |area + W_mech|/|W_mech| = " + fmt(worst) + " <= " + fmt(kWorkIdentity));
}

void feasibility_numbers(const Context&, Outcome& o) {
  const Feasibility a = feasibility(5, 25), b = feasibility(60, 25);
  const double d = feasibility_diameter(1, 25) * 1e3;  // pm
  o.require(a.rounded == 13, "N(5 nm) = " + fmt(a.electrons));
  o.require(b.rounded == 45 || b.rounded == 46, "N(60 nm) = " + fmt(b.electrons));
  o.require(std::abs(d / 30 - 1) <= 0.1, "d(N=1) = " + fmt(d) + " pm");
}

struct Criterion {
  const char* name;
  const char* title;
  std::function<void(const Context&, Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"fig2", "Fig. 2 reproduction", fig2},
      {"fig3", "Fig. 3 trends", fig3},
      {"first-law", "First law", first_law},
      {"second-law", "Second law", second_law},
      {"stroke-schedule", "Stroke schedule", stroke_schedule},
      {"cycle-propagator", "Cycle-propagator consistency", cycle_propagator},
      {"work-identity", "Limit-cycle work identity", work_identity},
      {"feasibility", "Feasibility numbers", feasibility_numbers},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Context ctx;
  std::string only;
  app.add_option("--criterion", only, "Run one criterion");
  app.add_option("--data", ctx.data, "Directory for generated datasets");
  app.add_option("--workers", ctx.workers, "Worker threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);

  int failed = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && only != c.name) continue;
    ++ran;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(ctx, o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << (o.detail.tellp() > 0 ? "; " : "") << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%s): %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", c.name, c.title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed ? 1 : 0;
}
