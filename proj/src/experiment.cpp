#include "shuttle/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include "shuttle/csv.hpp"
#include "shuttle/parallel.hpp"
#include "shuttle/stroke.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

using nlohmann::json;
namespace fs = std::filesystem;

Feasibility feasibility(double diameter_nm, double voltage) {
  if (!(diameter_nm > 0) || !(voltage > 0))
    throw std::invalid_argument("feasibility needs diameter > 0 and voltage > 0");
  Feasibility f;
  f.diameter = diameter_nm;
  f.voltage = voltage;
  f.capacitance = 4 * units::pi * units::vacuum_permittivity * diameter_nm * 1e-9;
  // (eN)^2 / (2C) = eV
  f.electrons = std::sqrt(2 * f.capacitance * voltage / units::elementary_charge);
  f.rounded = std::lround(f.electrons);
  return f;
}

double feasibility_diameter(double electrons, double voltage) {
  if (!(electrons > 0) || !(voltage > 0))
    throw std::invalid_argument("feasibility needs electrons > 0 and voltage > 0");
  const double c = electrons * electrons * units::elementary_charge / (2 * voltage);
  return c / (4 * units::pi * units::vacuum_permittivity) * 1e9;
}

LoopGeometry loop_geometry(const Eigen::ArrayXd& energy, const Eigen::ArrayXd& occupation) {
  LoopGeometry g;
  const Eigen::Index n = energy.size();
  if (n < 2) return g;
  g.area = extracted_work_area(energy, occupation);
  g.closure_gap = std::hypot(energy[n - 1] - energy[0], occupation[n - 1] - occupation[0]);
  g.diagonal = std::hypot(energy.maxCoeff() - energy.minCoeff(),
                          occupation.maxCoeff() - occupation.minCoeff());
  return g;
}

Figure2Analysis analyze_figure2(const ReducedTrace& reduced, const EnsembleSeries& ensemble) {
  const Params& p = reduced.params;
  const double period = p.cycle_period();
  const Eigen::Index n = ensemble.time.size();
  const double t_end = ensemble.time[n - 1];

  Figure2Analysis a;
  a.window_start = std::max(0.0, t_end - 5 * period);
  a.comparison = compare_to_autonomous(reduced, ensemble, a.window_start);

  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ensemble.time[i] >= t_end - period - 1e-9) idx.push_back(i);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::ArrayXd e_red(m), p_red(m), e_ens(m), p_ens(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index i = idx[static_cast<std::size_t>(k)];
    const double t = ensemble.time[i];
    e_red[k] = charging_energy(p.x0 * std::cos(p.omega * t), p);
    p_red[k] = reduced.occupation_at(t);
    e_ens[k] = charging_energy(ensemble.position.mean[i], p);
    p_ens[k] = ensemble.occupation.mean[i];
  }
  a.reduced_loop = loop_geometry(e_red, p_red);
  a.ensemble_loop = loop_geometry(e_ens, p_ens);
  return a;
}

OrderCheck first_law_order(const Params& p, std::size_t trajectories, unsigned workers) {
  require_valid(p);
  if (trajectories == 0) throw std::invalid_argument("first_law_order needs trajectories >= 1");
  Params half = p;
  half.dt = 0.5 * p.dt;

  std::vector<double> res(trajectories), res_half(trajectories), moved(trajectories);
  auto residual = [](const Params& q, std::uint64_t seed, double* transferred) {
    const std::size_t last = q.sample_count() - 1;
    ShuttleState end;
    const ThermoLedger l = run_trajectory(
        q, seed, [&](std::size_t i, const ShuttleState& s, const ThermoLedger&) {
          if (i == last) end = s;
        });
    if (transferred)
      *transferred = std::abs(l.heat_left) + std::abs(l.heat_right) + std::abs(l.heat_osc) +
                     std::abs(l.work_chem);
    return std::abs(first_law_residual(initial_state(q), end, l, q));
  };
  parallel_for(trajectories, workers, [&](std::size_t i) {
    const auto seed = RandomStream::trajectory_seed(p.master_seed, i);
    res[i] = residual(p, seed, &moved[i]);
    res_half[i] = residual(half, seed, nullptr);
  });

  OrderCheck o;
  o.trajectories = trajectories;
  o.dt = p.dt;
  const double n = static_cast<double>(trajectories);
  for (std::size_t i = 0; i < trajectories; ++i) {
    o.residual += res[i] / n;
    o.residual_half += res_half[i] / n;
    o.transferred += moved[i] / n;
  }
  return o;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json params_json(const Params& p) {
  return {{"omega[1/ns]", p.omega},
          {"mass[kg]", p.mass / units::kilogram},
          {"gamma[kg/s]", p.gamma / units::kilogram_per_second},
          {"temperature[K]", p.temperature},
          {"alpha[1/nm]", p.alpha},
          {"voltage[V]", p.voltage},
          {"eps0[eV]", p.eps0},
          {"mu_left[eV]", p.mu_left},
          {"mu_right[eV]", p.mu_right},
          {"gamma0[1/ns]", p.gamma0},
          {"lambda[nm]", p.lambda_tun},
          {"x0[nm]", p.x0},
          {"v0[nm/ns]", p.v0},
          {"q0", p.q0},
          {"dt[ns]", p.dt},
          {"t_final[ns]", p.t_final},
          {"sample_interval[ns]", p.sample_interval},
          {"n_traj", p.n_traj},
          {"master_seed", p.master_seed}};
}

class Run {
 public:
  Run(fs::path dir, const ExperimentConfig& c, const Params& p, const RunOptions& o)
      : dir_(std::move(dir)), opts_(o), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
    json echo = json::object();
    for (const auto& [k, v] : c.echo) echo[k] = v;
    manifest_ = {{"kind", to_string(c.kind)},
                 {"version", kVersion},
                 {"seed", p.master_seed},
                 {"config", echo},
                 {"params", params_json(p)},
                 {"constants",
                  {{"elementary_charge[C]", units::elementary_charge},
                   {"boltzmann[eV/K]", units::boltzmann},
                   {"vacuum_permittivity[F/m]", units::vacuum_permittivity}}},
                 {"files", json::array()},
                 {"diagnostics", json::object()}};
  }

  void write(const std::string& name, const CsvTable& t) {
    t.write(dir_ / name);
    files_.push_back(name);
    manifest_["files"].push_back(name);
  }
  json& diag() { return manifest_["diagnostics"]; }
  json& manifest() { return manifest_; }
  void log(const std::string& line) const {
    if (opts_.log) *opts_.log << line << std::endl;
  }

  RunSummary finish(const std::string& status = "ok") {
    manifest_["status"] = status;
    manifest_["created_utc"] = utc_now();
    manifest_["wall_clock[s]"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(dir_ / "manifest.json");
    out << manifest_.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest in " + dir_.string());
    RunSummary s;
    s.dir = dir_;
    s.manifest = manifest_;
    for (const auto& f : files_) s.files.emplace_back(f);
    return s;
  }

  // Records the fault in the manifest and rethrows it.
  template <class F>
  auto guarded(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const EnsembleFault& e) {
      manifest_["fault"] = {{"message", e.what()}, {"trajectory", e.trajectory()}, {"seed", e.seed()}};
      finish("failed");
      throw;
    } catch (const std::exception& e) {
      manifest_["fault"] = {{"message", e.what()}};
      finish("failed");
      throw;
    }
  }

 private:
  fs::path dir_;
  RunOptions opts_;
  std::chrono::steady_clock::time_point start_;
  json manifest_;
  std::vector<std::string> files_;
};

CsvTable ensemble_table(const EnsembleSeries& s) {
  CsvTable t({"t[ns]", "P1[1]", "P1_stderr[1]", "U_O[eV]", "U_O_stderr[eV]", "U_D[eV]",
              "U_D_stderr[eV]", "U_DO[eV]", "U_DO_stderr[eV]", "Q_L[eV]", "Q_L_stderr[eV]",
              "Q_R[eV]", "Q_R_stderr[eV]", "Q_O[eV]", "Q_O_stderr[eV]", "W_chem[eV]",
              "W_chem_stderr[eV]", "residual[eV]", "residual_stderr[eV]", "x[nm]", "x_stderr[nm]",
              "v[nm/ns]", "v_stderr[nm/ns]", "amplitude[nm]", "amplitude_stderr[nm]"});
  for (Eigen::Index i = 0; i < s.time.size(); ++i) {
    std::vector<CsvTable::Cell> row{s.time[i]};
    for (const SeriesStat* st : {&s.occupation, &s.osc_energy, &s.dot_energy, &s.system_energy,
                                 &s.heat_left, &s.heat_right, &s.heat_osc, &s.work_chem,
                                 &s.first_law_residual, &s.position, &s.velocity, &s.amplitude}) {
      row.emplace_back(st->mean[i]);
      row.emplace_back(st->sem[i]);
    }
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable thermo_table(const ThermoReport& r) {
  const EntropyProduction sigma = second_law_check(r);
  CsvTable t({"t[ns]", "U_DO[eV]", "U_DO_stderr[eV]", "U_D[eV]", "U_O[eV]", "U_O_stderr[eV]",
              "S_DO[kB]", "S_D[kB]", "S_OD[kB]", "Q_L[eV]", "Q_R[eV]", "Q_O[eV]",
              "Q_O_stderr[eV]", "W_chem[eV]", "residual[eV]", "Sigma[kB]", "Sigma_split[kB]",
              "Sigma_stderr[kB]", "clipped[1]"});
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    const auto& c = r.checkpoints[i];
    t.add_row({c.time, c.system_energy.value, c.system_energy.sem, c.dot_energy.value,
               c.osc_energy.value, c.osc_energy.sem, c.entropy.joint, c.entropy.dot,
               c.entropy.conditional, c.heat_left.value, c.heat_right.value, c.heat_osc.value,
               c.heat_osc.sem, c.work_chem.value, c.first_law_residual.value, sigma.total[i],
               sigma.decomposed[i], sigma.sem[i], c.clipped_mass});
  }
  return t;
}

CsvTable reduced_table(const ReducedTrace& tr) {
  CsvTable t({"t[ns]", "x[nm]", "eps[eV]", "P1[1]", "W_mech[eV]", "Q_L[eV]", "Q_R[eV]",
              "W_chem[eV]", "U_D[eV]", "S_D[kB]"});
  for (Eigen::Index i = 0; i < tr.size(); ++i)
    t.add_row({tr.time[i], tr.position[i], tr.energy[i], tr.occupation[i], tr.work_mech[i],
               tr.heat_left[i], tr.heat_right[i], tr.work_chem[i], tr.dot_energy[i],
               tr.dot_entropy[i]});
  return t;
}

json matching_json(const CycleMatching& m) {
  return {{"Q_O[eV]", m.heat_osc},
          {"Q_O_over_kT[1]", m.heat_osc_over_kT},
          {"dU_O[eV]", m.osc_energy_change},
          {"dS_OD[kB]", m.conditional_entropy_change},
          {"dS_D_scale[kB]", m.dot_entropy_scale},
          {"heat_ratio[1]", m.heat_ratio},
          {"entropy_ratio[1]", m.entropy_ratio},
          {"heat_condition", m.heat_condition},
          {"entropy_condition", m.entropy_condition},
          {"cycle_consistent", m.cycle_consistent}};
}

void ensemble_diagnostics(Run& run, const EnsembleSeries& s, const ThermoReport& r,
                          const OrderCheck& order) {
  const auto sigma = second_law_check(r);
  double worst = INFINITY;
  for (std::size_t i = 0; i < sigma.total.size(); ++i)
    worst = std::min(worst, sigma.total[i] + 2 * sigma.sem[i]);
  run.diag()["histogram_clipped_mass"] = s.max_clipped_mass();
  run.diag()["first_law"] = {{"trajectories", order.trajectories},
                             {"dt[ns]", order.dt},
                             {"residual[eV]", order.residual},
                             {"residual_half_dt[eV]", order.residual_half},
                             {"ratio[1]", order.ratio()},
                             {"relative[1]", order.relative()}};
  run.diag()["second_law_min_sigma_plus_2stderr[kB]"] = worst;
  run.diag()["cycle_matching"] = matching_json(cycle_matching_conditions(r));
}

struct EnsembleRun {
  EnsembleSeries series;
  ThermoReport report;
};

constexpr std::size_t kOrderTrajectories = 8;

EnsembleRun run_ensemble(Run& run, const ExperimentConfig& c, const Params& p,
                         const std::string& prefix = "") {
  run.log(prefix + "ensemble: " + std::to_string(p.n_traj) + " trajectories");
  EnsembleRun e;
  e.series = run.guarded([&] {
    return simulate_ensemble(p, c.ensemble_options());
  });
  e.report = build_report(e.series, p);
  run.write("ensemble.csv", ensemble_table(e.series));
  run.write("thermo.csv", thermo_table(e.report));
  const OrderCheck order =
      run.guarded([&] { return first_law_order(p, std::min(kOrderTrajectories, p.n_traj), c.workers); });
  ensemble_diagnostics(run, e.series, e.report, order);
  return e;
}

json loop_json(const LoopGeometry& g) {
  return {{"area[eV]", g.area}, {"closure_gap", g.closure_gap}, {"relative_gap", g.relative_gap()}};
}

RunSummary run_figure2(const ExperimentConfig& c, const RunOptions& o, bool custom) {
  const Params& p = c.params;
  Run run(c.output_dir, c, p, o);
  const ReducedTrace reduced = run.guarded([&] { return solve_reduced(p, p.t_final, c.reduced); });
  const EnsembleRun e = run_ensemble(run, c, p);
  run.write("reduced.csv", reduced_table(reduced));

  if (reduced.full_cycles() >= 3) {
    try {
      const LimitCycle lc = limit_cycle(reduced);
      run.diag()["limit_cycle"] = {{"cycle", lc.cycle},
                                   {"convergence", lc.convergence},
                                   {"area[eV]", lc.area},
                                   {"W_mech[eV]", lc.work_mech}};
    } catch (const LimitCycleError& err) {
      run.diag()["limit_cycle"] = {{"error", err.what()}};
    }
  }
  if (!custom) {
    const Figure2Analysis a = analyze_figure2(reduced, e.series);
    CsvTable t({"t[ns]", "eps[eV]", "P1[1]", "source"});
    for (Eigen::Index i = 0; i < reduced.size(); ++i)
      t.add_row({reduced.time[i], reduced.energy[i], reduced.occupation[i], std::string("reduced")});
    for (Eigen::Index i = 0; i < e.series.time.size(); ++i)
      t.add_row({e.series.time[i], charging_energy(e.series.position.mean[i], p),
                 e.series.occupation.mean[i], std::string("ensemble")});
    run.write("parametric.csv", t);
    run.diag()["figure2"] = {{"window_start[ns]", a.window_start},
                             {"rms_P1_window[1]", a.comparison.rms_occupation_window},
                             {"rms_P1[1]", a.comparison.rms_occupation},
                             {"sup_P1[1]", a.comparison.sup_occupation},
                             {"rms_parametric[1]", a.comparison.rms_parametric},
                             {"Q_L_deviation[eV]", a.comparison.heat_left_deviation},
                             {"Q_R_deviation[eV]", a.comparison.heat_right_deviation},
                             {"reduced_loop", loop_json(a.reduced_loop)},
                             {"ensemble_loop", loop_json(a.ensemble_loop)}};
  }
  return run.finish();
}

SweepPoint sweep_point(const ThermoReport& r, const EnsembleSeries& s, const Params& p,
                       double work_mech_reduced) {
  SweepPoint pt;
  pt.params = p;
  const auto& a = r.initial();
  const auto& b = r.final();
  pt.osc_energy_change = {b.osc_energy.value - a.osc_energy.value, b.osc_energy.sem};
  pt.heat_osc = b.heat_osc;
  pt.work_mech_reduced = work_mech_reduced;
  pt.matching = cycle_matching_conditions(r);
  pt.conditional_entropy_change = pt.matching.conditional_entropy_change;
  pt.dot_entropy_scale = pt.matching.dot_entropy_scale;
  pt.max_clipped_mass = s.max_clipped_mass();
  return pt;
}

RunSummary run_sweep(const ExperimentConfig& c, const RunOptions& o) {
  Run top(c.output_dir, c, c.params, o);
  const ReducedTrace reduced =
      top.guarded([&] { return solve_reduced(c.params, c.params.t_final, c.reduced); });
  const double w_mech = reduced.work_mech[reduced.size() - 1];

  std::vector<SweepPoint> points;
  std::size_t index = 0;
  for (double mf : c.mass_factors) {
    for (double gf : c.gamma_factors) {
      Params p = c.params;
      p.mass *= mf;
      p.gamma *= gf;
      p.master_seed = RandomStream::trajectory_seed(c.params.master_seed, index);
      std::ostringstream name;
      name << "point_" << std::setw(3) << std::setfill('0') << index;
      ExperimentConfig pc = c;
      pc.params = p;
      pc.output_dir = (fs::path(c.output_dir) / name.str()).string();
      Run run(pc.output_dir, pc, p, o);
      run.manifest()["sweep"] = {{"index", index}, {"mass_factor", mf}, {"gamma_factor", gf}};
      const EnsembleRun e = top.guarded([&] {
        std::ostringstream prefix;
        prefix << name.str() << " (m x" << mf << ", gamma x" << gf << ") ";
        return run_ensemble(run, pc, p, prefix.str());
      });
      SweepPoint pt = sweep_point(e.report, e.series, p, w_mech);
      pt.index = index;
      pt.mass_factor = mf;
      pt.gamma_factor = gf;
      run.finish();
      points.push_back(pt);
      top.manifest()["points"].push_back(name.str() + "/manifest.json");
      ++index;
    }
  }

  CsvTable t({"m[kg]", "gamma[kg/s]", "m_factor[1]", "gamma_factor[1]", "dU_O[eV]",
              "dU_O_stderr[eV]", "Q_O[eV]", "Q_O_stderr[eV]", "W_mech_reduced[eV]", "S_OD[kB]",
              "S_D_scale[kB]", "clipped[1]"});
  for (const auto& pt : points)
    t.add_row({pt.params.mass / units::kilogram, pt.params.gamma / units::kilogram_per_second,
               pt.mass_factor, pt.gamma_factor, pt.osc_energy_change.value,
               pt.osc_energy_change.sem, pt.heat_osc.value, pt.heat_osc.sem,
               pt.work_mech_reduced, pt.conditional_entropy_change, pt.dot_entropy_scale,
               pt.max_clipped_mass});
  top.write("figure3.csv", t);
  top.diag()["W_mech_reduced[eV]"] = w_mech;
  RunSummary s = top.finish();
  s.sweep = std::move(points);
  return s;
}

RunSummary run_stroke_audit(const ExperimentConfig& c, const RunOptions& o) {
  const Params& p = c.params;
  Run run(c.output_dir, c, p, o);
  const StrokeSchedule s = run.guarded([&] { return build_schedule(p, c.schedule); });

  CsvTable sched({"label", "kind", "begin", "end", "begin[ns]", "end[ns]"});
  for (const auto& iv : s.intervals)
    sched.add_row({std::string(1, iv.label), std::string(to_string(iv.kind)), iv.begin.str(),
                   iv.end.str(), iv.begin.value() * s.tau_cycle, iv.end.value() * s.tau_cycle});
  run.write("schedule.csv", sched);

  const double horizon = std::max(p.t_final, 10 * s.tau_cycle);
  const ReducedTrace reduced = run.guarded([&] { return solve_reduced(p, horizon, c.reduced); });
  const LimitCycle lc = run.guarded([&] { return limit_cycle(reduced); });
  const CycleTrace cyc =
      run.guarded([&] { return periodic_cycle(p, s, c.reduced.steps_per_cycle); });
  const auto strokes = stroke_thermo(cyc, s, p);
  const StrokeComparison cmp = compare_cycle(reduced, lc.cycle, cyc, s);

  CsvTable st({"label", "kind", "length", "duration[ns]", "dU_D[eV]", "W_mech[eV]", "Q_L[eV]",
               "Q_R[eV]", "W_chem[eV]", "dS_D[kB]", "residual[eV]", "Sigma[kB]"});
  for (const auto& r : strokes)
    st.add_row({std::string(1, r.label), std::string(to_string(r.kind)), r.length.str(),
                r.duration, r.dot_energy_change, r.work_mech, r.heat_left, r.heat_right,
                r.work_chem, r.dot_entropy_change, r.first_law_residual, r.entropy_production});
  run.write("strokes.csv", st);

  CsvTable ct({"t[ns]", "eps[eV]", "P1_cycle[1]", "P1_reduced[1]"});
  const double start = static_cast<double>(lc.cycle) * s.tau_cycle;
  for (Eigen::Index i = 0; i < cyc.size(); ++i) {
    const double t = cyc.time[i];
    ct.add_row({t, cyc.energy[i], cyc.occupation[i],
                reduced.occupation_at(std::min(start + t, reduced.time[reduced.size() - 1]))});
  }
  run.write("cycle.csv", ct);

  run.diag()["schedule"] = {{"tau_cycle[ns]", s.tau_cycle},
                            {"tau_isen[ns]", s.tau_isen},
                            {"contrast[1]", s.contrast},
                            {"I_bound[1]", s.integral.bound},
                            {"I_numeric[1]", s.integral.numeric},
                            {"threshold[1]", c.schedule.threshold},
                            {"resolution", s.resolution}};
  run.diag()["comparison"] = {{"reduced_cycle", lc.cycle},
                              {"sup_P1[1]", cmp.sup_occupation},
                              {"Q_L_cycle[eV]", cmp.heat_left_cycle},
                              {"Q_L_reduced[eV]", cmp.heat_left_reduced},
                              {"Q_R_cycle[eV]", cmp.heat_right_cycle},
                              {"Q_R_reduced[eV]", cmp.heat_right_reduced},
                              {"W_mech_cycle[eV]", cmp.work_mech_cycle},
                              {"W_mech_reduced[eV]", cmp.work_mech_reduced}};
  return run.finish();
}

RunSummary run_feasibility(const ExperimentConfig& c, const RunOptions& o) {
  Run run(c.output_dir, c, c.params, o);
  const Feasibility f = feasibility(c.diameter, c.params.voltage);
  const double d = feasibility_diameter(c.electrons, c.params.voltage);
  const Feasibility g = feasibility(d, c.params.voltage);
  CsvTable t({"d[nm]", "V[V]", "C[F]", "N[1]", "N_rounded[1]"});
  for (const auto& r : {f, g})
    t.add_row({r.diameter, r.voltage, r.capacitance, r.electrons, std::int64_t{r.rounded}});
  run.write("feasibility.csv", t);
  run.diag()["feasibility"] = {{"N[1]", f.electrons},
                               {"N_rounded", f.rounded},
                               {"diameter_for_N[nm]", d}};
  return run.finish();
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  if (auto errors = check_config(config); !errors.empty()) throw ConfigError(std::move(errors));
  switch (config.kind) {
    case ExperimentKind::Figure2: return run_figure2(config, options, false);
    case ExperimentKind::Custom: return run_figure2(config, options, true);
    case ExperimentKind::Figure3Sweep: return run_sweep(config, options);
    case ExperimentKind::StrokeAudit: return run_stroke_audit(config, options);
    case ExperimentKind::Feasibility: return run_feasibility(config, options);
  }
  throw std::logic_error("unknown experiment kind");
}

}  // namespace shuttle
