#include <doctest.h>

#include <cmath>

#include "shuttle/reduced.hpp"

using namespace shuttle;

TEST_CASE("frozen oscillator relaxes to the two-lead steady state") {
  Params p;
  p.omega = 1e-9;  // x_t stays at x0 over the run
  p.x0 = -0.7;
  p.eps0 = 0.3;
  p.voltage = 0.002;  // comparable to kT so both Fermi factors are fractional
  p.center_bias();
  p.q0 = 0;
  ReducedOptions o;
  o.steps_per_cycle = 1 << 30;  // step ~ 6 ns
  const ReducedTrace tr = solve_reduced(p, 2000.0, o);
  const double x = p.x0;
  const double gl = tunneling_rate(x, Lead::Left, p), gr = tunneling_rate(x, Lead::Right, p);
  const double eps = charging_energy(x, p);
  const double fl = fermi(eps, p.mu_left, p.beta()), fr = fermi(eps, p.mu_right, p.beta());
  CHECK(tr.occupation[tr.size() - 1] == doctest::Approx((gl * fl + gr * fr) / (gl + gr)).epsilon(1e-6));
}

TEST_CASE("no tunneling: occupation frozen, work is a state-function difference") {
  Params p;
  p.gamma0 = 0;
  const ReducedTrace tr = solve_reduced(p, 60.0);
  for (Eigen::Index i = 0; i < tr.size(); ++i) {
    REQUIRE(tr.occupation[i] == 1.0);
    CHECK(tr.work_mech[i] == doctest::Approx(tr.energy[i] - tr.energy[0]).epsilon(1e-10).scale(1.0));
    CHECK(tr.heat_left[i] == 0.0);
    CHECK(tr.work_chem[i] == 0.0);
  }
  const ReducedLaws l = reduced_laws(tr);
  CHECK(l.heat_left == 0.0);
  CHECK(l.heat_right == 0.0);
  CHECK(l.work_chem == 0.0);
  CHECK(std::abs(l.dot_energy_change - l.work_mech) < 1e-10);
}

TEST_CASE("no tunneling: degenerate limit cycle of zero area") {
  Params p;
  p.gamma0 = 0;
  const ReducedTrace tr = solve_reduced(p, 4 * p.cycle_period());
  const LimitCycle lc = limit_cycle(tr);
  CHECK(lc.cycle == 1);
  CHECK(lc.area == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(lc.work_mech) < 1e-10);
}

TEST_CASE("defaults: fast convergence, positive area equal to extracted work") {
  const Params p;
  const ReducedTrace tr = solve_reduced(p, p.t_final);
  CHECK(tr.full_cycles() == 9);
  const LimitCycle lc = limit_cycle(tr);
  CHECK(lc.cycle <= 3);
  CHECK(lc.convergence < 1e-4);
  CHECK(lc.area > 0);
  CHECK(std::abs(lc.area + lc.work_mech) <= 1e-3 * std::abs(lc.work_mech));
  // occupation stays a probability
  CHECK((tr.occupation >= 0).all());
  CHECK((tr.occupation <= 1).all());
}

TEST_CASE("defaults: first law per cycle and second law over full cycles") {
  const Params p;
  const ReducedTrace tr = solve_reduced(p, p.t_final);
  const Eigen::Index per = tr.steps_per_cycle;
  for (Eigen::Index c = 0; c + 1 <= static_cast<Eigen::Index>(tr.full_cycles()); ++c) {
    const ReducedLaws l = reduced_laws(tr, c * per, (c + 1) * per);
    CHECK(l.relative_residual < 1e-8);
  }
  const ReducedLaws cyc = reduced_laws(tr, 5 * per, 7 * per);
  CHECK(std::abs(cyc.dot_energy_change) < 1e-6);
  CHECK(std::abs(cyc.dot_entropy_change) < 1e-6);
  CHECK(cyc.entropy_production > 0);
  // the engine turns chemical work into mechanical work
  CHECK(cyc.work_mech < 0);
  CHECK(cyc.work_chem > 0);
  CHECK(cyc.work_mech == doctest::Approx(-(cyc.heat_left + cyc.heat_right + cyc.work_chem)).epsilon(1e-6));
}

TEST_CASE("too coarse a step is reported") {
  const Params p;
  ReducedOptions o;
  o.steps_per_cycle = 32;  // step ~ 0.8 ns, rate ~ 4 GHz
  CHECK_THROWS_AS(solve_reduced(p, 30.0, o), StepSizeError);
}

TEST_CASE("limit cycle needs three periods and reports non-convergence") {
  const Params p;
  CHECK_THROWS_AS(limit_cycle(solve_reduced(p, 2.5 * p.cycle_period())), std::invalid_argument);
  Params slow = p;
  slow.gamma0 = 1e-4;  // relaxation much slower than a period
  slow.q0 = 0;
  try {
    limit_cycle(solve_reduced(slow, 4 * p.cycle_period()));
    FAIL("expected non-convergence");
  } catch (const LimitCycleError& e) {
    CHECK(e.last_distance() > 1e-4);
  }
}

TEST_CASE("shoelace orientation") {
  Eigen::ArrayXd e(4), q(4);
  e << 0, 1, 1, 0;
  q << 0, 0, 1, 1;  // counterclockwise in (eps, P1)
  CHECK(extracted_work_area(e, q) == doctest::Approx(1.0));
  CHECK(extracted_work_area(e.reverse(), q.reverse()) == doctest::Approx(-1.0));
}

TEST_CASE("Hermite interpolation reproduces grid values and stays in range") {
  const Params p;
  const ReducedTrace tr = solve_reduced(p, 30.0);
  for (Eigen::Index i = 0; i < tr.size(); i += 97) CHECK(tr.occupation_at(tr.time[i]) == doctest::Approx(tr.occupation[i]));
  CHECK_THROWS_AS(tr.occupation_at(-1.0), std::out_of_range);
  CHECK_THROWS_AS(tr.occupation_at(40.0), std::out_of_range);
}

TEST_CASE("comparison needs an ensemble grid inside the trace") {
  const Params p;
  const ReducedTrace tr = solve_reduced(p, 10.0);
  EnsembleSeries e;
  e.time = Eigen::ArrayXd::LinSpaced(21, 0.0, 20.0);
  CHECK_THROWS_AS(compare_to_autonomous(tr, e), GridMismatchError);
}

TEST_CASE("single trajectory deviates by O(1), heavy frictionless pillar tracks the reduced model") {
  Params p;
  p.t_final = 50;
  p.sample_interval = 0.05;
  const ReducedTrace tr = solve_reduced(p, p.t_final);

  p.n_traj = 1;
  const AutonomousComparison one = compare_to_autonomous(tr, simulate_ensemble(p));
  CHECK(one.sup_occupation > 0.5);

  double last = INFINITY;
  for (double factor : {1.0, 100.0}) {
    Params heavy = p;
    heavy.gamma = 0;
    heavy.mass *= factor;
    heavy.n_traj = 200;
    const AutonomousComparison c = compare_to_autonomous(tr, simulate_ensemble(heavy));
    CHECK(c.rms_occupation < last);
    last = c.rms_occupation;
  }
  CHECK(last < 0.05);
}
