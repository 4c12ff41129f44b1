#include <doctest.h>

#include <cmath>

#include "shuttle/ensemble.hpp"

using namespace shuttle;

namespace {

Params small(std::size_t n, double t_final = 10.0) {
  Params p;
  p.n_traj = n;
  p.t_final = t_final;
  p.sample_interval = 0.1;
  return p;
}

}  // namespace

TEST_CASE("single trajectory: means equal the path, stderr flagged") {
  const Params p = small(1);
  const EnsembleSeries e = simulate_ensemble(p);
  const Trajectory t = simulate_trajectory(p, RandomStream::trajectory_seed(p.master_seed, 0));
  CHECK_FALSE(e.has_stderr());
  REQUIRE(static_cast<std::size_t>(e.time.size()) == t.samples.size());
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CHECK(e.position.mean[k] == t.samples[i].x);
    CHECK(e.occupation.mean[k] == t.samples[i].q);
    CHECK(e.heat_osc.mean[k] == t.ledgers[i].heat_osc);
    CHECK(std::isnan(e.position.sem[k]));
  }
}

TEST_CASE("worker count does not change any result") {
  const Params p = small(37);
  EnsembleOptions one, many;
  one.workers = 1;
  many.workers = 4;
  many.block_size = one.block_size = 4;
  const EnsembleSeries a = simulate_ensemble(p, one);
  const EnsembleSeries b = simulate_ensemble(p, many);
  CHECK((a.osc_energy.mean == b.osc_energy.mean).all());
  CHECK((a.osc_energy.sem == b.osc_energy.sem).all());
  CHECK((a.heat_left.mean == b.heat_left.mean).all());
  CHECK((a.occupation.mean == b.occupation.mean).all());
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    CHECK(a.snapshots[k].prob[0] == b.snapshots[k].prob[0]);
    CHECK(a.snapshots[k].prob[1] == b.snapshots[k].prob[1]);
  }
}

TEST_CASE("series invariants: occupation in [0,1], stderr >= 0, snapshots normalized") {
  const Params p = small(24);
  const EnsembleSeries e = simulate_ensemble(p);
  CHECK((e.occupation.mean >= 0).all());
  CHECK((e.occupation.mean <= 1).all());
  for (const SeriesStat* s : {&e.occupation, &e.osc_energy, &e.heat_osc, &e.work_chem})
    CHECK((s->sem.tail(s->sem.size() - 1) >= 0).all());
  REQUIRE(e.snapshots.size() == 11);
  for (const auto& h : e.snapshots) {
    CHECK(std::abs(h.total() - 1.0) < 1e-12);
    CHECK(h.clipped_mass == 0.0);
  }
  CHECK(e.index_of(5.0) == 50);
  CHECK_THROWS_AS(e.index_of(5.05), std::out_of_range);
  CHECK_THROWS_AS(e.index_of(11.0), std::out_of_range);
  CHECK(e.snapshot_at(10.0).time == doctest::Approx(10.0));
  CHECK_THROWS_AS(e.snapshot_at(0.1), std::out_of_range);
}

TEST_CASE("mass outside the histogram grid is clipped and reported") {
  const Params p = small(16);
  EnsembleOptions o;
  o.grid.x_min = -2;
  o.grid.x_max = 2;
  o.checkpoints = {0.0};
  const EnsembleSeries e = simulate_ensemble(p, o);
  // all trajectories start at x0 = -6
  CHECK(e.snapshots[0].clipped_mass == 1.0);
  CHECK(e.max_clipped_mass() == 1.0);
}

TEST_CASE("zero bias: chemical work vanishes identically") {
  Params p = small(16);
  p.voltage = 0;
  p.center_bias();
  const EnsembleSeries e = simulate_ensemble(p);
  CHECK((e.work_chem.mean == 0).all());
}

TEST_CASE("a faulting trajectory aborts the ensemble and names its seed") {
  Params p = small(10, 50.0);
  p.dt = 0.05;
  p.sample_interval = 0.05;
  try {
    simulate_ensemble(p);
    FAIL("expected an ensemble fault");
  } catch (const EnsembleFault& f) {
    CHECK(f.seed() == RandomStream::trajectory_seed(p.master_seed, f.trajectory()));
    CHECK(std::string(f.what()).find("trajectory") != std::string::npos);
  }
}

TEST_CASE("checkpoints must lie on the simulated range") {
  const Params p = small(2);
  EnsembleOptions o;
  o.checkpoints = {0.0, 20.0};
  CHECK_THROWS_AS(simulate_ensemble(p, o), std::invalid_argument);
}

TEST_CASE("histogram counter: merge is order independent and exact") {
  HistogramGrid g;
  HistogramCounter a(g), b(g), ab(g), ba(g);
  for (int i = 0; i < 1000; ++i) {
    a.add(std::sin(i) * 5, std::cos(i) * 5, i % 2);
    b.add(std::cos(3 * i) * 8, std::sin(7 * i) * 8, (i / 3) % 2);
  }
  ab.merge(a);
  ab.merge(b);
  ba.merge(b);
  ba.merge(a);
  const auto x = ab.normalized(0), y = ba.normalized(0);
  CHECK(x.prob[0] == y.prob[0]);
  CHECK(x.prob[1] == y.prob[1]);
  CHECK(std::abs(x.total() - 1) < 1e-12);
}

TEST_CASE("grid locate and refinement") {
  HistogramGrid g;
  int ix = -1, iv = -1;
  CHECK(g.locate(-12.0, -12.0, ix, iv));
  CHECK(ix == 0);
  CHECK(iv == 0);
  CHECK(g.locate(11.999, 0.1, ix, iv));
  CHECK(ix == 119);
  CHECK(iv == 60);
  CHECK_FALSE(g.locate(12.0, 0.0, ix, iv));
  CHECK_FALSE(g.locate(0.0, -13.0, ix, iv));
  const HistogramGrid r = g.refined(2);
  CHECK(r.nx == 240);
  CHECK(r.dx() == doctest::Approx(g.dx() / 2));
}
