#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "shuttle/model.hpp"

using namespace shuttle;

TEST_CASE("fermi: symmetry point, logistic value and saturation") {
  CHECK(fermi(0.3, 0.3, 40.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fermi(std::log(3.0), 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));

  const double hot = fermi(1e4, 0.0, 1.0);
  CHECK(hot == 0.0);
  CHECK(fermi(-1e4, 0.0, 1.0) == 1.0);
  // beta * e V / 2 at T = 1 K, V = 25 V is ~1.45e5; naive exponentials overflow there.
  const Params p;
  const double below = fermi(0.0, p.mu_left, p.beta());
  const double above = fermi(0.0, p.mu_right, p.beta());
  CHECK(std::isfinite(below));
  CHECK(below == 1.0);
  CHECK(above == 0.0);
}

TEST_CASE("fermi: rejects non-finite input and non-positive beta") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fermi(nan, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(fermi(0.0, std::numeric_limits<double>::infinity(), 1.0), std::domain_error);
  CHECK_THROWS_AS(fermi(0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("fermi: monotone, bounded and NaN free up to |beta*delta| = 1e6") {
  double prev = 1.0;
  for (int i = -1000; i <= 1000; ++i) {
    const double z = 1e3 * i;  // beta = 1
    const double f = fermi(z, 0.0, 1.0);
    REQUIRE(std::isfinite(f));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("tunneling rates") {
  Params p;
  CHECK(tunneling_rate(0.0, Lead::Left, p) == doctest::Approx(p.gamma0));
  CHECK(tunneling_rate(0.0, Lead::Right, p) == doctest::Approx(p.gamma0));
  CHECK(tunneling_rate(p.lambda_tun, Lead::Left, p) == doctest::Approx(p.gamma0 / std::exp(1.0)));
  // 0.01 GHz * e^6, evaluated independently
  CHECK(tunneling_rate(-6.0, Lead::Left, p) == doctest::Approx(4.0342879349273515).epsilon(1e-13));
}

TEST_CASE("charging energy and force") {
  Params p;
  CHECK(charging_energy(0.0, p) == p.eps0);
  p.eps0 = 0.7;
  CHECK(charging_energy(6.0, p) == doctest::Approx(0.7 - 1.5).epsilon(1e-14));
  p.center_bias();
  for (double x : {-8.0, -1.0, 0.0, 2.5, 9.0})
    CHECK(charging_energy(x, p) - p.mu_left ==
          doctest::Approx(-p.alpha * p.voltage * x - 0.5 * p.voltage).epsilon(1e-13));

  CHECK(electrostatic_force(0, p) == 0.0);
  CHECK(electrostatic_force(1, p) == doctest::Approx(0.25));
  CHECK_THROWS_AS(electrostatic_force(2, p), std::invalid_argument);
  // displacement of the filled-dot equilibrium, well below the few-nm amplitude
  CHECK(electrostatic_force(1, p) / p.spring() == doctest::Approx(0.3204353268).epsilon(1e-8));
}

TEST_CASE("default unit conversions") {
  const Params p;
  CHECK(p.mass == doctest::Approx(12.483018148921527).epsilon(1e-14));
  CHECK(p.spring() == doctest::Approx(0.7801886343075954).epsilon(1e-14));
  // underdamped: zeta = gamma / (2 m omega)
  CHECK(p.gamma / (2 * p.mass * p.omega) == doctest::Approx(5e-3).epsilon(1e-10));
  CHECK(p.mu_left - p.mu_right == doctest::Approx(p.voltage));
}

TEST_CASE("rate matrix examples") {
  Params p;
  p.voltage = 0.0;
  p.center_bias();
  const auto r = rate_matrix(0.0, p);
  CHECK(r.left.gain == doctest::Approx(p.gamma0 / 2));
  CHECK(r.left.loss == doctest::Approx(p.gamma0 / 2));

  const Params d;
  const auto far = rate_matrix(-6.0, d);
  // f_L at eps(-6 nm) = eps0 + 1.5 eV against mu_L = eps0 + 12.5 eV is 1 to double precision
  CHECK(far.left.gain == doctest::Approx(4.0342879349273515).epsilon(1e-13));
  CHECK(far.left.loss < 1e-300);
}

TEST_CASE("rate matrix properties over random positions") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> volt(-30.0, 30.0);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Params p;
    p.voltage = volt(gen);
    p.temperature = trial % 2 ? 1.0 : 300.0;
    p.center_bias();
    const double x = pos(gen);
    const auto r = rate_matrix(x, p);

    const Generator<double> g = r.generator();
    const double scale = g.cwiseAbs().maxCoeff() + 1e-300;
    CHECK((g.colwise().sum().cwiseAbs().maxCoeff() / scale) < 1e-15);
    CHECK(g.allFinite());
    CHECK(r.left.gain >= 0);
    CHECK(r.left.loss >= 0);
    CHECK(r.right.gain >= 0);
    CHECK(r.right.loss >= 0);

    CHECK(tunneling_rate(x, Lead::Right, p) == tunneling_rate(-x, Lead::Left, p));
    const double gl = tunneling_rate(x, Lead::Left, p);
    CHECK(r.left.gain + r.left.loss == doctest::Approx(gl).epsilon(1e-14));

    // shifting eps0 and both chemical potentials by the same amount leaves every rate unchanged
    Params q = p;
    const double delta = shift(gen);
    q.eps0 += delta;
    q.mu_left += delta;
    q.mu_right += delta;
    const auto s = rate_matrix(x, q);
    CHECK(s.left.gain == doctest::Approx(r.left.gain).epsilon(1e-9));
    CHECK(s.right.loss == doctest::Approx(r.right.loss).epsilon(1e-9));
  }
}

TEST_CASE("model functions instantiate for long double") {
  const Params p;
  const long double g = tunneling_rate<long double>(-6.0L, Lead::Left, p);
  CHECK(static_cast<double>(g) == doctest::Approx(4.0342879349273515).epsilon(1e-13));
  const auto r = rate_matrix<long double>(1.0L, p);
  CHECK(std::abs(static_cast<double>(r.generator().colwise().sum().cwiseAbs().maxCoeff())) < 1e-18);
}
