#pragma once

// Sampling of the coupled oscillator/dot process: underdamped Langevin motion
// of the pillar conditioned on the dot occupation, plus position-dependent
// tunneling jumps, with a per-trajectory heat and work ledger.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "shuttle/errors.hpp"
#include "shuttle/model.hpp"
#include "shuttle/params.hpp"

namespace shuttle {

struct ShuttleState {
  double x = 0;  // [nm]
  double v = 0;  // [nm/ns]
  int q = 0;
  double t = 0;  // [ns]
};

ShuttleState initial_state(const Params& p);

// Accumulated energy exchanges of one trajectory. Heats are counted positive
// when flowing into the dot/oscillator system; chemical work is positive for
// electrons moving with the bias.
struct ThermoLedger {
  double heat_left = 0;
  double heat_right = 0;
  double heat_osc = 0;
  double work_chem = 0;
  std::int64_t jumps_in_left = 0;
  std::int64_t jumps_out_left = 0;
  std::int64_t jumps_in_right = 0;
  std::int64_t jumps_out_right = 0;

  std::int64_t net_from_left() const { return jumps_in_left - jumps_out_left; }
  std::int64_t net_from_right() const { return jumps_in_right - jumps_out_right; }
  double total_heat() const { return heat_left + heat_right + heat_osc; }

  ThermoLedger& operator+=(const ThermoLedger& o);
};

// U_DO = H_O(x, v) + eps(x) q
double system_energy(const ShuttleState& s, const Params& p);

// Delta U_DO - sum_nu Q_nu - W_chem between two states linked by a ledger.
double first_law_residual(const ShuttleState& from, const ShuttleState& to,
                          const ThermoLedger& ledger, const Params& p);

// Oscillation amplitude about the origin, sqrt(x^2 + (v/omega)^2).
inline double amplitude(const ShuttleState& s, const Params& p) {
  const double u = s.v / p.omega;
  return std::sqrt(s.x * s.x + u * u);
}

// Raised by the trajectory drivers; carries the seed that reproduces the fault.
class TrajectoryFault : public std::runtime_error {
 public:
  TrajectoryFault(const std::string& what, std::uint64_t seed)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Independent random stream per trajectory. Seeds are derived from
// (master seed, trajectory index) so any execution order reproduces them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

  double normal() { return normal_(engine_); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Largest admissible probability of a jump within one step.
inline constexpr double kMaxJumpProbability = 0.1;

class LangevinJumpKernel {
 public:
  explicit LangevinJumpKernel(const Params& p);

  // One step of length dt: velocity update with midpoint friction, drift of x
  // with the new velocity, then at most one tunneling event at the new position.
  void advance(ShuttleState& s, ThermoLedger& ledger, RandomStream& rng) const {
    const double xi = rng.normal();
    const double kick = noise_impulse_ * xi;
    const double drive = (-spring_ * s.x + force_ * s.q) * dt_;
    const double v_new = (s.v * (1.0 - half_damping_) + (drive + kick) * inv_mass_) /
                         (1.0 + half_damping_);
    const double v_mid = 0.5 * (s.v + v_new);
    ledger.heat_osc += (-gamma_ * v_mid * dt_ + kick) * v_mid;
    s.v = v_new;
    s.x += v_new * dt_;
    s.t += dt_;
    if (!std::isfinite(s.x) || !std::isfinite(s.v)) fail_non_finite(s);

    const double e = std::exp(-s.x * inv_lambda_);
    const double rate_left = gamma0_ * e;
    const double rate_right = gamma0_ / e;
    const double eps = eps0_ - field_ * s.x;
    const double z_left = beta_ * (eps - mu_left_);
    const double z_right = beta_ * (eps - mu_right_);
    // filling uses f(z), emptying 1 - f(z) = f(-z)
    const double sign = s.q == 0 ? 1.0 : -1.0;
    const double p_left = rate_left * detail::logistic(sign * z_left) * dt_;
    const double p_right = rate_right * detail::logistic(sign * z_right) * dt_;
    if (!(p_left + p_right < kMaxJumpProbability)) fail_step_size(s, p_left + p_right);

    const double u = rng.uniform();
    if (u < p_left) {
      jump(s, ledger, eps, mu_left_, ledger.jumps_in_left, ledger.jumps_out_left, ledger.heat_left);
    } else if (u < p_left + p_right) {
      jump(s, ledger, eps, mu_right_, ledger.jumps_in_right, ledger.jumps_out_right,
           ledger.heat_right);
    }
  }

 private:
  static void jump(ShuttleState& s, ThermoLedger& ledger, double eps, double mu,
                   std::int64_t& in, std::int64_t& out, double& heat) {
    if (s.q == 0) {
      heat += eps - mu;
      ledger.work_chem += mu;
      ++in;
      s.q = 1;
    } else {
      heat -= eps - mu;
      ledger.work_chem -= mu;
      ++out;
      s.q = 0;
    }
  }

  [[noreturn]] void fail_step_size(const ShuttleState& s, double probability) const;
  [[noreturn]] static void fail_non_finite(const ShuttleState& s);

  double dt_;
  double spring_;
  double inv_mass_;
  double gamma_;
  double half_damping_;
  double noise_impulse_;
  double force_;
  double gamma0_;
  double inv_lambda_;
  double eps0_;
  double field_;
  double beta_;
  double mu_left_;
  double mu_right_;
};

struct StepResult {
  ShuttleState state;
  ThermoLedger increment;
};

// Single step from an arbitrary state; the drivers below reuse one kernel instead.
StepResult step(const ShuttleState& state, const Params& p, RandomStream& rng);

// Runs one trajectory from the initial condition in p. observe(i, state, ledger)
// is called on every point of the output grid, i = 0 .. sample_count()-1.
template <class Observer>
ThermoLedger run_trajectory(const Params& p, std::uint64_t seed, Observer&& observe) {
  const LangevinJumpKernel kernel(p);
  RandomStream rng(seed);
  ShuttleState s = initial_state(p);
  ThermoLedger ledger;
  const std::size_t stride = p.sample_stride();
  const std::size_t n = p.sample_count();
  observe(std::size_t{0}, s, ledger);
  try {
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < stride; ++j) kernel.advance(s, ledger, rng);
      s.t = static_cast<double>(i * stride) * p.dt;
      observe(i, s, ledger);
    }
  } catch (const std::runtime_error& e) {
    throw TrajectoryFault(std::string(e.what()) + " (seed " + std::to_string(seed) + ")", seed);
  }
  return ledger;
}

struct Trajectory {
  std::vector<ShuttleState> samples;
  std::vector<ThermoLedger> ledgers;  // cumulative, aligned with samples

  const ThermoLedger& ledger() const { return ledgers.back(); }
  double first_law_residual(const Params& p) const {
    return shuttle::first_law_residual(samples.front(), samples.back(), ledgers.back(), p);
  }
};

Trajectory simulate_trajectory(const Params& p, std::uint64_t seed);

}  // namespace shuttle
