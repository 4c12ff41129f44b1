#include "shuttle/trajectory.hpp"

#include <sstream>

namespace shuttle {

ShuttleState initial_state(const Params& p) { return {p.x0, p.v0, p.q0, 0.0}; }

ThermoLedger& ThermoLedger::operator+=(const ThermoLedger& o) {
  heat_left += o.heat_left;
  heat_right += o.heat_right;
  heat_osc += o.heat_osc;
  work_chem += o.work_chem;
  jumps_in_left += o.jumps_in_left;
  jumps_out_left += o.jumps_out_left;
  jumps_in_right += o.jumps_in_right;
  jumps_out_right += o.jumps_out_right;
  return *this;
}

double system_energy(const ShuttleState& s, const Params& p) {
  return oscillator_energy(s.x, s.v, p) + charging_energy(s.x, p) * s.q;
}

double first_law_residual(const ShuttleState& from, const ShuttleState& to,
                          const ThermoLedger& ledger, const Params& p) {
  return system_energy(to, p) - system_energy(from, p) - ledger.total_heat() - ledger.work_chem;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x5348u};
  engine_.seed(seq);
}

std::uint64_t RandomStream::trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

LangevinJumpKernel::LangevinJumpKernel(const Params& p)
    : dt_(p.dt),
      spring_(p.spring()),
      inv_mass_(1.0 / p.mass),
      gamma_(p.gamma),
      half_damping_(0.5 * p.gamma * p.dt / p.mass),
      noise_impulse_(std::sqrt(2.0 * p.gamma * p.kT() * p.dt)),
      force_(electrostatic_force(1, p)),
      gamma0_(p.gamma0),
      inv_lambda_(1.0 / p.lambda_tun),
      eps0_(p.eps0),
      field_(p.alpha * p.voltage),
      beta_(p.beta()),
      mu_left_(p.mu_left),
      mu_right_(p.mu_right) {}

void LangevinJumpKernel::fail_step_size(const ShuttleState& s, double probability) const {
  std::ostringstream msg;
  msg << "jump probability per step " << probability << " at x = " << s.x << " nm, t = " << s.t
      << " ns exceeds " << kMaxJumpProbability << "; reduce dt (currently " << dt_ << " ns)";
  throw StepSizeError(msg.str());
}

void LangevinJumpKernel::fail_non_finite(const ShuttleState& s) {
  std::ostringstream msg;
  msg << "non-finite oscillator state at t = " << s.t << " ns";
  throw NonFiniteStateError(msg.str());
}

StepResult step(const ShuttleState& state, const Params& p, RandomStream& rng) {
  StepResult r{state, {}};
  LangevinJumpKernel(p).advance(r.state, r.increment, rng);
  return r;
}

Trajectory simulate_trajectory(const Params& p, std::uint64_t seed) {
  require_valid(p);
  Trajectory traj;
  const std::size_t n = p.sample_count();
  traj.samples.reserve(n);
  traj.ledgers.reserve(n);
  run_trajectory(p, seed, [&](std::size_t, const ShuttleState& s, const ThermoLedger& l) {
    traj.samples.push_back(s);
    traj.ledgers.push_back(l);
  });
  return traj;
}

}  // namespace shuttle
