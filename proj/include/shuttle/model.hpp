#pragma once

// Physical model of the shuttle: Fermi factors, tunneling rates, charging
// energy, electrostatic force and the two-state rate matrices of both leads.
// Everything is a pure function of the position and the parameter set.

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "shuttle/params.hpp"

namespace shuttle {

enum class Lead { Left, Right };

template <typename Scalar>
using Generator = Eigen::Matrix<Scalar, 2, 2>;

namespace detail {

// 1/(e^z + 1) without overflow for large |z|.
template <typename Scalar>
inline Scalar logistic(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) {
    const Scalar e = exp(-z);
    return e / (Scalar(1) + e);
  }
  return Scalar(1) / (Scalar(1) + exp(z));
}

}  // namespace detail

template <typename Scalar>
Scalar fermi(Scalar energy, Scalar mu, Scalar beta) {
  using std::isfinite;
  if (!isfinite(energy) || !isfinite(mu) || !isfinite(beta))
    throw std::domain_error("fermi: non-finite argument");
  if (!(beta > Scalar(0))) throw std::domain_error("fermi: beta must be positive");
  return detail::logistic(beta * (energy - mu));
}

template <typename Scalar>
Scalar tunneling_rate(Scalar x, Lead lead, const Params& p) {
  using std::exp;
  if (!std::isfinite(x)) throw std::domain_error("tunneling_rate: non-finite position");
  // Gamma_R(x) = Gamma_L(-x)
  const Scalar xl = lead == Lead::Left ? x : -x;
  return Scalar(p.gamma0) * exp(-xl / Scalar(p.lambda_tun));
}

template <typename Scalar>
Scalar charging_energy(Scalar x, const Params& p) {
  return Scalar(p.eps0) - Scalar(p.alpha * p.voltage) * x;
}

// Force on the pillar exerted by the charge on the dot [eV/nm].
template <typename Scalar = double>
Scalar electrostatic_force(int q, const Params& p) {
  if (q != 0 && q != 1) throw std::invalid_argument("electrostatic_force: occupation must be 0 or 1");
  return Scalar(p.alpha * p.voltage * q);
}

template <typename Scalar>
struct LeadRates {
  Scalar gain{};  // empty -> filled, r_10
  Scalar loss{};  // filled -> empty, r_01

  // Column-stochastic generator over the states (0, 1).
  Generator<Scalar> generator() const {
    Generator<Scalar> r;
    r << -gain, loss,
          gain, -loss;
    return r;
  }
};

template <typename Scalar>
struct RateMatrix {
  LeadRates<Scalar> left;
  LeadRates<Scalar> right;

  const LeadRates<Scalar>& lead(Lead l) const { return l == Lead::Left ? left : right; }
  Generator<Scalar> generator(Lead l) const { return lead(l).generator(); }
  Generator<Scalar> generator() const { return left.generator() + right.generator(); }
  // Total escape rate out of occupation q.
  Scalar escape_rate(int q) const {
    return q == 0 ? left.gain + right.gain : left.loss + right.loss;
  }
};

template <typename Scalar>
LeadRates<Scalar> lead_rates(Scalar x, Lead lead, const Params& p) {
  const Scalar g = tunneling_rate(x, lead, p);
  const Scalar mu = Scalar(lead == Lead::Left ? p.mu_left : p.mu_right);
  const Scalar z = Scalar(p.beta()) * (charging_energy(x, p) - mu);
  // 1 - f(z) = f(-z) keeps the loss rate accurate when f is close to 1.
  return {g * detail::logistic(z), g * detail::logistic(-z)};
}

template <typename Scalar>
RateMatrix<Scalar> rate_matrix(Scalar x, const Params& p) {
  if (!std::isfinite(x)) throw std::domain_error("rate_matrix: non-finite position");
  return {lead_rates(x, Lead::Left, p), lead_rates(x, Lead::Right, p)};
}

// Oscillator Hamiltonian H_O = m v^2/2 + k x^2/2.
template <typename Scalar>
Scalar oscillator_energy(Scalar x, Scalar v, const Params& p) {
  return Scalar(0.5 * p.mass) * v * v + Scalar(0.5 * p.spring()) * x * x;
}

}  // namespace shuttle
