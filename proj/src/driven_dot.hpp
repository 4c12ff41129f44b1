#pragma once

// Right-hand side of the driven dot master equation together with the
// running work/heat integrals; shared by the reduced solver and the
// stroke-wise propagator.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "shuttle/errors.hpp"
#include "shuttle/model.hpp"

namespace shuttle::detail {

struct Flow {
  Eigen::Vector2d prob = Eigen::Vector2d::Zero();
  double work_mech = 0;
  double heat_left = 0;
  double heat_right = 0;
  double work_chem = 0;

  Flow& axpy(double a, const Flow& d) {
    prob += a * d.prob;
    work_mech += a * d.work_mech;
    heat_left += a * d.heat_left;
    heat_right += a * d.heat_right;
    work_chem += a * d.work_chem;
    return *this;
  }
};

class DrivenDot {
 public:
  DrivenDot(const Params& p, double max_rate_step, double step, bool left = true,
            bool right = true)
      : p_(p), max_rate_step_(max_rate_step), step_(step), left_(left), right_(right) {}

  double position(double t) const { return p_.x0 * std::cos(p_.omega * t); }
  double velocity(double t) const { return -p_.x0 * p_.omega * std::sin(p_.omega * t); }

  Flow rhs(double t, const Eigen::Vector2d& prob) const {
    const double x = position(t);
    Flow d;
    d.work_mech = prob[1] * (-p_.alpha * p_.voltage * velocity(t));
    if (!left_ && !right_) return d;

    const auto rates = rate_matrix(x, p_);
    double worst = 0;
    for (int q = 0; q < 2; ++q) {
      const double r = (left_ ? (q ? rates.left.loss : rates.left.gain) : 0.0) +
                       (right_ ? (q ? rates.right.loss : rates.right.gain) : 0.0);
      worst = std::max(worst, r);
    }
    if (!(worst * step_ <= max_rate_step_)) {
      std::ostringstream msg;
      msg << "master equation: rate * step = " << worst * step_ << " at t = " << t
          << " ns exceeds " << max_rate_step_ << "; increase steps_per_cycle";
      throw StepSizeError(msg.str());
    }
    const double eps = charging_energy(x, p_);
    if (left_) {
      const Eigen::Vector2d dl = rates.generator(Lead::Left) * prob;
      // particle current into the dot, I = sum_q q (R P)_q
      d.prob += dl;
      d.heat_left = (eps - p_.mu_left) * dl[1];
      d.work_chem += p_.mu_left * dl[1];
    }
    if (right_) {
      const Eigen::Vector2d dr = rates.generator(Lead::Right) * prob;
      d.prob += dr;
      d.heat_right = (eps - p_.mu_right) * dr[1];
      d.work_chem += p_.mu_right * dr[1];
    }
    return d;
  }

  // Classical RK4 step from (t, y) given k1 = rhs(t, y.prob).
  Flow rk4(double t, const Flow& y, const Flow& k1, double h) const {
    Flow tmp = y;
    const Flow k2 = rhs(t + 0.5 * h, tmp.axpy(0.5 * h, k1).prob);
    tmp = y;
    const Flow k3 = rhs(t + 0.5 * h, tmp.axpy(0.5 * h, k2).prob);
    tmp = y;
    const Flow k4 = rhs(t + h, tmp.axpy(h, k3).prob);
    Flow out = y;
    out.axpy(h / 6, k1).axpy(h / 3, k2).axpy(h / 3, k3).axpy(h / 6, k4);
    return out;
  }

 private:
  const Params& p_;
  double max_rate_step_;
  double step_;
  bool left_;
  bool right_;
};

inline double dot_entropy(const Eigen::Vector2d& prob) {
  double s = 0;
  for (int q = 0; q < 2; ++q)
    if (prob[q] > 0) s -= prob[q] * std::log(prob[q]);
  return s;
}

}  // namespace shuttle::detail
