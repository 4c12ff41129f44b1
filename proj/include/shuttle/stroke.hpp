#pragma once

// Four-stroke description of the driven dot: tunneling windows around the
// turning points, frozen (isentropic) windows around the zero crossings.

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shuttle/params.hpp"
#include "shuttle/reduced.hpp"

namespace shuttle {

// Exact rational, always reduced with den > 0.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;  // "5/24", "0", "1"
  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b);
  friend Fraction operator+(const Fraction& a, const Fraction& b);
  friend Fraction operator-(const Fraction& a, const Fraction& b);
};

enum class StrokeKind { LeftDissipative, Isentropic, RightDissipative };
const char* to_string(StrokeKind kind);

struct StrokeInterval {
  char label = 'a';  // a..d in cycle order starting from the left turning point
  StrokeKind kind = StrokeKind::Isentropic;
  Fraction begin, end;  // fractions of the cycle period
  Fraction length() const { return end - begin; }
};

struct StrokeIntegral {
  double numeric = 0;  // integral of Gamma_L + Gamma_R over the centered window
  double bound = 0;    // tau Gamma0 exp[(|x0|/lambda) sin(omega tau / 2)]
};

// 0 < tau_isen < cycle period / 2, otherwise std::invalid_argument.
StrokeIntegral stroke_integral(double tau_isen, const Params& p);

struct StrokeSchedule {
  std::vector<StrokeInterval> intervals;  // time ordered, partition [0, 1)
  double tau_cycle = 0;                   // [ns]
  double tau_isen = 0;                    // [ns]
  std::int64_t resolution = 24;
  std::int64_t half_width = 1;            // isentropic half width in units of 1/resolution
  double contrast = 0;                    // e^{|x0|/lambda}
  StrokeIntegral integral;                // at tau_isen; NaN when tau_isen = tau_cycle / 2

  StrokeKind kind_at(double phase) const;  // phase in [0, 1)
};

struct ScheduleOptions {
  double threshold = 0.1;
  std::int64_t resolution = 24;  // must be a multiple of 4
  double min_contrast = 10;      // operational reading of e^{|x0|/lambda} >> 1
  bool continuous = false;       // use a fine resolution instead of 24ths
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schedule with isentropic windows [R/4 - w, R/4 + w) and [3R/4 - w, 3R/4 + w)
// in units of 1/R; 0 <= w <= R/4. Left and right swap when x0 > 0.
StrokeSchedule make_schedule(const Params& p, std::int64_t half_width, std::int64_t resolution = 24);

StrokeSchedule build_schedule(const Params& p, const ScheduleOptions& options = {});

// Checks the partition and reflection invariants; returns violations.
std::vector<std::string> check_schedule(const StrokeSchedule& s);

struct CycleTrace {
  Eigen::ArrayXd time;  // [ns], absolute
  Eigen::ArrayXd occupation;
  Eigen::ArrayXd energy;
  Eigen::ArrayXd work_mech;  // cumulative from t_start
  Eigen::ArrayXd heat_left;
  Eigen::ArrayXd heat_right;
  Eigen::ArrayXd work_chem;
  Eigen::ArrayXd dot_entropy;
  std::vector<Eigen::Index> piece_begin;  // per interval, plus one past the end

  Eigen::Index size() const { return time.size(); }
};

// One period starting at t_start (a multiple of the period keeps the phase
// of the schedule aligned with x_t). Steps per interval are proportional to
// its length; isentropic intervals leave P unchanged exactly.
CycleTrace cycle_propagate(const Params& p, const StrokeSchedule& schedule,
                           const Eigen::Vector2d& initial, double t_start = 0.0,
                           int steps_per_cycle = 4096);

// Repeats cycle_propagate from P = (1 - q0, q0) until the start of
// consecutive cycles agrees within tolerance; returns the last cycle.
CycleTrace periodic_cycle(const Params& p, const StrokeSchedule& schedule,
                          int steps_per_cycle = 4096, double tolerance = 1e-10,
                          int max_cycles = 200);

struct StrokeReport {
  char label = 'a';
  StrokeKind kind = StrokeKind::Isentropic;
  Fraction length;
  double duration = 0;  // [ns]
  double dot_energy_change = 0;
  double work_mech = 0;
  double heat_left = 0;
  double heat_right = 0;
  double work_chem = 0;
  double dot_entropy_change = 0;
  double first_law_residual = 0;  // dU_D - (Q + W_chem + W_mech)
  double entropy_production = 0;  // dS_D - (Q_L + Q_R)/kT [k_B]
};

// One row per label a..d; pieces sharing a label are summed.
std::vector<StrokeReport> stroke_thermo(const CycleTrace& trace, const StrokeSchedule& schedule,
                                        const Params& p);

struct StrokeComparison {
  double sup_occupation = 0;     // max_t |P_1 - [P_1]_cycle|
  double heat_left_cycle = 0;    // sum over strokes
  double heat_left_reduced = 0;  // same period of the reduced solution
  double heat_right_cycle = 0;
  double heat_right_reduced = 0;
  double work_mech_cycle = 0;
  double work_mech_reduced = 0;
  double heat_left_relative() const;
  double heat_right_relative() const;
};

// Compares a stroke-wise cycle with the reduced trace over the cycle
// starting at trace time `cycle * period`.
StrokeComparison compare_cycle(const ReducedTrace& reduced, std::size_t cycle,
                               const CycleTrace& strokes, const StrokeSchedule& schedule);

}  // namespace shuttle
