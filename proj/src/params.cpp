#include "shuttle/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shuttle {

std::size_t Params::sample_stride() const {
  return static_cast<std::size_t>(std::llround(sample_interval / dt));
}

std::size_t Params::sample_count() const {
  return static_cast<std::size_t>(std::llround(t_final / sample_interval)) + 1;
}

std::vector<std::string> check_invariants(const Params& p) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, const char* what) {
    if (!ok) errors.emplace_back(what);
  };
  const double fields[] = {p.omega, p.mass,  p.gamma, p.temperature, p.alpha,
                           p.voltage, p.eps0, p.mu_left, p.mu_right, p.gamma0,
                           p.lambda_tun, p.x0, p.v0, p.dt, p.t_final, p.sample_interval};
  for (double f : fields) {
    if (!std::isfinite(f)) {
      errors.emplace_back("all parameters must be finite");
      return errors;
    }
  }
  require(p.mass > 0, "mass must be > 0");
  require(p.omega > 0, "omega must be > 0");
  require(p.gamma >= 0, "gamma must be >= 0");
  require(p.gamma0 >= 0, "gamma0 must be >= 0");
  require(p.lambda_tun > 0, "lambda must be > 0");
  require(p.temperature > 0, "temperature must be > 0");
  require(p.dt > 0, "dt must be > 0");
  require(p.t_final > 0, "t_final must be > 0");
  require(p.n_traj >= 1, "n_traj must be >= 1");
  require(p.q0 == 0 || p.q0 == 1, "q0 must be 0 or 1");
  const double scale = std::max({1.0, std::abs(p.mu_left), std::abs(p.mu_right)});
  require(std::abs((p.mu_left - p.mu_right) - p.voltage) <= 1e-12 * scale,
          "mu_left - mu_right must equal e*V");
  if (p.dt > 0 && p.sample_interval > 0) {
    const double ratio = p.sample_interval / p.dt;
    require(ratio >= 1 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-6 * ratio,
            "sample_interval must be an integer multiple of dt");
    const double n = p.t_final / p.sample_interval;
    require(std::abs(n - std::round(n)) <= 1e-6 * std::max(1.0, n),
            "t_final must be an integer multiple of sample_interval");
  } else {
    require(p.sample_interval > 0, "sample_interval must be > 0");
  }
  return errors;
}

void require_valid(const Params& p) {
  const auto errors = check_invariants(p);
  if (errors.empty()) return;
  std::ostringstream msg;
  msg << "invalid parameters:";
  for (const auto& e : errors) msg << "\n  - " << e;
  throw std::invalid_argument(msg.str());
}

}  // namespace shuttle
