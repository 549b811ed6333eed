#include "trafficipa/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trafficipa {

void ControllerConfig::validate() const {
  if (!std::isfinite(set_point) || set_point <= 0.0) {
    throw std::invalid_argument("set_point must be finite and > 0");
  }
  if (!std::isfinite(theta_min) || !std::isfinite(theta_max) || theta_min < 0.0 ||
      theta_min >= theta_max) {
    throw std::invalid_argument("theta_min/theta_max must satisfy 0 <= theta_min < theta_max");
  }
  if (!std::isfinite(derivative_floor) || derivative_floor <= 0.0) {
    throw std::invalid_argument("derivative_floor must be finite and > 0");
  }
}

double gain_error_at(const GainErrorModel& model, int n) {
  struct Visitor {
    int n;
    double operator()(const NoGainError&) const { return 0.0; }
    double operator()(const ConstantGainError& c) const { return c.epsilon; }
    double operator()(const GainErrorSequence& s) const {
      if (s.epsilons.empty()) return 0.0;
      const auto i = static_cast<std::size_t>(std::max(n - 1, 0)) % s.epsilons.size();
      return s.epsilons[i];
    }
  };
  return std::visit(Visitor{n}, model);
}

double gain(double g_prime, const ControllerConfig& cfg, int n) {
  if (!std::isfinite(g_prime)) throw std::invalid_argument("derivative estimate is not finite");
  const double d = g_prime * (1.0 + gain_error_at(cfg.gain_error, n));
  const double magnitude = std::max(std::abs(d), cfg.derivative_floor);
  return 1.0 / (d < 0.0 ? -magnitude : magnitude);
}

double step(ControllerState& state, double y, double g_prime, const ControllerConfig& cfg) {
  if (!std::isfinite(y)) throw std::invalid_argument("measured output is not finite");
  const int n = state.n + 1;
  const double a = gain(g_prime, cfg, n);
  const double e = cfg.set_point - y;
  const double u = std::clamp(state.u_prev + a * e, cfg.theta_min, cfg.theta_max);
  state.u_prev = u;
  state.e_prev = e;
  state.n = n;
  state.history.push_back({n, u, y, e, a});
  return u;
}

std::vector<CycleObservation> regulate(const Plant& plant, const ControllerConfig& cfg,
                                       int n_cycles, double u_initial) {
  cfg.validate();
  if (n_cycles < 1) throw std::invalid_argument("n_cycles must be >= 1");
  if (!(u_initial >= cfg.theta_min && u_initial <= cfg.theta_max)) {
    throw std::invalid_argument("initial input lies outside [theta_min, theta_max]");
  }
  ControllerState state;
  state.u_prev = u_initial;
  std::vector<CycleObservation> trajectory;
  trajectory.reserve(static_cast<std::size_t>(n_cycles));
  for (int n = 1; n <= n_cycles; ++n) {
    const double u = state.u_prev;
    const PlantResponse r = plant(u, n);
    step(state, r.y, r.g_prime, cfg);
    const auto& rec = state.history.back();
    trajectory.push_back({n, u, r.y, r.g_prime, rec.gain, rec.e});
  }
  return trajectory;
}

}  // namespace trafficipa
