#pragma once

#include <functional>
#include <variant>
#include <vector>

namespace trafficipa {

/// Exact derivative in the gain.
struct NoGainError {};

/// Derivative reported as g' (1 + epsilon) on every cycle.
struct ConstantGainError {
  double epsilon = 0.0;
};

/// Derivative reported as g' (1 + epsilon_n), cycling through the list.
struct GainErrorSequence {
  std::vector<double> epsilons;
};

using GainErrorModel = std::variant<NoGainError, ConstantGainError, GainErrorSequence>;

struct ControllerConfig {
  double set_point = 0.3;
  double theta_min = 0.1;
  double theta_max = 0.9;
  double derivative_floor = 1e-3;
  GainErrorModel gain_error = NoGainError{};

  void validate() const;
};

/// Relative derivative error applied on cycle n (1-based).
double gain_error_at(const GainErrorModel& model, int n);

/// A = 1 / (sign(d) * max(|d|, floor)) where d is the derivative after any
/// configured error injection; sign(0) counts as positive.
double gain(double g_prime, const ControllerConfig& cfg, int n);

struct ControllerRecord {
  int n = 0;
  double u = 0.0;  // input chosen after this step
  double y = 0.0;
  double e = 0.0;
  double gain = 0.0;
};

struct ControllerState {
  double u_prev = 0.0;
  double e_prev = 0.0;
  int n = 0;
  std::vector<ControllerRecord> history;
};

/// Feeds the measurement (y, g') taken at state.u_prev and moves to
///   u = clamp(u_prev + A (r - y), theta_min, theta_max).
/// Returns the new input; throws std::invalid_argument on non-finite data.
double step(ControllerState& state, double y, double g_prime, const ControllerConfig& cfg);

/// What the plant reports for one control cycle at a given input.
struct PlantResponse {
  double y = 0.0;
  double g_prime = 0.0;
};

/// Per-cycle measurement of a closed-loop run.
struct CycleObservation {
  int n = 0;
  double theta = 0.0;   // input applied during cycle n
  double L = 0.0;       // measured output y_n
  double L_prime = 0.0; // derivative estimate at theta_n
  double gain = 0.0;    // gain computed from this cycle, used for theta_{n+1}
  double error = 0.0;   // r - y_n
};

/// plant(u, n) runs control cycle n at input u.
using Plant = std::function<PlantResponse(double u, int n)>;

/// Runs n_cycles of the loop starting at u_initial. Cycle 1 is open-loop at
/// u_initial and seeds the first error.
std::vector<CycleObservation> regulate(const Plant& plant, const ControllerConfig& cfg,
                                       int n_cycles, double u_initial);

}  // namespace trafficipa
