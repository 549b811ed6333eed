#pragma once

// Test-only reference computations, independent of the event-driven
// integrator.

#include <algorithm>
#include <cmath>

#include "trafficipa/rate_processes.hpp"

namespace trafficipa::testing {

/// Fixed-step integration of the one-sided buffer equation with the
/// service rules applied directly each step. Accuracy is O(dt).
inline double brute_force_L(double theta, const ArrivalRealization& arrival,
                            const ServiceConfig& svc, int light_cycles, double x0, double dt) {
  const double c = svc.cycle_length;
  const double horizon = light_cycles * c;
  const long steps = std::lround(horizon / dt);
  double x = x0;
  double area = 0.0;
  long latched_cycle = -1;
  for (long i = 0; i < steps; ++i) {
    const double t = (i + 0.5) * dt;
    const long k = static_cast<long>(std::floor(t / c));
    const double tau = t - k * c;
    const double alpha = arrival_rate_at(arrival, t);
    double beta = 0.0;
    if (tau >= theta) {
      if (latched_cycle == k || x <= 0.0) {
        beta = svc.beta_max;
        latched_cycle = k;
      } else {
        beta = svc.ramp_value(tau - theta);
      }
    }
    const double next = std::max(0.0, x + (alpha - beta) * dt);
    if (next == 0.0 && tau >= theta) latched_cycle = k;
    area += 0.5 * (x + next) * dt;
    x = next;
  }
  return area / horizon;
}

/// Closed form for one light cycle with constant arrival 1 and an
/// instant jump to service 2: red accumulates theta, green drains at 1.
inline double triangle_L(double theta) {
  if (theta <= 0.5) return theta * theta;
  // Buffer does not empty before the cycle ends.
  return 0.5 * theta * theta + 0.5 * (theta + (2.0 * theta - 1.0)) * (1.0 - theta);
}

}  // namespace trafficipa::testing
