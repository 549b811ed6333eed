#pragma once

#include <utility>
#include <vector>

#include "trafficipa/hybrid_sim.hpp"

namespace trafficipa {

/// A maximal interval (u_start, t_end) on which the buffer is positive,
/// with the one-sided service rates the sample derivative needs.
struct NonEmptyPeriodRecord {
  double u_start = 0.0;
  double beta_after_start = 0.0;  // beta(u_start+)
  /// (kC, beta(kC-)) for each green-to-red switch strictly inside the period.
  std::vector<std::pair<double, double>> green_to_red_betas;
  double t_end = 0.0;
};

struct IpaResult {
  double L_prime = 0.0;
  /// Integral of x' over each non-empty period, in path order.
  std::vector<double> per_period_contributions;
  /// theta sits on the edge of [0, C], outside the open interval the
  /// derivative formula is stated for.
  bool boundary = false;
  /// Sampled (t, x') on a uniform 1000-point grid; empty unless requested.
  std::vector<std::pair<double, double>> x_prime_trace;
};

std::vector<NonEmptyPeriodRecord> extract_periods(const SamplePath& path);

/// Sample derivative dx/dtheta at t inside a non-empty period:
///   sum of beta(kC-) over switches kC in (u, t)  +  beta(t)  -  beta(u+).
/// Throws std::domain_error if t is outside the period or beta jumps at t.
double x_prime_at(const NonEmptyPeriodRecord& record, const SamplePath& path, double t);

/// dL/dtheta along the path. Each period's integral of x' is evaluated in
/// closed form from the event log and segment betas; no time grid is used.
IpaResult ipa_derivative(const SamplePath& path, bool with_trace = false);

}  // namespace trafficipa
