#pragma once

#include <span>
#include <vector>

#include "trafficipa/hybrid_sim.hpp"

namespace trafficipa {

/// Central difference (L(theta + h) - L(theta - h)) / 2h with both sides
/// simulated on the same realization and the same x0.
double finite_difference(double theta, double h, const ArrivalRealization& arrival,
                         const ServiceConfig& svc, int light_cycles, double x0 = 0.0);

/// One-sided differences, for checking that they bracket the central one.
double forward_difference(double theta, double h, const ArrivalRealization& arrival,
                          const ServiceConfig& svc, int light_cycles, double x0 = 0.0);
double backward_difference(double theta, double h, const ArrivalRealization& arrival,
                           const ServiceConfig& svc, int light_cycles, double x0 = 0.0);

/// True when the event-kind sequences of the paths at theta - h and
/// theta + h differ, i.e. the perturbation reorders or creates events.
bool straddles_event(double theta, double h, const ArrivalRealization& arrival,
                     const ServiceConfig& svc, int light_cycles, double x0 = 0.0);

struct FdReport {
  std::vector<double> theta_grid;
  std::vector<double> L_values;
  std::vector<double> ipa_values;
  std::vector<double> fd_values;
  std::vector<double> abs_errors;
  std::vector<double> rel_errors;
  std::vector<bool> flagged;

  /// Largest relative error over unflagged points.
  double max_unflagged_rel_error() const;
};

/// IPA against central differences over a theta grid, x0 = 0.
FdReport compare_ipa_fd(std::span<const double> theta_grid, double h,
                        const ArrivalRealization& arrival, const ServiceConfig& svc,
                        int light_cycles);

struct PlantPoint {
  double theta = 0.0;
  double L = 0.0;
  double L_prime = 0.0;
};

/// L and its IPA derivative across a theta grid on one shared realization.
std::vector<PlantPoint> trace_plant_curve(const ArrivalRealization& arrival,
                                          const ServiceConfig& svc, int light_cycles,
                                          std::span<const double> theta_grid);

/// n evenly spaced points from a to b inclusive (n = 1 gives {a}).
std::vector<double> linear_grid(double a, double b, int n);

}  // namespace trafficipa
