#include "trafficipa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trafficipa/ipa.hpp"

namespace trafficipa {

namespace {

double L_at(double theta, const ArrivalRealization& arrival, const ServiceConfig& svc,
            int light_cycles, double x0) {
  return performance(simulate_control_cycle(theta, arrival, svc, light_cycles, x0));
}

void check_window(double theta, double h, const ServiceConfig& svc, bool left, bool right) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  if ((left && theta - h < 0.0) || (right && theta + h > svc.cycle_length)) {
    throw std::invalid_argument("finite-difference stencil leaves [0, C]");
  }
}

std::vector<EventKind> kinds(const SamplePath& path) {
  std::vector<EventKind> out;
  out.reserve(path.events.size());
  for (const auto& e : path.events) out.push_back(e.kind);
  return out;
}

}  // namespace

double finite_difference(double theta, double h, const ArrivalRealization& arrival,
                         const ServiceConfig& svc, int light_cycles, double x0) {
  check_window(theta, h, svc, true, true);
  return (L_at(theta + h, arrival, svc, light_cycles, x0) -
          L_at(theta - h, arrival, svc, light_cycles, x0)) /
         (2.0 * h);
}

double forward_difference(double theta, double h, const ArrivalRealization& arrival,
                          const ServiceConfig& svc, int light_cycles, double x0) {
  check_window(theta, h, svc, false, true);
  return (L_at(theta + h, arrival, svc, light_cycles, x0) -
          L_at(theta, arrival, svc, light_cycles, x0)) /
         h;
}

double backward_difference(double theta, double h, const ArrivalRealization& arrival,
                           const ServiceConfig& svc, int light_cycles, double x0) {
  check_window(theta, h, svc, true, false);
  return (L_at(theta, arrival, svc, light_cycles, x0) -
          L_at(theta - h, arrival, svc, light_cycles, x0)) /
         h;
}

bool straddles_event(double theta, double h, const ArrivalRealization& arrival,
                     const ServiceConfig& svc, int light_cycles, double x0) {
  const auto lo = simulate_control_cycle(theta - h, arrival, svc, light_cycles, x0);
  const auto hi = simulate_control_cycle(theta + h, arrival, svc, light_cycles, x0);
  return kinds(lo) != kinds(hi);
}

double FdReport::max_unflagged_rel_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rel_errors.size(); ++i) {
    if (!flagged[i]) worst = std::max(worst, rel_errors[i]);
  }
  return worst;
}

FdReport compare_ipa_fd(std::span<const double> theta_grid, double h,
                        const ArrivalRealization& arrival, const ServiceConfig& svc,
                        int light_cycles) {
  FdReport report;
  for (const double theta : theta_grid) {
    const auto path = simulate_control_cycle(theta, arrival, svc, light_cycles, 0.0);
    const double ipa = ipa_derivative(path).L_prime;
    const double fd = finite_difference(theta, h, arrival, svc, light_cycles);
    const double abs_err = std::abs(ipa - fd);
    report.theta_grid.push_back(theta);
    report.L_values.push_back(performance(path));
    report.ipa_values.push_back(ipa);
    report.fd_values.push_back(fd);
    report.abs_errors.push_back(abs_err);
    report.rel_errors.push_back(abs_err / std::max(std::abs(fd), 1e-12));
    report.flagged.push_back(straddles_event(theta, h, arrival, svc, light_cycles));
  }
  return report;
}

std::vector<PlantPoint> trace_plant_curve(const ArrivalRealization& arrival,
                                          const ServiceConfig& svc, int light_cycles,
                                          std::span<const double> theta_grid) {
  std::vector<PlantPoint> curve;
  curve.reserve(theta_grid.size());
  for (const double theta : theta_grid) {
    const auto path = simulate_control_cycle(theta, arrival, svc, light_cycles, 0.0);
    curve.push_back({theta, performance(path), ipa_derivative(path).L_prime});
  }
  return curve;
}

std::vector<double> linear_grid(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  }
  return grid;
}

}  // namespace trafficipa
