#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "trafficipa/rate_processes.hpp"

namespace trafficipa {

/// Times closer than this are processed as one instant.
inline constexpr double kEventTimeTolerance = 1e-12;

enum class EventKind {
  RedStart,
  GreenStart,
  BufferEmpty,
  BufferNonEmptyStart,
  RampSaturation,
  ArrivalChange,
  Horizon,
};

std::string_view to_string(EventKind kind);

struct PathEvent {
  double time = 0.0;
  EventKind kind = EventKind::Horizon;
  double beta_left = 0.0;
  double beta_right = 0.0;
  double x_at = 0.0;
};

/// One stretch with constant arrival rate and linear service rate:
///   x(t) = x_start + (alpha - beta_start) s - beta_slope s^2 / 2,  s = t - t_start.
/// x_end is the value handed to the next segment.
struct PathSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double x_start = 0.0;
  double x_end = 0.0;
  double alpha = 0.0;
  double beta_start = 0.0;
  double beta_slope = 0.0;
  bool empty = false;  // buffer held at zero; alpha <= beta throughout

  double length() const { return t_end - t_start; }
  double x_at(double t) const;
  double beta_at(double t) const { return beta_start + beta_slope * (t - t_start); }
  double beta_end() const { return beta_at(t_end); }
  /// Exact integral of x over the segment.
  double x_integral() const;
  /// Exact integral of beta over the segment.
  double beta_integral() const;
  /// Exact integral of alpha - beta over the segment.
  double net_integral() const;
};

struct SamplePath {
  double theta = 0.0;
  double horizon = 0.0;
  double cycle_length = 0.0;
  std::vector<PathSegment> segments;
  std::vector<PathEvent> events;
  double x_final = 0.0;
};

/// Integrates the buffer over [0, light_cycles * C] at red duration theta.
/// Events sharing one instant are ordered BufferEmpty, light switch,
/// ArrivalChange, RampSaturation, then BufferNonEmptyStart and Horizon.
/// Once the buffer empties during green, service stays at beta_max until
/// the next red.
SamplePath simulate_control_cycle(double theta, const ArrivalRealization& arrival,
                                  const ServiceConfig& svc, int light_cycles, double x0);

/// Time average of x over the path.
double performance(const SamplePath& path);

/// Smallest t in (t_start, t_end] with x(t) = 0, if any.
std::optional<double> solve_empty_hit(const PathSegment& segment);

/// Left and right limits of the service rate at t, read from the path.
double beta_left_at(const SamplePath& path, double t);
double beta_right_at(const SamplePath& path, double t);

/// Structural checks over a finished path.
struct PathDiagnostics {
  bool partition_ok = true;
  double max_continuity_gap = 0.0;
  double min_x = 0.0;
  double max_formula_gap = 0.0;        // |x_end - x_at(t_end)| per segment
  double max_mass_balance_error = 0.0; // per non-empty period
  bool event_invariants_ok = true;
};

PathDiagnostics diagnose(const SamplePath& path);

}  // namespace trafficipa
