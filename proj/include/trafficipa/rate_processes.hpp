#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trafficipa {

/// On/off arrival law. Off periods carry zero rate; each on period draws a
/// constant rate uniformly from [(1 - spread) * mean, (1 + spread) * mean].
/// Off and on durations are uniform on [0, off_max] and [0, on_max].
struct ArrivalConfig {
  double mean_rate = 4.1;
  double relative_spread = 0.3;
  double off_max = 0.02;
  double on_max = 0.063;

  void validate() const;
};

struct ArrivalSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double rate = 0.0;

  friend bool operator==(const ArrivalSegment&, const ArrivalSegment&) = default;
};

/// Piecewise-constant arrival-rate trajectory on [0, horizon].
class ArrivalRealization {
 public:
  /// Throws std::invalid_argument unless the segments partition [0, T]
  /// contiguously with finite, non-negative rates.
  explicit ArrivalRealization(std::vector<ArrivalSegment> segments);

  double horizon() const { return segments_.back().t_end; }
  std::span<const ArrivalSegment> segments() const { return segments_; }

  /// Index of the segment holding t, using the right-limit convention at
  /// interior boundaries; t == horizon maps to the last segment.
  std::size_t index_at(double t) const;

  friend bool operator==(const ArrivalRealization&, const ArrivalRealization&) = default;

 private:
  std::vector<ArrivalSegment> segments_;
};

/// Alternates off, on, off, ... starting with an off period at t = 0 and
/// truncates the last period at the horizon. Zero-length draws are omitted
/// from the segment list. Same (cfg, horizon, seed) gives identical output.
ArrivalRealization generate_arrival(const ArrivalConfig& cfg, double horizon, std::uint64_t seed);

/// Right-limit of the arrival rate at t; throws std::out_of_range outside [0, T].
double arrival_rate_at(const ArrivalRealization& arrival, double t);

/// Service model of a two-phase signal. Each light cycle of length
/// cycle_length starts with red; in green the rate follows the ramp
/// b(s) = min(ramp_rate * s, beta_max) while the buffer is positive and is
/// beta_max once the buffer is empty. ramp_rate = +inf means the rate jumps
/// straight to beta_max at the start of green.
///
/// The ramp is the only place b(.) enters the model (ramp_value); a random
/// ramp would replace that function with a per-cycle draw.
struct ServiceConfig {
  double beta_max = 5.0;
  double ramp_rate = 0.62;
  double cycle_length = 1.0;

  void validate() const;
  bool instant_jump() const { return std::isinf(ramp_rate); }

  /// b(s) for s >= 0 time units into green.
  double ramp_value(double since_green) const;

  /// Time from the start of green until the ramp reaches beta_max; +inf when
  /// it never does, 0 for an instant jump.
  double saturation_delay() const;
};

/// Point evaluation of the service rate. buffer_positive selects between the
/// ramp and the empty-buffer branch during green.
double service_rate(const ServiceConfig& svc, double theta, double t, bool buffer_positive);

}  // namespace trafficipa
