#include "trafficipa/rate_processes.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "trafficipa/seeding.hpp"

namespace trafficipa {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ArrivalConfig::validate() const {
  require(std::isfinite(mean_rate) && mean_rate > 0.0, "alpha_mean must be finite and > 0");
  require(std::isfinite(relative_spread) && relative_spread >= 0.0 && relative_spread < 1.0,
          "zeta must lie in [0, 1)");
  require(std::isfinite(off_max) && off_max >= 0.0, "off_max must be finite and >= 0");
  require(std::isfinite(on_max) && on_max > 0.0, "on_max must be finite and > 0");
}

ArrivalRealization::ArrivalRealization(std::vector<ArrivalSegment> segments)
    : segments_(std::move(segments)) {
  require(!segments_.empty(), "arrival realization needs at least one segment");
  require(segments_.front().t_start == 0.0, "arrival realization must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    require(std::isfinite(s.t_start) && std::isfinite(s.t_end) && s.t_end >= s.t_start,
            "arrival segment " + std::to_string(i) + " has an invalid time range");
    require(std::isfinite(s.rate) && s.rate >= 0.0,
            "arrival segment " + std::to_string(i) + " has an invalid rate");
    if (i > 0) {
      require(s.t_start == segments_[i - 1].t_end,
              "arrival segment " + std::to_string(i) + " is not contiguous with its predecessor");
    }
  }
  require(horizon() > 0.0, "arrival realization must have a positive horizon");
}

std::size_t ArrivalRealization::index_at(double t) const {
  if (!(t >= 0.0 && t <= horizon())) {
    throw std::out_of_range("time " + std::to_string(t) + " outside arrival horizon [0, " +
                            std::to_string(horizon()) + "]");
  }
  // First segment whose end lies strictly beyond t; zero-length segments are
  // skipped automatically since their end equals their start.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const ArrivalSegment& s) { return v < s.t_end; });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

ArrivalRealization generate_arrival(const ArrivalConfig& cfg, double horizon, std::uint64_t seed) {
  cfg.validate();
  require(std::isfinite(horizon) && horizon > 0.0, "arrival horizon must be finite and > 0");

  std::mt19937_64 gen(seed);
  std::vector<ArrivalSegment> segments;
  double t = 0.0;
  bool off = true;
  while (t < horizon) {
    const double duration = uniform01(gen) * (off ? cfg.off_max : cfg.on_max);
    double rate = 0.0;
    if (!off) {
      rate = cfg.mean_rate * (1.0 + cfg.relative_spread * (2.0 * uniform01(gen) - 1.0));
    }
    const double end = std::min(t + duration, horizon);
    if (end > t) segments.push_back({t, end, rate});
    t = end;
    off = !off;
  }
  return ArrivalRealization(std::move(segments));
}

double arrival_rate_at(const ArrivalRealization& arrival, double t) {
  return arrival.segments()[arrival.index_at(t)].rate;
}

void ServiceConfig::validate() const {
  require(std::isfinite(beta_max) && beta_max > 0.0, "beta_max must be finite and > 0");
  require(!std::isnan(ramp_rate) && ramp_rate >= 0.0, "ramp_rate must be >= 0 (inf allowed)");
  require(std::isfinite(cycle_length) && cycle_length > 0.0, "cycle_length must be finite and > 0");
}

double ServiceConfig::ramp_value(double since_green) const {
  if (instant_jump()) return beta_max;
  return std::min(ramp_rate * since_green, beta_max);
}

double ServiceConfig::saturation_delay() const {
  if (instant_jump()) return 0.0;
  if (ramp_rate == 0.0) return std::numeric_limits<double>::infinity();
  return beta_max / ramp_rate;
}

double service_rate(const ServiceConfig& svc, double theta, double t, bool buffer_positive) {
  svc.validate();
  if (!(theta >= 0.0 && theta <= svc.cycle_length)) {
    throw std::invalid_argument("theta must lie in [0, C]");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and >= 0");
  const double k = std::floor(t / svc.cycle_length);
  const double tau = t - k * svc.cycle_length;
  if (tau < theta) return 0.0;
  if (!buffer_positive) return svc.beta_max;
  return svc.ramp_value(tau - theta);
}

}  // namespace trafficipa
