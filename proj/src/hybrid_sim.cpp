#include "trafficipa/hybrid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trafficipa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Positive root s of x0 + a s - (k/2) s^2 = 0, with k >= 0.
std::optional<double> empty_offset(double x0, double a, double k) {
  if (k == 0.0) {
    if (a >= 0.0 || x0 <= 0.0) return std::nullopt;
    return x0 / -a;
  }
  // (k/2) s^2 - a s - x0 = 0; the product of the roots is -2 x0 / k <= 0, so
  // at most one root is positive.
  const double qa = 0.5 * k;
  const double qb = -a;
  const double qc = -x0;
  const double disc = qb * qb - 4.0 * qa * qc;
  const double q = -0.5 * (qb + std::copysign(std::sqrt(std::max(disc, 0.0)), qb));
  const double r1 = q / qa;
  const double r2 = q != 0.0 ? qc / q : 0.0;
  const double s = std::max(r1, r2);
  if (!(s > 0.0)) return std::nullopt;
  return s;
}

struct LightSwitch {
  double time;
  EventKind kind;
};

class CycleIntegrator {
 public:
  CycleIntegrator(double theta, const ArrivalRealization& arrival, const ServiceConfig& svc,
                  int light_cycles, double x0)
      : arrival_(arrival), svc_(svc), theta_(theta), x_(x0) {
    horizon_ = light_cycles * svc.cycle_length;
    const double c = svc.cycle_length;
    for (int k = 0; k < light_cycles; ++k) {
      if (theta_ > 0.0) lights_.push_back({k * c, EventKind::RedStart});
      if (theta_ < c) lights_.push_back({k * c + theta_, EventKind::GreenStart});
    }
    path_.theta = theta;
    path_.horizon = horizon_;
    path_.cycle_length = c;
  }

  SamplePath run() {
    busy_ = x_ > 0.0;
    process_instant();
    while (t_ < horizon_) {
      advance();
      process_instant();
    }
    emit(EventKind::Horizon, beta_cur_, beta_cur_);
    path_.x_final = x_;
    return std::move(path_);
  }

 private:
  double beta_now() const {
    if (!green_) return 0.0;
    if (!busy_ || full_) return svc_.beta_max;
    return svc_.ramp_value(t_ - green_start_);
  }

  double beta_slope_now() const {
    if (!green_ || !busy_ || full_) return 0.0;
    return svc_.ramp_rate;
  }

  void emit(EventKind kind, double beta_left, double beta_right) {
    path_.events.push_back({t_, kind, beta_left, beta_right, x_});
    beta_cur_ = beta_right;
  }

  void mark_empty(double beta_left) {
    x_ = 0.0;
    busy_ = false;
    if (green_) full_ = true;
    emit(EventKind::BufferEmpty, beta_left, beta_now());
  }

  // Integrates from t_ to the next scheduled instant or to an empty hit.
  void advance() {
    const double alpha = arrival_.segments()[arrival_idx_].rate;
    const double beta0 = beta_now();
    const double slope = beta_slope_now();

    double t_next = horizon_;
    if (light_idx_ < lights_.size()) t_next = std::min(t_next, lights_[light_idx_].time);
    t_next = std::min(t_next, arrival_.segments()[arrival_idx_].t_end);
    if (slope > 0.0) t_next = std::min(t_next, green_start_ + svc_.saturation_delay());
    if (t_next > horizon_ - kEventTimeTolerance) t_next = horizon_;

    if (!busy_) {
      push_segment({t_, t_next, 0.0, 0.0, alpha, beta0, 0.0, true});
      t_ = t_next;
      return;
    }

    const auto offset = empty_offset(x_, alpha - beta0, slope);
    if (x_ == 0.0 && alpha - beta0 <= 0.0) {
      // Nothing left to drain; close the busy stretch without a segment.
      mark_empty(beta0);
      return;
    }
    if (offset) {
      double t_hit = t_ + *offset;
      if (t_hit <= t_next + kEventTimeTolerance) {
        if (t_hit >= t_next - kEventTimeTolerance) t_hit = t_next;
        if (t_hit - t_ <= kEventTimeTolerance) {
          // Last-ulp leftover from the previous segment.
          if (!path_.segments.empty() && path_.segments.back().t_end == t_) {
            path_.segments.back().x_end = 0.0;
          }
          mark_empty(beta0);
          return;
        }
        push_segment({t_, t_hit, x_, 0.0, alpha, beta0, slope});
        t_ = t_hit;
        mark_empty(beta0 + slope * (t_hit - path_.segments.back().t_start));
        return;
      }
    }
    PathSegment seg{t_, t_next, x_, 0.0, alpha, beta0, slope};
    seg.x_end = std::max(0.0, seg.x_at(t_next));
    push_segment(seg);
    x_ = seg.x_end;
    t_ = t_next;
  }

  void push_segment(const PathSegment& seg) {
    path_.segments.push_back(seg);
    beta_cur_ = seg.beta_end();
  }

  // Handles every scheduled event at t_ in tie-break order.
  void process_instant() {
    const double limit = t_ + kEventTimeTolerance;

    while (light_idx_ < lights_.size() && lights_[light_idx_].time <= limit) {
      const auto kind = lights_[light_idx_++].kind;
      const double left = beta_cur_;
      if (kind == EventKind::RedStart) {
        green_ = false;
      } else {
        green_ = true;
        green_start_ = t_;
        full_ = !busy_ || svc_.instant_jump();
      }
      emit(kind, left, beta_now());
    }

    const auto segs = arrival_.segments();
    while (arrival_idx_ + 1 < segs.size() && segs[arrival_idx_].t_end <= limit) {
      ++arrival_idx_;
      if (t_ < horizon_) emit(EventKind::ArrivalChange, beta_cur_, beta_cur_);
    }

    if (green_ && busy_ && !full_ && green_start_ + svc_.saturation_delay() <= limit) {
      full_ = true;
      emit(EventKind::RampSaturation, beta_cur_, beta_now());
    }

    if (!busy_ && t_ < horizon_ && segs[arrival_idx_].rate > beta_now()) {
      busy_ = true;
      if (green_) full_ = true;
      emit(EventKind::BufferNonEmptyStart, beta_cur_, beta_now());
    }
  }

  const ArrivalRealization& arrival_;
  const ServiceConfig& svc_;
  double theta_;
  double horizon_ = 0.0;
  std::vector<LightSwitch> lights_;
  std::size_t light_idx_ = 0;
  std::size_t arrival_idx_ = 0;

  double t_ = 0.0;
  double x_;
  bool busy_ = false;
  bool green_ = false;
  bool full_ = false;  // green with service at beta_max (saturated or latched)
  double green_start_ = 0.0;
  double beta_cur_ = 0.0;  // left-limit of beta at t_

  SamplePath path_;
};

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::RedStart: return "RedStart";
    case EventKind::GreenStart: return "GreenStart";
    case EventKind::BufferEmpty: return "BufferEmpty";
    case EventKind::BufferNonEmptyStart: return "BufferNonEmptyStart";
    case EventKind::RampSaturation: return "RampSaturation";
    case EventKind::ArrivalChange: return "ArrivalChange";
    case EventKind::Horizon: return "Horizon";
  }
  return "Unknown";
}

double PathSegment::x_at(double t) const {
  if (empty) return 0.0;
  const double s = t - t_start;
  return x_start + (alpha - beta_start) * s - 0.5 * beta_slope * s * s;
}

double PathSegment::x_integral() const {
  if (empty) return 0.0;
  const double l = length();
  return x_start * l + 0.5 * (alpha - beta_start) * l * l - beta_slope * l * l * l / 6.0;
}

double PathSegment::beta_integral() const {
  const double l = length();
  return beta_start * l + 0.5 * beta_slope * l * l;
}

double PathSegment::net_integral() const {
  if (empty) return 0.0;
  const double l = length();
  return (alpha - beta_start) * l - 0.5 * beta_slope * l * l;
}

SamplePath simulate_control_cycle(double theta, const ArrivalRealization& arrival,
                                  const ServiceConfig& svc, int light_cycles, double x0) {
  svc.validate();
  if (!(theta >= 0.0 && theta <= svc.cycle_length)) {
    throw std::invalid_argument("theta must lie in [0, C]");
  }
  if (light_cycles < 1) throw std::invalid_argument("light_cycles must be >= 1");
  if (!std::isfinite(x0) || x0 < 0.0) throw std::invalid_argument("x0 must be finite and >= 0");
  const double horizon = light_cycles * svc.cycle_length;
  if (arrival.horizon() < horizon) {
    throw std::invalid_argument("arrival horizon is shorter than the control cycle");
  }
  return CycleIntegrator(theta, arrival, svc, light_cycles, x0).run();
}

double performance(const SamplePath& path) {
  double area = 0.0;
  for (const auto& seg : path.segments) area += seg.x_integral();
  return area / path.horizon;
}

std::optional<double> solve_empty_hit(const PathSegment& segment) {
  const auto s = empty_offset(segment.x_start, segment.alpha - segment.beta_start,
                              segment.beta_slope);
  if (!s || *s > segment.length()) return std::nullopt;
  return segment.t_start + *s;
}

namespace {

// Index range [first, last) of events within tolerance of t.
std::pair<std::size_t, std::size_t> events_at(const SamplePath& path, double t) {
  std::size_t first = path.events.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < path.events.size(); ++i) {
    if (std::abs(path.events[i].time - t) <= kEventTimeTolerance) {
      first = std::min(first, i);
      last = i + 1;
    }
  }
  return {first, last};
}

const PathSegment& segment_containing(const SamplePath& path, double t) {
  auto it = std::upper_bound(path.segments.begin(), path.segments.end(), t,
                             [](double v, const PathSegment& s) { return v < s.t_end; });
  if (it == path.segments.end()) return path.segments.back();
  return *it;
}

}  // namespace

double beta_left_at(const SamplePath& path, double t) {
  const auto [first, last] = events_at(path, t);
  if (first < last) return path.events[first].beta_left;
  return segment_containing(path, t).beta_at(t);
}

double beta_right_at(const SamplePath& path, double t) {
  const auto [first, last] = events_at(path, t);
  if (first < last) return path.events[last - 1].beta_right;
  return segment_containing(path, t).beta_at(t);
}

PathDiagnostics diagnose(const SamplePath& path) {
  PathDiagnostics d;
  const auto& segs = path.segments;
  if (segs.empty() || segs.front().t_start != 0.0 || segs.back().t_end != path.horizon) {
    d.partition_ok = false;
    return d;
  }
  d.min_x = kInf;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!(s.t_end > s.t_start)) d.partition_ok = false;
    if (i > 0) {
      if (s.t_start != segs[i - 1].t_end) d.partition_ok = false;
      d.max_continuity_gap = std::max(d.max_continuity_gap, std::abs(segs[i - 1].x_end - s.x_start));
    }
    d.min_x = std::min({d.min_x, s.x_start, s.x_end});
    d.max_formula_gap = std::max(d.max_formula_gap, std::abs(s.x_end - s.x_at(s.t_end)));
    if (s.empty && s.alpha > s.beta_start + kEventTimeTolerance) {
      d.event_invariants_ok = false;
    }
  }

  const double c = path.cycle_length;
  double prev_time = 0.0;
  for (const auto& e : path.events) {
    if (e.time < prev_time) d.event_invariants_ok = false;
    prev_time = e.time;
    const double cycles = e.time / c;
    switch (e.kind) {
      case EventKind::RedStart:
        if (std::abs(cycles - std::round(cycles)) > 1e-9 || e.beta_right != 0.0) {
          d.event_invariants_ok = false;
        }
        break;
      case EventKind::GreenStart: {
        const double phase = e.time - std::floor(cycles + 1e-12) * c;
        if (std::abs(phase - path.theta) > 1e-9) d.event_invariants_ok = false;
        break;
      }
      case EventKind::BufferEmpty:
        if (e.x_at != 0.0) d.event_invariants_ok = false;
        break;
      default:
        break;
    }
  }

  // Mass balance per non-empty period.
  std::size_t si = 0;
  bool open = segs.front().x_start > 0.0;
  double u = 0.0;
  double x_u = segs.front().x_start;
  auto close_period = [&](double v, double x_v) {
    double net = 0.0;
    while (si < segs.size() && segs[si].t_end <= v) {
      if (segs[si].t_start >= u) net += segs[si].net_integral();
      ++si;
    }
    d.max_mass_balance_error = std::max(d.max_mass_balance_error, std::abs((x_v - x_u) - net));
  };
  for (const auto& e : path.events) {
    if (e.kind == EventKind::BufferNonEmptyStart && !open) {
      open = true;
      u = e.time;
      x_u = e.x_at;
      while (si < segs.size() && segs[si].t_end <= u) ++si;
    } else if ((e.kind == EventKind::BufferEmpty || e.kind == EventKind::Horizon) && open) {
      close_period(e.time, e.x_at);
      open = false;
    }
  }
  return d;
}

}  // namespace trafficipa
