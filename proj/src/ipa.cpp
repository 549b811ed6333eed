#include "trafficipa/ipa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trafficipa {

namespace {

bool is_green_to_red(const PathEvent& e, const SamplePath& path) {
  if (e.kind == EventKind::RedStart) return true;
  // With theta = 0 there is no red phase; the cycle boundary restarts green.
  return e.kind == EventKind::GreenStart && path.theta == 0.0;
}

double beta_integral_over(const SamplePath& path, double u, double v) {
  double total = 0.0;
  for (const auto& seg : path.segments) {
    if (seg.t_end <= u + kEventTimeTolerance) continue;
    if (seg.t_start >= v - kEventTimeTolerance) break;
    total += seg.beta_integral();
  }
  return total;
}

double period_integral(const NonEmptyPeriodRecord& rec, const SamplePath& path) {
  const double v = rec.t_end;
  double steps = 0.0;
  for (const auto& [switch_time, beta_before] : rec.green_to_red_betas) {
    steps += beta_before * (v - switch_time);
  }
  return steps + beta_integral_over(path, rec.u_start, v) -
         rec.beta_after_start * (v - rec.u_start);
}

double x_prime_right(const NonEmptyPeriodRecord& rec, const SamplePath& path, double t) {
  double sum = 0.0;
  for (const auto& [switch_time, beta_before] : rec.green_to_red_betas) {
    if (switch_time <= t) sum += beta_before;
  }
  return sum + beta_right_at(path, t) - rec.beta_after_start;
}

}  // namespace

std::vector<NonEmptyPeriodRecord> extract_periods(const SamplePath& path) {
  std::vector<NonEmptyPeriodRecord> out;
  if (path.segments.empty()) return out;

  NonEmptyPeriodRecord current;
  bool open = path.segments.front().x_start > 0.0;
  if (open) {
    current.u_start = 0.0;
    for (const auto& e : path.events) {
      if (e.time > kEventTimeTolerance) break;
      current.beta_after_start = e.beta_right;
    }
  }

  for (const auto& e : path.events) {
    if (!open) {
      if (e.kind == EventKind::BufferNonEmptyStart) {
        open = true;
        current = NonEmptyPeriodRecord{};
        current.u_start = e.time;
        current.beta_after_start = e.beta_right;
      }
      continue;
    }
    if (e.kind == EventKind::BufferEmpty || e.kind == EventKind::Horizon) {
      current.t_end = e.time;
      if (current.t_end > current.u_start) out.push_back(std::move(current));
      current = NonEmptyPeriodRecord{};
      open = false;
    } else if (is_green_to_red(e, path) && e.time > current.u_start + kEventTimeTolerance) {
      current.green_to_red_betas.emplace_back(e.time, e.beta_left);
    }
  }
  return out;
}

double x_prime_at(const NonEmptyPeriodRecord& record, const SamplePath& path, double t) {
  if (!(t > record.u_start && t < record.t_end)) {
    throw std::domain_error("t = " + std::to_string(t) + " lies outside the non-empty period");
  }
  for (const auto& e : path.events) {
    if (std::abs(e.time - t) > kEventTimeTolerance) continue;
    const bool jump_kind = e.kind == EventKind::RedStart || e.kind == EventKind::RampSaturation ||
                           e.kind == EventKind::BufferEmpty;
    if (jump_kind || e.beta_left != e.beta_right) {
      throw std::domain_error("service rate is discontinuous at t = " + std::to_string(t));
    }
  }
  return x_prime_right(record, path, t);
}

IpaResult ipa_derivative(const SamplePath& path, bool with_trace) {
  IpaResult result;
  result.boundary = path.theta == 0.0 || path.theta == path.cycle_length;

  const auto periods = extract_periods(path);
  double total = 0.0;
  for (const auto& rec : periods) {
    const double contribution = period_integral(rec, path);
    result.per_period_contributions.push_back(contribution);
    total += contribution;
  }
  result.L_prime = total / path.horizon;

  if (with_trace) {
    constexpr int kTracePoints = 1000;
    result.x_prime_trace.reserve(kTracePoints);
    std::size_t p = 0;
    for (int i = 0; i < kTracePoints; ++i) {
      const double t = (i + 0.5) * path.horizon / kTracePoints;
      while (p < periods.size() && periods[p].t_end <= t) ++p;
      double value = 0.0;
      if (p < periods.size() && periods[p].u_start < t) value = x_prime_right(periods[p], path, t);
      result.x_prime_trace.emplace_back(t, value);
    }
  }
  return result;
}

}  // namespace trafficipa
