#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "reference_oracles.hpp"
#include "trafficipa/hybrid_sim.hpp"

using namespace trafficipa;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const ServiceConfig kJump{2.0, kInf, 1.0};

ArrivalRealization constant_arrival(double rate, double horizon) {
  return ArrivalRealization({{0.0, horizon, rate}});
}

double x_at(const SamplePath& p, double t) {
  for (const auto& s : p.segments) {
    if (t >= s.t_start && t <= s.t_end) return t == s.t_end ? s.x_end : s.x_at(t);
  }
  FAIL("time outside path");
  return 0.0;
}

std::vector<EventKind> kinds_without_arrivals(const SamplePath& p) {
  std::vector<EventKind> out;
  for (const auto& e : p.events) {
    if (e.kind != EventKind::ArrivalChange) out.push_back(e.kind);
  }
  return out;
}

}  // namespace

TEST_CASE("triangle path: fill in red, drain in green", "[hybrid_sim]") {
  const auto path = simulate_control_cycle(0.5, constant_arrival(1.0, 1.0), kJump, 1, 0.0);

  CHECK(x_at(path, 0.5) == Approx(0.5).margin(1e-15));
  CHECK(path.x_final == 0.0);
  CHECK(performance(path) == Approx(0.25).margin(1e-15));

  using K = EventKind;
  const std::vector<K> expected{K::RedStart, K::BufferNonEmptyStart, K::GreenStart, K::BufferEmpty,
                                K::Horizon};
  CHECK(kinds_without_arrivals(path) == expected);
  CHECK(path.events[3].time == 1.0);
  CHECK(path.events[2].beta_left == 0.0);
  CHECK(path.events[2].beta_right == 2.0);
}

TEST_CASE("all-green path never leaves zero", "[hybrid_sim]") {
  const auto path = simulate_control_cycle(0.0, constant_arrival(1.0, 1.0), kJump, 1, 0.0);
  REQUIRE(path.segments.size() == 1);
  CHECK(path.segments[0].x_start == 0.0);
  CHECK(path.segments[0].x_end == 0.0);
  CHECK(performance(path) == 0.0);
  CHECK(path.events.front().kind == EventKind::GreenStart);
}

TEST_CASE("queue carried across two light cycles", "[hybrid_sim]") {
  const auto path = simulate_control_cycle(0.75, constant_arrival(1.0, 2.0), kJump, 2, 0.0);
  CHECK(x_at(path, 1.0) == Approx(0.5).margin(1e-14));
  CHECK(x_at(path, 1.75) == Approx(1.25).margin(1e-14));
  CHECK(path.x_final == Approx(1.0).margin(1e-14));
  // Trapezoids 0.28125 + 0.15625 + 0.65625 + 0.28125 over T = 2.
  CHECK(performance(path) == Approx(0.6875).margin(1e-14));
  CHECK(std::count_if(path.events.begin(), path.events.end(), [](const PathEvent& e) {
          return e.kind == EventKind::BufferEmpty;
        }) == 0);
}

TEST_CASE("performance matches the closed-form triangle curve", "[hybrid_sim]") {
  for (double theta : {0.05, 0.2, 0.33, 0.5, 0.61, 0.75, 0.9, 1.0}) {
    const auto path = simulate_control_cycle(theta, constant_arrival(1.0, 1.0), kJump, 1, 0.0);
    CHECK(performance(path) == Approx(testing::triangle_L(theta)).margin(1e-14));
  }
}

TEST_CASE("solve_empty_hit", "[hybrid_sim]") {
  const auto linear = solve_empty_hit({0.5, 2.0, 0.5, 0.0, 1.0, 2.0, 0.0});
  REQUIRE(linear);
  CHECK(*linear == Approx(1.0).margin(1e-15));

  CHECK_FALSE(solve_empty_hit({0.0, 2.0, 1.0, 0.0, 1.0, 1.0, 0.0}));

  const auto ramp = solve_empty_hit({0.0, 1.0, 0.1, 0.0, 0.0, 0.0, 0.62});
  REQUIRE(ramp);
  CHECK(*ramp == Approx(std::sqrt(0.1 / 0.31)).margin(1e-15));
  CHECK(*ramp == Approx(0.568).margin(1e-3));

  // Root beyond the segment end.
  CHECK_FALSE(solve_empty_hit({0.0, 0.5, 1.0, 0.0, 0.0, 1.0, 0.0}));
  // Starts empty, rises, comes back to zero under a steep ramp.
  const auto rebound = solve_empty_hit({0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 4.0});
  REQUIRE(rebound);
  CHECK(*rebound == Approx(0.5).margin(1e-15));
  // Near-cancellation: tiny buffer, large net drain.
  const auto tiny = solve_empty_hit({0.0, 1.0, 1e-12, 0.0, 0.0, 1e6, 1.0});
  REQUIRE(tiny);
  CHECK(*tiny == Approx(1e-18).epsilon(1e-9));
}

TEST_CASE("simulate rejects bad inputs", "[hybrid_sim]") {
  const auto arrival = constant_arrival(1.0, 1.0);
  CHECK_THROWS_AS(simulate_control_cycle(-0.1, arrival, kJump, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_control_cycle(1.1, arrival, kJump, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_control_cycle(0.5, arrival, kJump, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_control_cycle(0.5, arrival, kJump, 1, kInf), std::invalid_argument);
  CHECK_THROWS_AS(simulate_control_cycle(0.5, arrival, kJump, 1, -1.0), std::invalid_argument);
}

TEST_CASE("ramp saturation and empty latch", "[hybrid_sim]") {
  // Ramp reaches beta_max 0.1 into green, buffer drains later.
  const ServiceConfig svc{2.0, 20.0, 1.0};
  const auto path = simulate_control_cycle(0.5, constant_arrival(1.0, 1.0), svc, 1, 0.0);
  const auto sat = std::find_if(path.events.begin(), path.events.end(),
                                [](const PathEvent& e) { return e.kind == EventKind::RampSaturation; });
  REQUIRE(sat != path.events.end());
  CHECK(sat->time == Approx(0.6).margin(1e-15));
  CHECK(sat->beta_left == Approx(2.0).margin(1e-14));
  // x(0.6) = 0.5 + 0.1 - 20 * 0.01 / 2 = 0.5; then drains at 1: empty at 1.1 > 1.
  CHECK(path.x_final == Approx(0.1).margin(1e-14));

  // Slow ramp: the buffer empties mid-ramp and service jumps to beta_max.
  const ServiceConfig slow{5.0, 4.0, 1.0};
  const auto p2 = simulate_control_cycle(0.2, constant_arrival(1.0, 1.0), slow, 1, 0.0);
  const auto empty = std::find_if(p2.events.begin(), p2.events.end(),
                                  [](const PathEvent& e) { return e.kind == EventKind::BufferEmpty; });
  REQUIRE(empty != p2.events.end());
  // 0.2 + s - 2 s^2 = 0  =>  s = (1 + sqrt(1 + 1.6)) / 4.
  CHECK(empty->time == Approx(0.2 + (1.0 + std::sqrt(2.6)) / 4.0).margin(1e-14));
  CHECK(empty->beta_left == Approx(4.0 * (1.0 + std::sqrt(2.6)) / 4.0).margin(1e-13));
  CHECK(empty->beta_right == 5.0);
  CHECK(beta_left_at(p2, empty->time) == empty->beta_left);
  CHECK(beta_right_at(p2, empty->time) == 5.0);
}

TEST_CASE("refill after emptying drains at beta_max", "[hybrid_sim]") {
  // Arrival 1 until 0.6, then 7 (> beta_max = 5) until 0.8, then 0.
  const ArrivalRealization arrival({{0.0, 0.6, 1.0}, {0.6, 0.8, 7.0}, {0.8, 1.0, 0.0}});
  const ServiceConfig svc{5.0, 62.0, 1.0};
  const auto path = simulate_control_cycle(0.2, arrival, svc, 1, 0.0);
  bool refilled = false;
  for (const auto& s : path.segments) {
    if (s.t_start >= 0.6 - 1e-12 && s.t_end <= 0.8 + 1e-12 && s.x_end > 0.0) {
      refilled = true;
      CHECK(s.beta_start == 5.0);
      CHECK(s.beta_slope == 0.0);
    }
  }
  CHECK(refilled);
  CHECK(path.x_final == 0.0);
}

TEST_CASE("warm start begins a busy period at t = 0", "[hybrid_sim]") {
  const auto path = simulate_control_cycle(0.5, constant_arrival(1.0, 1.0), kJump, 1, 0.3);
  CHECK(path.segments.front().x_start == 0.3);
  // 0.3 + 0.5 accumulated, drains at 1 from 0.5: x(1) = 0.3.
  CHECK(path.x_final == Approx(0.3).margin(1e-14));
  CHECK(std::none_of(path.events.begin(), path.events.end(), [](const PathEvent& e) {
    return e.kind == EventKind::BufferNonEmptyStart;
  }));
}

TEST_CASE("random paths satisfy structural invariants and match brute force",
          "[hybrid_sim][property]") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const ArrivalConfig ac{1.0 + 5.0 * u01(gen), 0.9 * u01(gen), 0.1 * u01(gen), 0.02 + 0.2 * u01(gen)};
    const double ramp = u01(gen) < 0.2 ? kInf : std::exp(std::log(0.5) + u01(gen) * std::log(400.0));
    const ServiceConfig svc{2.0 + 6.0 * u01(gen), ramp, 1.0};
    const int n = 1 + static_cast<int>(u01(gen) * 3);
    const auto arrival = generate_arrival(ac, n, gen());
    const double theta = u01(gen);
    const double x0 = u01(gen) < 0.3 ? u01(gen) : 0.0;

    const auto path = simulate_control_cycle(theta, arrival, svc, n, x0);
    const auto d = diagnose(path);
    INFO("trial " << trial << " theta " << theta << " ramp " << ramp);
    REQUIRE(d.partition_ok);
    REQUIRE(d.event_invariants_ok);
    REQUIRE(d.max_continuity_gap == 0.0);
    REQUIRE(d.min_x >= 0.0);
    REQUIRE(d.max_formula_gap <= 1e-9);
    REQUIRE(d.max_mass_balance_error <= 1e-9);

    const double brute = testing::brute_force_L(theta, arrival, svc, n, x0, 2e-5);
    REQUIRE(performance(path) == Approx(brute).margin(2e-3).epsilon(2e-3));
  }
}

TEST_CASE("identical inputs give bit-identical paths", "[hybrid_sim]") {
  const auto arrival = generate_arrival({4.1, 0.3, 0.02, 0.063}, 20.0, 3);
  const ServiceConfig svc{5.0, 62.0, 1.0};
  const auto a = simulate_control_cycle(0.27, arrival, svc, 20, 0.0);
  const auto b = simulate_control_cycle(0.27, arrival, svc, 20, 0.0);
  REQUIRE(a.segments.size() == b.segments.size());
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    REQUIRE(a.segments[i].x_end == b.segments[i].x_end);
    REQUIRE(a.segments[i].t_end == b.segments[i].t_end);
  }
  CHECK(performance(a) == performance(b));
}

TEST_CASE("performance is continuous in theta", "[hybrid_sim][property]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const auto arrival = generate_arrival({4.1, 0.3, 0.02, 0.063}, 20.0, 8);
  const ServiceConfig svc{5.0, 62.0, 1.0};
  for (int i = 0; i < 30; ++i) {
    const double theta = u(gen);
    const double l0 = performance(simulate_control_cycle(theta, arrival, svc, 20, 0.0));
    const double l1 = performance(simulate_control_cycle(theta + 1e-6, arrival, svc, 20, 0.0));
    CHECK(std::abs(l1 - l0) < 1e-4);
  }
}
