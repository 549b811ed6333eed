#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "trafficipa/controller.hpp"

using namespace trafficipa;
using Catch::Approx;

namespace {

ControllerConfig wide(double set_point) {
  ControllerConfig cfg;
  cfg.set_point = set_point;
  cfg.theta_min = 0.0;
  cfg.theta_max = 100.0;
  return cfg;
}

Plant square_plant() {
  return [](double u, int) { return PlantResponse{u * u, 2.0 * u}; };
}

}  // namespace

TEST_CASE("gain follows the inverse derivative with a floor", "[controller]") {
  ControllerConfig cfg;
  CHECK(gain(2.0, cfg, 1) == 0.5);
  CHECK(gain(0.0, cfg, 1) == Approx(1000.0));
  CHECK(gain(-4.0, cfg, 1) == -0.25);
  CHECK(gain(-1e-6, cfg, 1) == Approx(-1000.0));

  cfg.gain_error = ConstantGainError{0.3};
  CHECK(gain(2.0, cfg, 1) == Approx(1.0 / 2.6));

  cfg.gain_error = GainErrorSequence{{0.1, -0.2}};
  CHECK(gain(1.0, cfg, 1) == Approx(1.0 / 1.1));
  CHECK(gain(1.0, cfg, 2) == Approx(1.0 / 0.8));
  CHECK(gain(1.0, cfg, 3) == Approx(1.0 / 1.1));

  CHECK_THROWS_AS(gain(std::numeric_limits<double>::quiet_NaN(), cfg, 1), std::invalid_argument);
}

TEST_CASE("step on a linear plant settles after one move", "[controller]") {
  const auto cfg = wide(1.0);
  ControllerState state;
  state.u_prev = 0.0;
  CHECK(step(state, 0.0, 2.0, cfg) == 0.5);
  CHECK(state.history.back().e == 1.0);
  CHECK(state.history.back().gain == 0.5);
  CHECK(step(state, 1.0, 2.0, cfg) == 0.5);
  CHECK(state.e_prev == 0.0);
  CHECK(state.n == 2);
}

TEST_CASE("step on u^2 reproduces the Newton iterates", "[controller]") {
  const auto cfg = wide(4.0);
  ControllerState state;
  state.u_prev = 1.0;
  CHECK(step(state, 1.0, 2.0, cfg) == 2.5);
  CHECK(state.history.back().e == 3.0);
  CHECK(step(state, 6.25, 5.0, cfg) == Approx(2.05).margin(1e-15));
  CHECK(state.history.back().e == -2.25);
  CHECK(state.history.back().gain == Approx(0.2));
}

TEST_CASE("step clamps to the guard", "[controller]") {
  ControllerConfig cfg;
  cfg.set_point = 0.3;
  ControllerState state;
  state.u_prev = 0.12;
  // A = 1, e = -0.5.
  CHECK(step(state, 0.8, 1.0, cfg) == 0.1);
  state.u_prev = 0.85;
  CHECK(step(state, 0.0, 1.0, cfg) == 0.9);
  CHECK_THROWS_AS(step(state, std::numeric_limits<double>::infinity(), 1.0, cfg),
                  std::invalid_argument);
}

TEST_CASE("regulate matches Newton on a scripted plant", "[controller]") {
  const auto cfg = wide(4.0);
  const auto traj = regulate(square_plant(), cfg, 12, 1.0);
  double u = 1.0;
  for (const auto& obs : traj) {
    REQUIRE(obs.theta == Approx(u).margin(1e-12));
    u = u + (4.0 - u * u) / (2.0 * u);
  }
  CHECK(std::abs(traj.back().error) <= 1e-12);
}

TEST_CASE("regulate converges with bounded derivative errors", "[controller]") {
  for (double eps : {0.1, 0.3, 0.5, -0.3}) {
    auto cfg = wide(4.0);
    cfg.gain_error = ConstantGainError{eps};
    const auto traj = regulate(square_plant(), cfg, 50, 1.0);
    INFO("epsilon " << eps);
    CHECK(std::abs(traj.back().error) <= 1e-6);
  }
}

TEST_CASE("negative derivative keeps the update direction", "[controller]") {
  // Decreasing plant: raising u lowers y.
  const auto cfg = wide(2.0);
  const auto traj = regulate([](double u, int) { return PlantResponse{5.0 - u, -1.0}; }, cfg, 3, 1.0);
  CHECK(traj[1].theta == Approx(3.0));
  CHECK(traj[2].error == Approx(0.0));
}

TEST_CASE("guard invariance on random plants", "[controller][property]") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ControllerConfig cfg;
    cfg.theta_min = 0.3 * u01(gen);
    cfg.theta_max = cfg.theta_min + 0.1 + 0.6 * u01(gen);
    cfg.set_point = 0.1 + u01(gen);
    const double scale = 0.1 + 5.0 * u01(gen);
    std::mt19937_64 noise(gen());
    const Plant plant = [&](double u, int) {
      std::normal_distribution<double> n01;
      return PlantResponse{scale * u * u + 0.3 * n01(noise), 2.0 * scale * u + n01(noise)};
    };
    const auto traj = regulate(plant, cfg, 30, cfg.theta_min);
    for (const auto& obs : traj) {
      REQUIRE(obs.theta >= cfg.theta_min);
      REQUIRE(obs.theta <= cfg.theta_max);
    }
  }
}

TEST_CASE("regulate validates its inputs", "[controller]") {
  ControllerConfig cfg;
  CHECK_THROWS_AS(regulate(square_plant(), cfg, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(regulate(square_plant(), cfg, 5, 0.95), std::invalid_argument);
  cfg.derivative_floor = 0.0;
  CHECK_THROWS_AS(regulate(square_plant(), cfg, 5, 0.5), std::invalid_argument);
}
