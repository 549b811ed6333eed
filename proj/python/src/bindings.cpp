#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "trafficipa/config.hpp"
#include "trafficipa/controller.hpp"
#include "trafficipa/experiment.hpp"
#include "trafficipa/hybrid_sim.hpp"
#include "trafficipa/ipa.hpp"
#include "trafficipa/oracle.hpp"
#include "trafficipa/rate_processes.hpp"

namespace py = pybind11;
using namespace trafficipa;

namespace {

void bind_rate_processes(py::module_& m) {
  py::class_<ArrivalConfig>(m, "ArrivalConfig")
      .def(py::init<>())
      .def(py::init([](double mean_rate, double relative_spread, double off_max, double on_max) {
             return ArrivalConfig{mean_rate, relative_spread, off_max, on_max};
           }),
           py::arg("mean_rate"), py::arg("relative_spread"), py::arg("off_max"), py::arg("on_max"))
      .def_readwrite("mean_rate", &ArrivalConfig::mean_rate)
      .def_readwrite("relative_spread", &ArrivalConfig::relative_spread)
      .def_readwrite("off_max", &ArrivalConfig::off_max)
      .def_readwrite("on_max", &ArrivalConfig::on_max);

  py::class_<ArrivalSegment>(m, "ArrivalSegment")
      .def(py::init([](double a, double b, double r) { return ArrivalSegment{a, b, r}; }),
           py::arg("t_start"), py::arg("t_end"), py::arg("rate"))
      .def_readonly("t_start", &ArrivalSegment::t_start)
      .def_readonly("t_end", &ArrivalSegment::t_end)
      .def_readonly("rate", &ArrivalSegment::rate);

  py::class_<ArrivalRealization>(m, "ArrivalRealization")
      .def(py::init<std::vector<ArrivalSegment>>(), py::arg("segments"))
      .def_property_readonly("horizon", &ArrivalRealization::horizon)
      .def_property_readonly("segments", [](const ArrivalRealization& a) {
        return std::vector<ArrivalSegment>(a.segments().begin(), a.segments().end());
      })
      .def("rate_at", [](const ArrivalRealization& a, double t) { return arrival_rate_at(a, t); });

  py::class_<ServiceConfig>(m, "ServiceConfig")
      .def(py::init([](double beta_max, double ramp_rate, double cycle_length) {
             return ServiceConfig{beta_max, ramp_rate, cycle_length};
           }),
           py::arg("beta_max") = 5.0, py::arg("ramp_rate") = 62.0, py::arg("cycle_length") = 1.0)
      .def_readwrite("beta_max", &ServiceConfig::beta_max)
      .def_readwrite("ramp_rate", &ServiceConfig::ramp_rate)
      .def_readwrite("cycle_length", &ServiceConfig::cycle_length);

  m.def("generate_arrival", &generate_arrival, py::arg("cfg"), py::arg("horizon"), py::arg("seed"));
  m.def("service_rate", &service_rate, py::arg("svc"), py::arg("theta"), py::arg("t"),
        py::arg("buffer_positive"));
}

void bind_sim(py::module_& m) {
  py::enum_<EventKind>(m, "EventKind")
      .value("RedStart", EventKind::RedStart)
      .value("GreenStart", EventKind::GreenStart)
      .value("BufferEmpty", EventKind::BufferEmpty)
      .value("BufferNonEmptyStart", EventKind::BufferNonEmptyStart)
      .value("RampSaturation", EventKind::RampSaturation)
      .value("ArrivalChange", EventKind::ArrivalChange)
      .value("Horizon", EventKind::Horizon);

  py::class_<PathEvent>(m, "PathEvent")
      .def_readonly("time", &PathEvent::time)
      .def_readonly("kind", &PathEvent::kind)
      .def_readonly("beta_left", &PathEvent::beta_left)
      .def_readonly("beta_right", &PathEvent::beta_right)
      .def_readonly("x_at", &PathEvent::x_at);

  py::class_<PathSegment>(m, "PathSegment")
      .def_readonly("t_start", &PathSegment::t_start)
      .def_readonly("t_end", &PathSegment::t_end)
      .def_readonly("x_start", &PathSegment::x_start)
      .def_readonly("x_end", &PathSegment::x_end)
      .def_readonly("alpha", &PathSegment::alpha)
      .def_readonly("beta_start", &PathSegment::beta_start)
      .def_readonly("beta_slope", &PathSegment::beta_slope)
      .def("x_at", &PathSegment::x_at);

  py::class_<SamplePath>(m, "SamplePath")
      .def_readonly("theta", &SamplePath::theta)
      .def_readonly("horizon", &SamplePath::horizon)
      .def_readonly("segments", &SamplePath::segments)
      .def_readonly("events", &SamplePath::events)
      .def_readonly("x_final", &SamplePath::x_final)
      .def("trace_csv", [](const SamplePath& p) {
        std::ostringstream out;
        write_trace_csv(out, p);
        return out.str();
      });

  m.def("simulate_control_cycle", &simulate_control_cycle, py::arg("theta"), py::arg("arrival"),
        py::arg("svc"), py::arg("light_cycles"), py::arg("x0") = 0.0);
  m.def("performance", &performance, py::arg("path"));

  py::class_<IpaResult>(m, "IpaResult")
      .def_readonly("L_prime", &IpaResult::L_prime)
      .def_readonly("per_period_contributions", &IpaResult::per_period_contributions)
      .def_readonly("boundary", &IpaResult::boundary)
      .def_readonly("x_prime_trace", &IpaResult::x_prime_trace);
  m.def("ipa_derivative", &ipa_derivative, py::arg("path"), py::arg("with_trace") = false);

  m.def("finite_difference", &finite_difference, py::arg("theta"), py::arg("h"), py::arg("arrival"),
        py::arg("svc"), py::arg("light_cycles"), py::arg("x0") = 0.0);
}

void bind_control(py::module_& m) {
  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("set_point", &ControllerConfig::set_point)
      .def_readwrite("theta_min", &ControllerConfig::theta_min)
      .def_readwrite("theta_max", &ControllerConfig::theta_max)
      .def_readwrite("derivative_floor", &ControllerConfig::derivative_floor)
      .def("set_constant_gain_error",
           [](ControllerConfig& c, double eps) { c.gain_error = ConstantGainError{eps}; });

  py::class_<CycleObservation>(m, "CycleObservation")
      .def_readonly("n", &CycleObservation::n)
      .def_readonly("theta", &CycleObservation::theta)
      .def_readonly("L", &CycleObservation::L)
      .def_readonly("L_prime", &CycleObservation::L_prime)
      .def_readonly("gain", &CycleObservation::gain)
      .def_readonly("error", &CycleObservation::error);

  m.def("gain", &gain, py::arg("g_prime"), py::arg("cfg"), py::arg("n") = 1);
  m.def(
      "regulate",
      [](const std::function<std::pair<double, double>(double, int)>& plant,
         const ControllerConfig& cfg, int n_cycles, double u_initial) {
        return regulate(
            [&](double u, int n) {
              const auto [y, g] = plant(u, n);
              return PlantResponse{y, g};
            },
            cfg, n_cycles, u_initial);
      },
      py::arg("plant"), py::arg("cfg"), py::arg("n_cycles"), py::arg("u_initial"),
      "Closed loop over a Python plant(u, n) -> (y, dy/du).");
}

void bind_harness(py::module_& m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("light_cycles", &ExperimentConfig::light_cycles)
      .def_readwrite("arrival", &ExperimentConfig::arrival)
      .def_readwrite("service", &ExperimentConfig::service)
      .def_readwrite("controller", &ExperimentConfig::controller)
      .def_readwrite("theta_initial", &ExperimentConfig::theta_initial)
      .def_readwrite("n_control_cycles", &ExperimentConfig::n_control_cycles)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("warm_start", &ExperimentConfig::warm_start)
      .def_property_readonly("horizon", &ExperimentConfig::horizon)
      .def("to_text", &to_config_text);

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("cycle_arrival", &cycle_arrival, py::arg("cfg"), py::arg("seed"), py::arg("n"));
  m.def("run_regulation", &run_regulation, py::arg("cfg"));
  m.def(
      "tail_mean",
      [](const std::vector<CycleObservation>& traj, int first_n) { return tail_mean(traj, first_n); },
      py::arg("trajectory"), py::arg("first_n") = 10);
  m.def(
      "trajectory_csv",
      [](const std::vector<CycleObservation>& traj) {
        std::ostringstream out;
        write_trajectory_csv(out, traj);
        return out.str();
      },
      py::arg("trajectory"));
}

}  // namespace

PYBIND11_MODULE(_trafficipa, m) {
  m.doc() = "Fluid-queue traffic light simulator with IPA-driven set-point regulation";
  bind_rate_processes(m);
  bind_sim(m);
  bind_control(m);
  bind_harness(m);
}
