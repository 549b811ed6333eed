#include "trafficipa/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace trafficipa {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    out = false;
    return true;
  }
  return false;
}

using Setter = std::function<bool(ExperimentConfig&, std::string_view)>;

template <typename T>
Setter number_setter(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view v) { return parse_number(v, c.*field); };
}

Setter double_setter(double& (*ref)(ExperimentConfig&)) {
  return [ref](ExperimentConfig& c, std::string_view v) { return parse_number(v, ref(c)); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"cycle_length", double_setter([](ExperimentConfig& c) -> double& { return c.service.cycle_length; })},
      {"light_cycles", number_setter(&ExperimentConfig::light_cycles)},
      {"alpha_mean", double_setter([](ExperimentConfig& c) -> double& { return c.arrival.mean_rate; })},
      {"zeta", double_setter([](ExperimentConfig& c) -> double& { return c.arrival.relative_spread; })},
      {"off_max", double_setter([](ExperimentConfig& c) -> double& { return c.arrival.off_max; })},
      {"on_max", double_setter([](ExperimentConfig& c) -> double& { return c.arrival.on_max; })},
      {"beta_max", double_setter([](ExperimentConfig& c) -> double& { return c.service.beta_max; })},
      {"ramp_rate", double_setter([](ExperimentConfig& c) -> double& { return c.service.ramp_rate; })},
      {"set_point", double_setter([](ExperimentConfig& c) -> double& { return c.controller.set_point; })},
      {"theta_min", double_setter([](ExperimentConfig& c) -> double& { return c.controller.theta_min; })},
      {"theta_max", double_setter([](ExperimentConfig& c) -> double& { return c.controller.theta_max; })},
      {"derivative_floor",
       double_setter([](ExperimentConfig& c) -> double& { return c.controller.derivative_floor; })},
      {"theta_initial", number_setter(&ExperimentConfig::theta_initial)},
      {"n_control_cycles", number_setter(&ExperimentConfig::n_control_cycles)},
      {"seed", number_setter(&ExperimentConfig::seed)},
      {"warm_start", [](ExperimentConfig& c, std::string_view v) { return parse_bool(v, c.warm_start); }},
  };
  return table;
}

void require(bool ok, std::string_view key, double value, std::string_view bound) {
  if (!ok) {
    std::ostringstream msg;
    msg << key << " = " << format_double(value) << " is invalid: " << bound;
    throw ConfigError(msg.str());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& a = arrival;
  const auto& s = service;
  const auto& c = controller;
  require(std::isfinite(s.cycle_length) && s.cycle_length > 0, "cycle_length", s.cycle_length, "must be > 0");
  require(light_cycles >= 1, "light_cycles", light_cycles, "must be >= 1");
  require(std::isfinite(a.mean_rate) && a.mean_rate > 0, "alpha_mean", a.mean_rate, "must be > 0");
  require(a.relative_spread >= 0 && a.relative_spread < 1, "zeta", a.relative_spread, "must lie in [0, 1)");
  require(std::isfinite(a.off_max) && a.off_max >= 0, "off_max", a.off_max, "must be >= 0");
  require(std::isfinite(a.on_max) && a.on_max > 0, "on_max", a.on_max, "must be > 0");
  require(std::isfinite(s.beta_max) && s.beta_max > 0, "beta_max", s.beta_max, "must be > 0");
  require(s.ramp_rate >= 0, "ramp_rate", s.ramp_rate, "must be >= 0 (inf allowed)");
  require(std::isfinite(c.set_point) && c.set_point > 0, "set_point", c.set_point, "must be > 0");
  require(c.theta_min >= 0 && c.theta_min < s.cycle_length, "theta_min", c.theta_min,
          "must lie in [0, cycle_length)");
  require(c.theta_max > c.theta_min && c.theta_max <= s.cycle_length, "theta_max", c.theta_max,
          "must lie in (theta_min, cycle_length]");
  require(std::isfinite(c.derivative_floor) && c.derivative_floor > 0, "derivative_floor",
          c.derivative_floor, "must be > 0");
  require(theta_initial >= c.theta_min && theta_initial <= c.theta_max, "theta_initial",
          theta_initial, "must lie in [theta_min, theta_max]");
  require(n_control_cycles >= 1, "n_control_cycles", n_control_cycles, "must be >= 1");
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  const auto& table = setters();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where() + "unknown key '" + std::string(key) + "'");
    if (!it->second(cfg, value)) {
      throw ConfigError(where() + "cannot parse value '" + std::string(value) + "' for key '" +
                        std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "cycle_length = " << format_double(cfg.service.cycle_length) << '\n'
      << "light_cycles = " << cfg.light_cycles << '\n'
      << "alpha_mean = " << format_double(cfg.arrival.mean_rate) << '\n'
      << "zeta = " << format_double(cfg.arrival.relative_spread) << '\n'
      << "off_max = " << format_double(cfg.arrival.off_max) << '\n'
      << "on_max = " << format_double(cfg.arrival.on_max) << '\n'
      << "beta_max = " << format_double(cfg.service.beta_max) << '\n'
      << "ramp_rate = " << format_double(cfg.service.ramp_rate) << '\n'
      << "set_point = " << format_double(cfg.controller.set_point) << '\n'
      << "theta_min = " << format_double(cfg.controller.theta_min) << '\n'
      << "theta_max = " << format_double(cfg.controller.theta_max) << '\n'
      << "derivative_floor = " << format_double(cfg.controller.derivative_floor) << '\n'
      << "theta_initial = " << format_double(cfg.theta_initial) << '\n'
      << "n_control_cycles = " << cfg.n_control_cycles << '\n'
      << "seed = " << cfg.seed << '\n'
      << "warm_start = " << (cfg.warm_start ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace trafficipa
