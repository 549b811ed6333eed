// Command-line front end: open-loop simulation, closed-loop regulation,
// derivative validation, figure reproduction and seed replication.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trafficipa/config.hpp"
#include "trafficipa/experiment.hpp"
#include "trafficipa/oracle.hpp"

#ifndef TRAFFICIPA_CONFIG_DIR
#define TRAFFICIPA_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace trafficipa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

ExperimentConfig load_with_overrides(const std::string& path, const GlobalOptions& global) {
  auto cfg = load_config(path);
  if (global.seed) cfg.seed = *global.seed;
  return cfg;
}

std::ofstream open_file(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  return out;
}

struct GridSpec {
  double a = 0.0;
  double b = 0.0;
  int steps = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.a, &g.b, &g.steps, &tail) != 3 || g.steps < 1) {
    throw ConfigError("--grid expects a:b:steps, got '" + text + "'");
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic-light fluid queue: IPA-driven set-point regulation"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
  app.add_flag("--quiet", global.quiet, "Suppress informational output");

  std::string config_path;
  double theta = 0.0;
  std::string trace_path;
  auto* sim = app.add_subcommand("simulate", "One open-loop control cycle; prints L and L'");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--theta", theta, "Red duration")->required();
  sim->add_option("--trace", trace_path, "Write the sample-path event trace CSV here");

  std::string out_dir = ".";
  auto* reg = app.add_subcommand("regulate", "Closed-loop run; writes trajectory.csv");
  reg->add_option("--config", config_path, "Config file")->required();
  reg->add_option("--out", out_dir, "Output directory");

  std::string grid_text;
  std::string report_path;
  double fd_step = 1e-6;
  auto* val = app.add_subcommand("validate-ipa", "Compare IPA with central finite differences");
  val->add_option("--config", config_path, "Config file")->required();
  val->add_option("--grid", grid_text, "theta grid as a:b:steps")->required();
  val->add_option("--step", fd_step, "Finite-difference step h");
  val->add_option("--out", report_path, "Report CSV (default: standard output)");

  std::string fig_out = "figures";
  std::string config_dir = TRAFFICIPA_CONFIG_DIR;
  auto* fig = app.add_subcommand("reproduce-figures", "Regenerate the reference figure data");
  fig->add_option("--out", fig_out, "Output directory");
  fig->add_option("--config-dir", config_dir, "Directory holding the bundled configs");

  int n_seeds = 20;
  unsigned threads = 0;
  auto* rep = app.add_subcommand("replicate", "Independent regulation runs over several seeds");
  rep->add_option("--config", config_path, "Config file")->required();
  rep->add_option("--seeds", n_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  rep->add_option("--threads", threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (*seed_opt) global.seed = seed_value;
  auto info = [&](const std::string& line) {
    if (!global.quiet) std::cout << line << '\n';
  };

  try {
    if (*sim) {
      const auto cfg = load_with_overrides(config_path, global);
      const auto run = simulate_cycle(cfg, theta);
      std::cout << "L = " << run.L << "\nLprime = " << run.ipa.L_prime << '\n';
      if (!trace_path.empty()) {
        auto out = open_file(trace_path);
        write_trace_csv(out, run.path);
        info("trace written to " + trace_path);
      }
      return kExitOk;
    }

    if (*reg) {
      const auto cfg = load_with_overrides(config_path, global);
      const auto traj = run_regulation(cfg);
      const fs::path file = fs::path(out_dir) / "trajectory.csv";
      auto out = open_file(file);
      write_trajectory_csv(out, traj);
      const auto tail = tail_mean(traj);
      info("trajectory written to " + file.string());
      if (tail) info("tail mean (n >= 10) = " + std::to_string(*tail));
      return kExitOk;
    }

    if (*val) {
      const auto cfg = load_with_overrides(config_path, global);
      const auto g = parse_grid(grid_text);
      const auto grid = linear_grid(g.a, g.b, g.steps);
      const auto arrival = cycle_arrival(cfg, cfg.seed, 1);
      const auto report = compare_ipa_fd(grid, fd_step, arrival, cfg.service, cfg.light_cycles);
      if (report_path.empty()) {
        write_fd_report_csv(std::cout, report);
      } else {
        auto out = open_file(report_path);
        write_fd_report_csv(out, report);
      }
      const double worst = report.max_unflagged_rel_error();
      if (worst > 0.01) {
        std::cerr << "IPA/FD mismatch: max unflagged relative error " << worst << '\n';
        return kExitValidation;
      }
      if (!global.quiet) std::cerr << "max unflagged relative error " << worst << '\n';
      return kExitOk;
    }

    if (*fig) {
      const auto summary = reproduce_figures(config_dir, fig_out);
      if (summary.tail_mean_zeta03) info("tail mean zeta=0.3: " + std::to_string(*summary.tail_mean_zeta03));
      if (summary.tail_mean_zeta01) info("tail mean zeta=0.1: " + std::to_string(*summary.tail_mean_zeta01));
      info("figures written to " + fig_out);
      return kExitOk;
    }

    if (*rep) {
      const auto cfg = load_with_overrides(config_path, global);
      const auto summary = replicate(cfg, n_seeds, threads);
      std::cout << "seed,tail_mean\n";
      for (std::size_t i = 0; i < summary.seeds.size(); ++i) {
        std::cout << summary.seeds[i] << ',' << summary.tail_means[i] << '\n';
      }
      info("mean of tail means = " + std::to_string(summary.mean_of_tail_means));
      info("std of tail means = " + std::to_string(summary.stddev_of_tail_means));
      info("max |e_n| for n >= 20 = " + std::to_string(summary.max_abs_error_after_20));
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
