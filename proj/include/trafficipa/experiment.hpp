#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trafficipa/config.hpp"
#include "trafficipa/controller.hpp"
#include "trafficipa/hybrid_sim.hpp"
#include "trafficipa/ipa.hpp"
#include "trafficipa/oracle.hpp"

namespace trafficipa {

/// Arrival realization for control cycle n of a run seeded with `seed`.
ArrivalRealization cycle_arrival(const ExperimentConfig& cfg, std::uint64_t seed, int n);

struct CycleRun {
  SamplePath path;
  double L = 0.0;
  IpaResult ipa;
};

/// One open-loop control cycle at theta on the realization of cycle n.
CycleRun simulate_cycle(const ExperimentConfig& cfg, double theta, int n = 1, double x0 = 0.0,
                        bool with_trace = false);

/// Closed loop over cfg.n_control_cycles cycles, each on a fresh
/// realization; the buffer carries over between cycles when warm_start is set.
std::vector<CycleObservation> run_regulation(const ExperimentConfig& cfg);

/// Mean of L_n over n >= first_n, or nullopt when no such cycle exists.
std::optional<double> tail_mean(std::span<const CycleObservation> trajectory, int first_n = 10);

struct ReplicationSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> tail_means;
  double mean_of_tail_means = 0.0;
  double stddev_of_tail_means = 0.0;
  double max_abs_error_after_20 = 0.0;
};

/// Runs seeds cfg.seed, cfg.seed + 1, ... concurrently.
ReplicationSummary replicate(const ExperimentConfig& cfg, int n_seeds, unsigned threads = 0);

// CSV output. Numbers use shortest round-trip formatting, so identical
// inputs give byte-identical files.
void write_trajectory_csv(std::ostream& out, std::span<const CycleObservation> trajectory);
void write_trace_csv(std::ostream& out, const SamplePath& path);
void write_fd_report_csv(std::ostream& out, const FdReport& report);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart of one or more series.
void write_line_chart_svg(const std::filesystem::path& file, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          std::span<const PlotSeries> series);

struct FigureSummary {
  std::optional<double> tail_mean_zeta03;
  std::optional<double> tail_mean_zeta01;
  std::vector<CycleObservation> zeta03;
  std::vector<CycleObservation> zeta01;
  std::vector<CycleObservation> zeta03_theta01;
};

/// Reads zeta03.cfg, zeta01.cfg and zeta03_theta01.cfg from config_dir and
/// writes fig3/fig4/fig5 CSV + SVG files and summary.txt to out_dir.
FigureSummary reproduce_figures(const std::filesystem::path& config_dir,
                                const std::filesystem::path& out_dir);

}  // namespace trafficipa
