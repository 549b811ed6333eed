#include "trafficipa/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "trafficipa/seeding.hpp"

namespace trafficipa {

namespace {

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  return out;
}

double alpha_right_at(const SamplePath& path, double t) {
  auto it = std::upper_bound(path.segments.begin(), path.segments.end(), t,
                             [](double v, const PathSegment& s) { return v < s.t_end; });
  if (it == path.segments.end()) return path.segments.back().alpha;
  return it->alpha;
}

}  // namespace

ArrivalRealization cycle_arrival(const ExperimentConfig& cfg, std::uint64_t seed, int n) {
  return generate_arrival(cfg.arrival, cfg.horizon(), cycle_seed(seed, static_cast<std::uint64_t>(n)));
}

CycleRun simulate_cycle(const ExperimentConfig& cfg, double theta, int n, double x0,
                        bool with_trace) {
  const auto arrival = cycle_arrival(cfg, cfg.seed, n);
  CycleRun run;
  run.path = simulate_control_cycle(theta, arrival, cfg.service, cfg.light_cycles, x0);
  run.L = performance(run.path);
  run.ipa = ipa_derivative(run.path, with_trace);
  return run;
}

std::vector<CycleObservation> run_regulation(const ExperimentConfig& cfg) {
  cfg.validate();
  double carry = 0.0;
  const Plant plant = [&](double theta, int n) {
    const double x0 = cfg.warm_start ? carry : 0.0;
    const auto arrival = cycle_arrival(cfg, cfg.seed, n);
    const auto path = simulate_control_cycle(theta, arrival, cfg.service, cfg.light_cycles, x0);
    carry = path.x_final;
    return PlantResponse{performance(path), ipa_derivative(path).L_prime};
  };
  return regulate(plant, cfg.controller, cfg.n_control_cycles, cfg.theta_initial);
}

std::optional<double> tail_mean(std::span<const CycleObservation> trajectory, int first_n) {
  double sum = 0.0;
  int count = 0;
  for (const auto& obs : trajectory) {
    if (obs.n < first_n) continue;
    sum += obs.L;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

ReplicationSummary replicate(const ExperimentConfig& cfg, int n_seeds, unsigned threads) {
  if (n_seeds < 1) throw std::invalid_argument("replicate needs at least one seed");
  ReplicationSummary summary;
  summary.seeds.resize(static_cast<std::size_t>(n_seeds));
  std::iota(summary.seeds.begin(), summary.seeds.end(), cfg.seed);
  summary.tail_means.assign(summary.seeds.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> worst_error(summary.seeds.size(), 0.0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < summary.seeds.size(); i = next++) {
      ExperimentConfig local = cfg;
      local.seed = summary.seeds[i];
      const auto traj = run_regulation(local);
      summary.tail_means[i] = tail_mean(traj).value_or(std::numeric_limits<double>::quiet_NaN());
      for (const auto& obs : traj) {
        if (obs.n >= 20) worst_error[i] = std::max(worst_error[i], std::abs(obs.error));
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_seeds));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  const double n = static_cast<double>(n_seeds);
  summary.mean_of_tail_means =
      std::accumulate(summary.tail_means.begin(), summary.tail_means.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : summary.tail_means) ss += (v - summary.mean_of_tail_means) * (v - summary.mean_of_tail_means);
  summary.stddev_of_tail_means = n_seeds > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  summary.max_abs_error_after_20 = *std::max_element(worst_error.begin(), worst_error.end());
  return summary;
}

void write_trajectory_csv(std::ostream& out, std::span<const CycleObservation> trajectory) {
  out << "n,theta,L,Lprime,gain,error\n";
  for (const auto& o : trajectory) {
    out << o.n << ',' << num(o.theta) << ',' << num(o.L) << ',' << num(o.L_prime) << ','
        << num(o.gain) << ',' << num(o.error) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const SamplePath& path) {
  out << "t,x,alpha,beta,event_kind\n";
  for (const auto& e : path.events) {
    out << num(e.time) << ',' << num(e.x_at) << ',' << num(alpha_right_at(path, e.time)) << ','
        << num(e.beta_right) << ',' << to_string(e.kind) << '\n';
  }
}

void write_fd_report_csv(std::ostream& out, const FdReport& report) {
  out << "theta,L,ipa,fd,abs_err,rel_err,flagged\n";
  for (std::size_t i = 0; i < report.theta_grid.size(); ++i) {
    out << num(report.theta_grid[i]) << ',' << num(report.L_values[i]) << ','
        << num(report.ipa_values[i]) << ',' << num(report.fd_values[i]) << ','
        << num(report.abs_errors[i]) << ',' << num(report.rel_errors[i]) << ','
        << (report.flagged[i] ? 1 : 0) << '\n';
  }
}

void write_line_chart_svg(const std::filesystem::path& file, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          std::span<const PlotSeries> series) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (double v : s.x) x_lo = std::min(x_lo, v), x_hi = std::max(x_hi, v);
    for (double v : s.y) y_lo = std::min(y_lo, v), y_hi = std::max(y_hi, v);
  }
  if (!(x_hi > x_lo)) x_lo -= 0.5, x_hi += 0.5;
  if (!(y_hi > y_lo)) y_lo -= 0.5, y_hi += 0.5;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y_lo) / (y_hi - y_lo)) * ph; };

  auto out = open_out(file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
        << num(std::round(xv * 1000) / 1000) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << num(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n";
    if (s.x.size() == 1) {
      out << "<circle cx=\"" << px(s.x[0]) << "\" cy=\"" << py(s.y[0]) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    out << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 16 + 16 * static_cast<double>(k)
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

namespace {

PlotSeries series_of(const std::string& label, std::span<const CycleObservation> traj, int first_n,
                     bool theta) {
  PlotSeries s{label, {}, {}};
  for (const auto& o : traj) {
    if (o.n < first_n) continue;
    s.x.push_back(o.n);
    s.y.push_back(theta ? o.theta : o.L);
  }
  return s;
}

void write_pair_csv(const std::filesystem::path& file, const std::string& header,
                    std::span<const CycleObservation> a, std::span<const CycleObservation> b,
                    int first_n, bool theta) {
  auto out = open_out(file);
  out << header << '\n';
  const std::size_t rows = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const int n = static_cast<int>(i) + 1;
    if (n < first_n) continue;
    out << n << ',';
    if (i < a.size()) out << num(theta ? a[i].theta : a[i].L);
    out << ',';
    if (i < b.size()) out << num(theta ? b[i].theta : b[i].L);
    out << '\n';
  }
}

std::string fmt_tail(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }

}  // namespace

FigureSummary reproduce_figures(const std::filesystem::path& config_dir,
                                const std::filesystem::path& out_dir) {
  const auto cfg03 = load_config(config_dir / "zeta03.cfg");
  const auto cfg01 = load_config(config_dir / "zeta01.cfg");
  const auto cfg03_low = load_config(config_dir / "zeta03_theta01.cfg");
  std::filesystem::create_directories(out_dir);

  FigureSummary fig;
  fig.zeta03 = run_regulation(cfg03);
  fig.zeta01 = run_regulation(cfg01);
  fig.zeta03_theta01 = run_regulation(cfg03_low);
  fig.tail_mean_zeta03 = tail_mean(fig.zeta03);
  fig.tail_mean_zeta01 = tail_mean(fig.zeta01);

  write_pair_csv(out_dir / "fig3.csv", "n,L_zeta03,L_zeta01", fig.zeta03, fig.zeta01, 1, false);
  write_pair_csv(out_dir / "fig4.csv", "n,L_zeta03,L_zeta01", fig.zeta03, fig.zeta01, 10, false);
  write_pair_csv(out_dir / "fig5.csv", "n,theta_from_0.9,theta_from_0.1", fig.zeta03,
                 fig.zeta03_theta01, 1, true);

  for (const int first_n : {1, 10}) {
    const PlotSeries s[] = {series_of("zeta = 0.3", fig.zeta03, first_n, false),
                            series_of("zeta = 0.1", fig.zeta01, first_n, false)};
    write_line_chart_svg(out_dir / (first_n == 1 ? "fig3.svg" : "fig4.svg"),
                         "Evolution of L_n, n >= " + std::to_string(first_n), "n", "L_n", s);
  }
  {
    const PlotSeries s[] = {series_of("theta_1 = 0.9", fig.zeta03, 1, true),
                            series_of("theta_1 = 0.1", fig.zeta03_theta01, 1, true)};
    write_line_chart_svg(out_dir / "fig5.svg", "Evolution of theta_n (zeta = 0.3)", "n", "theta_n", s);
  }

  auto summary = open_out(out_dir / "summary.txt");
  summary << "tail_mean_zeta03 = " << fmt_tail(fig.tail_mean_zeta03) << '\n'
          << "tail_mean_zeta01 = " << fmt_tail(fig.tail_mean_zeta01) << '\n'
          << "tail_window = n >= 10\n";
  return fig;
}

}  // namespace trafficipa
