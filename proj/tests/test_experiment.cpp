#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "trafficipa/experiment.hpp"

using namespace trafficipa;
using Catch::Approx;

namespace {

const std::filesystem::path kConfigDir = TRAFFICIPA_CONFIG_DIR;

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("trajectory CSV is deterministic", "[experiment]") {
  ExperimentConfig cfg;
  cfg.n_control_cycles = 12;
  std::ostringstream a, b;
  write_trajectory_csv(a, run_regulation(cfg));
  write_trajectory_csv(b, run_regulation(cfg));
  const auto text = a.str();
  CHECK(text == b.str());
  CHECK(first_line(text) == "n,theta,L,Lprime,gain,error");
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);

  cfg.seed = 2;
  std::ostringstream c;
  write_trajectory_csv(c, run_regulation(cfg));
  CHECK(c.str() != text);
}

TEST_CASE("single control cycle runs open loop", "[experiment]") {
  ExperimentConfig cfg;
  cfg.n_control_cycles = 1;
  const auto traj = run_regulation(cfg);
  REQUIRE(traj.size() == 1);
  CHECK(traj[0].theta == cfg.theta_initial);
  CHECK(traj[0].L == Approx(simulate_cycle(cfg, cfg.theta_initial).L).margin(1e-15));
  CHECK_FALSE(tail_mean(traj).has_value());
}

TEST_CASE("trace and validation CSV headers", "[experiment]") {
  ExperimentConfig cfg;
  const auto run = simulate_cycle(cfg, 0.3);
  std::ostringstream trace;
  write_trace_csv(trace, run.path);
  CHECK(first_line(trace.str()) == "t,x,alpha,beta,event_kind");

  const auto arrival = cycle_arrival(cfg, cfg.seed, 1);
  const std::vector<double> grid{0.2, 0.4};
  std::ostringstream report;
  write_fd_report_csv(report, compare_ipa_fd(grid, 1e-6, arrival, cfg.service, cfg.light_cycles));
  CHECK(first_line(report.str()) == "theta,L,ipa,fd,abs_err,rel_err,flagged");
}

TEST_CASE("tail mean averages cycles from the window start", "[experiment]") {
  std::vector<CycleObservation> traj;
  for (int n = 1; n <= 12; ++n) traj.push_back({n, 0.5, n >= 10 ? 0.3 + 0.01 * (n - 10) : 9.0, 0, 0, 0});
  CHECK(*tail_mean(traj) == Approx(0.31));
  CHECK(*tail_mean(traj, 12) == Approx(0.32));
  CHECK_FALSE(tail_mean(traj, 13).has_value());
}

TEST_CASE("replication is independent of thread count", "[experiment]") {
  ExperimentConfig cfg;
  cfg.n_control_cycles = 15;
  const auto one = replicate(cfg, 4, 1);
  const auto many = replicate(cfg, 4, 4);
  CHECK(one.seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(one.tail_means == many.tail_means);
}

TEST_CASE("figure reproduction writes its outputs", "[experiment]") {
  const auto out = std::filesystem::temp_directory_path() / "trafficipa_fig_test";
  std::filesystem::remove_all(out);
  const auto summary = reproduce_figures(kConfigDir, out);
  for (const char* name : {"fig3.csv", "fig4.csv", "fig5.csv", "fig3.svg", "fig4.svg", "fig5.svg",
                           "summary.txt"}) {
    INFO(name);
    CHECK(std::filesystem::exists(out / name));
  }
  CHECK(first_line(slurp(out / "fig3.csv")) == "n,L_zeta03,L_zeta01");
  CHECK(first_line(slurp(out / "fig5.csv")) == "n,theta_from_0.9,theta_from_0.1");
  REQUIRE(summary.tail_mean_zeta03.has_value());
  CHECK(*summary.tail_mean_zeta03 == Approx(0.3).margin(0.05));
  CHECK(summary.zeta03.size() == 50);
  std::filesystem::remove_all(out);
}
