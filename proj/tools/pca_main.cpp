// Command-line front end: closed-loop scenario runs, barrier benchmarks and
// the randomized property suite.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "pca/scenario.hpp"
#include "pca/verify.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::string out_dir;
  double dt = -1.0;
  double kappa = -1.0;
  double buffer = std::numeric_limits<double>::quiet_NaN();
  std::string filter;
};

void apply_overrides(pca::ScenarioConfig& cfg, const RunOptions& opt) {
  if (opt.dt > 0.0) cfg.dt = opt.dt;
  if (opt.kappa > 0.0) cfg.cbf.kappa = opt.kappa;
  if (!std::isnan(opt.buffer)) cfg.cbf.buffer_b = opt.buffer;
  if (!opt.filter.empty()) {
    if (opt.filter == "off") {
      cfg.filter_mode = pca::FilterMode::kOff;
    } else if (opt.filter == "proposed") {
      cfg.filter_mode = pca::FilterMode::kProposed;
    } else if (opt.filter.rfind("baseline", 0) == 0) {
      cfg.filter_mode = pca::FilterMode::kBaseline;
      if (opt.filter.size() > 9 && opt.filter[8] == ':')
        cfg.baseline_density = std::stoi(opt.filter.substr(9));
    } else {
      throw pca::ValidationError("unknown --filter value: " + opt.filter);
    }
  }
}

std::string default_out(const std::string& name) { return "out/" + name; }

int cmd_run(const RunOptions& opt) {
  pca::ScenarioConfig cfg = pca::load_scenario(opt.config);
  apply_overrides(cfg, opt);
  const std::string dir = opt.out_dir.empty() ? default_out(cfg.name) : opt.out_dir;

  const pca::RunResult result = pca::run_scenario(cfg);
  pca::write_file(dir + "/trajectory.csv", pca::trajectory_csv(result.trajectory));
  pca::write_file(dir + "/summary.json", pca::summary_json(result.summary, cfg));

  const pca::RunSummary& s = result.summary;
  std::printf("%s [%s, filter=%s] %.3fs @ dt=%g\n", s.name.c_str(), s.kind.c_str(),
              s.filter_mode.c_str(), s.duration, s.dt);
  std::printf("  min h_s   = %+.6f at t=%.3f\n", s.min_h_s, s.argmin_h_s_t);
  std::printf("  min h_hat = %+.6f at t=%.3f\n", s.min_h_hat, s.argmin_h_hat_t);
  if (s.first_collision_t) std::printf("  first collision    t=%.3f\n", *s.first_collision_t);
  if (s.first_activation_t)
    std::printf("  first activation   t=%.3f\n", *s.first_activation_t);
  if (s.first_failure_t)
    std::printf("  first failure      t=%.3f (%ld events)\n", *s.first_failure_t,
                s.baseline_failure_count);
  std::printf("  barrier eval: %ld calls, %.2f us mean\n", s.barrier_eval_calls,
              1e6 * s.barrier_eval_mean_s);
  std::printf("  wrote %s/{trajectory.csv,summary.json}\n", dir.c_str());
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  const pca::ScenarioConfig cfg = pca::load_scenario(config_path);
  const std::string dir = out_dir.empty() ? default_out(cfg.name) : out_dir;
  const pca::BenchReport report = pca::run_benchmark(cfg);
  pca::write_file(dir + "/bench.csv", pca::bench_csv(report));
  std::printf("%-14s %8s %8s %12s %12s\n", "method", "states", "repeats", "mean_us",
              "median_us");
  for (const pca::BenchRow& r : report.rows)
    std::printf("%-14s %8d %8d %12.3f %12.3f\n", r.method.c_str(), r.states, r.repeats,
                r.mean_us, r.median_us);
  std::printf("wrote %s/bench.csv\n", dir.c_str());
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::vector<long>& counts,
               const std::string& out_dir) {
  pca::VerifyCounts vc;
  if (!counts.empty()) {
    if (counts.size() != 4)
      throw pca::ValidationError("--counts needs 4 values: poses,shapes,gradients,filters");
    vc.poses = counts[0];
    vc.shapes = counts[1];
    vc.gradients = counts[2];
    vc.filters = counts[3];
  }
  const pca::PropertyReport report = pca::run_property_suite(seed, vc);
  for (const pca::CheckResult& c : report.checks) {
    std::printf("%-32s %s  trials=%-6ld worst=%10.3e tol=%10.3e%s%s\n", c.name.c_str(),
                c.passed ? "PASS" : "FAIL", c.trials, c.worst, c.tolerance,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  }
  if (!out_dir.empty())
    pca::write_file(out_dir + "/verify.json", pca::verify_json(report, seed));
  std::printf("%s (seed %llu)\n", report.all_passed() ? "all checks passed" : "FAILURES",
              static_cast<unsigned long long>(seed));
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal collision avoidance: smooth barrier, filters, scenarios"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario config");
  run->add_option("config", run_opt.config, "scenario config (json)")->required();
  run->add_option("--out", run_opt.out_dir, "output directory (default out/<name>)");
  run->add_option("--dt", run_opt.dt, "override integrator step");
  run->add_option("--kappa", run_opt.kappa, "override smoothing sharpness");
  run->add_option("--buffer", run_opt.buffer, "override buffer term b");
  run->add_option("--filter", run_opt.filter, "off | proposed | baseline:<density>");

  std::string bench_config, bench_out;
  CLI::App* bench = app.add_subcommand("bench", "time barrier evaluations");
  bench->add_option("config", bench_config, "config with a bench section")->required();
  bench->add_option("--out", bench_out, "output directory (default out/<name>)");

  std::uint64_t seed = 7;
  std::vector<long> counts;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run the randomized property suite");
  verify->add_option("--seed", seed, "rng seed");
  verify->add_option("--counts", counts,
                     "trial counts: poses,shapes,gradients,filters")->delimiter(',');
  verify->add_option("--out", verify_out, "directory for verify.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (bench->parsed()) return cmd_bench(bench_config, bench_out);
    if (verify->parsed()) return cmd_verify(seed, counts, verify_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
