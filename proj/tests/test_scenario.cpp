#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pca/errors.hpp"
#include "pca/scenario.hpp"
#include "pca/verify.hpp"

using namespace pca;

namespace {

ScenarioConfig short_vehicle_config(FilterMode mode) {
  ScenarioConfig cfg;
  cfg.name = "short";
  cfg.kind = "vehicles";
  cfg.dt = 1e-3;
  cfg.duration = 0.05;
  cfg.filter_mode = mode;
  cfg.cbf.kappa = 5.0;
  cfg.cbf.buffer_b = std::log(7.0);
  VehicleScenario vs;
  vs.shape_i = vehicle_triangle();
  vs.shape_j = vehicle_trapezoid();
  vs.initial_i = {-18.0, 0.0, -0.5 * M_PI};
  vs.initial_j = {14.0, 0.0, 0.5 * M_PI};
  vs.track_i = {18.0, 12.0, -0.8, -0.5 * M_PI};
  vs.track_j = {14.0, 9.0, 0.9, 0.5 * M_PI};
  cfg.vehicles = vs;
  return cfg;
}

ScenarioConfig short_crane_config(FilterMode mode) {
  ScenarioConfig cfg;
  cfg.name = "short-crane";
  cfg.kind = "crane";
  cfg.dt = 1e-3;
  cfg.duration = 0.05;
  cfg.filter_mode = mode;
  cfg.filter.alpha_gain = 3.0;
  cfg.cbf.kappa = 5.0;
  cfg.cbf.buffer_b = 8.0;
  CraneScenario cs;
  cs.container = crane_container();
  cs.obstacle = crane_obstacle();
  cs.initial << 0.0, 1.5, 0.0, 0.0, 0.0, 0.0;
  cs.target = {10.0, 1.5};
  cs.kp = Eigen::Vector2d(5.0, 10.0).asDiagonal();
  cs.kd = Eigen::Vector2d(7.0, 7.0).asDiagonal();
  cs.obstacle_center = {6.0, 0.5};
  cs.obstacle_velocity = {-0.1, 0.0};
  cfg.crane = cs;
  return cfg;
}

int count_fields(const std::string& line) {
  return static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("vehicle run logs every step with the declared columns") {
  const ScenarioConfig cfg = short_vehicle_config(FilterMode::kProposed);
  const RunResult r = run_scenario(cfg);
  CHECK(r.trajectory.steps.size() == 51);
  CHECK(r.trajectory.steps.front().t == 0.0);
  CHECK(r.trajectory.steps.back().t == doctest::Approx(0.05));

  const std::string csv = trajectory_csv(r.trajectory);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# trajectory-csv v1 kind=vehicles");
  std::getline(in, line);
  CHECK(count_fields(line) == static_cast<int>(r.trajectory.columns.size()));
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(count_fields(line) == static_cast<int>(r.trajectory.columns.size()));
    ++rows;
  }
  CHECK(rows == 51);

  CHECK(r.summary.barrier_eval_calls == 51);
  CHECK(r.summary.min_h_s > 0.0);  // far apart over this horizon
  CHECK(!r.summary.first_collision_t);
}

TEST_CASE("numbers in the csv round-trip exactly") {
  const ScenarioConfig cfg = short_vehicle_config(FilterMode::kProposed);
  const RunResult r = run_scenario(cfg);
  const std::string csv = trajectory_csv(r.trajectory);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);  // first data row (t = 0)
  std::stringstream fields(line);
  std::string cell;
  std::getline(fields, cell, ',');  // t
  std::getline(fields, cell, ',');  // xi_x
  CHECK(std::strtod(cell.c_str(), nullptr) == r.trajectory.steps[0].state_i(0));
  std::getline(fields, cell, ',');
  CHECK(std::strtod(cell.c_str(), nullptr) == r.trajectory.steps[0].state_i(1));
}

TEST_CASE("filter off leaves the nominal input untouched") {
  const RunResult r = run_scenario(short_vehicle_config(FilterMode::kOff));
  for (const TrajectoryStep& s : r.trajectory.steps) {
    CHECK((s.u_filtered.array() == s.u_nominal.array()).all());
    CHECK(!s.active[0]);
    CHECK(!s.active[1]);
  }
  CHECK(!r.summary.first_activation_t);
}

TEST_CASE("identical configs give identical bytes") {
  const ScenarioConfig cfg = short_vehicle_config(FilterMode::kProposed);
  CHECK(trajectory_csv(run_scenario(cfg).trajectory) ==
        trajectory_csv(run_scenario(cfg).trajectory));
}

TEST_CASE("baseline mode records failure events on overlap") {
  ScenarioConfig cfg = short_vehicle_config(FilterMode::kBaseline);
  cfg.baseline_density = 10;
  cfg.vehicles->initial_j = {-17.5, 0.5, 0.5 * M_PI};  // overlapping at t = 0
  const RunResult r = run_scenario(cfg);
  CHECK(r.summary.baseline_failure_count > 0);
  REQUIRE(r.summary.first_failure_t);
  CHECK(*r.summary.first_failure_t == 0.0);
  const TrajectoryStep& s0 = r.trajectory.steps.front();
  CHECK(s0.baseline_failure);
  CHECK(std::isnan(s0.h_baseline));
  CHECK((s0.u_filtered.array() == s0.u_nominal.array()).all());
  CHECK(s0.h_s < 0.0);
}

TEST_CASE("crane run logs the energy barrier") {
  const RunResult r = run_scenario(short_crane_config(FilterMode::kProposed));
  CHECK(r.trajectory.steps.size() == 51);
  const std::string csv = trajectory_csv(r.trajectory);
  CHECK(csv.rfind("# trajectory-csv v1 kind=crane", 0) == 0);
  for (const TrajectoryStep& s : r.trajectory.steps) {
    CHECK(std::isfinite(s.phi));
    CHECK(std::isfinite(s.h_hat));
    CHECK(s.state_i.size() == 6);
  }
  // Obstacle drifts with its constant velocity.
  const TrajectoryStep& last = r.trajectory.steps.back();
  CHECK(last.state_j(0) == doctest::Approx(6.0 - 0.1 * 0.05).epsilon(1e-12));
}

TEST_CASE("crane rejects the baseline filter") {
  CHECK_THROWS_AS(run_scenario(short_crane_config(FilterMode::kBaseline)),
                  ValidationError);
}

TEST_CASE("config loading") {
  const auto dir = std::filesystem::temp_directory_path() / "pca_cfg_test";
  std::filesystem::create_directories(dir / "shapes");
  {
    std::ofstream out(dir / "shapes" / "tri.json");
    out << R"({"vertices": [[3,0],[-2,-2.5],[-2,2.5]]})";
    std::ofstream out2(dir / "shapes" / "trap.json");
    out2 << R"({"vertices": [[1,1.5],[1,-1.5],[-1,-1],[-1,1]]})";
  }
  {
    std::ofstream out(dir / "veh.json");
    out << R"({
      "name": "veh", "kind": "vehicles", "dt": 0.002, "duration": 0.1,
      "filter": {"mode": "baseline", "baseline_density": 15, "alpha_gain": 4.0},
      "cbf": {"kappa": 2.5, "buffer_b": 0.5},
      "vehicles": {
        "shape_i": "shapes/tri.json", "shape_j": "shapes/trap.json",
        "initial_i": [-18, 0, -1.5707963267948966],
        "initial_j": [14, 0, 1.5707963267948966],
        "track_i": {"amp_x": 18, "amp_y": 12, "omega": -0.8, "phase": -1.5707963267948966},
        "track_j": {"amp_x": 14, "amp_y": 9, "omega": 0.9, "phase": 1.5707963267948966},
        "gain": [1, 1], "l_offset": 0.1
      }
    })";
  }

  const ScenarioConfig cfg = load_scenario((dir / "veh.json").string());
  CHECK(cfg.name == "veh");
  CHECK(cfg.dt == 0.002);
  CHECK(cfg.filter_mode == FilterMode::kBaseline);
  CHECK(cfg.baseline_density == 15);
  CHECK(cfg.filter.alpha_gain == 4.0);
  CHECK(cfg.cbf.kappa == 2.5);
  REQUIRE(cfg.vehicles);
  CHECK(cfg.vehicles->shape_i.vertices.size() == 3);  // relative path resolved
  CHECK(cfg.vehicles->l_offset == 0.1);

  CHECK_THROWS_AS(load_scenario("/nonexistent/cfg.json"), ValidationError);

  {
    std::ofstream out(dir / "bad_kind.json");
    out << R"({"kind": "boat"})";
  }
  CHECK_THROWS_AS(load_scenario((dir / "bad_kind.json").string()), ValidationError);

  {
    std::ofstream out(dir / "no_section.json");
    out << R"({"kind": "vehicles", "dt": 0.001})";
  }
  CHECK_THROWS_AS(load_scenario((dir / "no_section.json").string()), ValidationError);

  {
    std::ofstream out(dir / "bad_dt.json");
    out << R"({"kind": "vehicles", "dt": -0.5})";
  }
  CHECK_THROWS_AS(load_scenario((dir / "bad_dt.json").string()), ValidationError);
}

TEST_CASE("benchmark smoke test") {
  ScenarioConfig cfg = short_vehicle_config(FilterMode::kProposed);
  BenchConfig bc;
  bc.num_states = 20;
  bc.repeats = 2;
  bc.seed = 99;
  bc.position_range = 6.0;
  bc.methods = {"proposed", "baseline:5"};
  cfg.bench = bc;

  const BenchReport report = run_benchmark(cfg);
  REQUIRE(report.rows.size() == 2);
  for (const BenchRow& row : report.rows) {
    CHECK(row.states == 20);
    CHECK(row.repeats == 2);
    CHECK(row.mean_us > 0.0);
    CHECK(row.median_us > 0.0);
    CHECK(std::isfinite(row.checksum));
  }
  const std::string csv = bench_csv(report);
  CHECK(csv.rfind("# bench-csv v1", 0) == 0);
  CHECK(csv.find("proposed") != std::string::npos);
  CHECK(csv.find("baseline:5") != std::string::npos);
}

TEST_CASE("summary json carries the run configuration") {
  const ScenarioConfig cfg = short_vehicle_config(FilterMode::kProposed);
  const RunResult r = run_scenario(cfg);
  const std::string json = summary_json(r.summary, cfg);
  CHECK(json.find("\"kind\": \"vehicles\"") != std::string::npos);
  CHECK(json.find("\"mode\": \"proposed\"") != std::string::npos);
  CHECK(json.find("min_h_s") != std::string::npos);
  CHECK(json.find("barrier_eval") != std::string::npos);
}

TEST_CASE("write_file creates parent directories") {
  const auto dir = std::filesystem::temp_directory_path() / "pca_write_test" / "deep";
  std::filesystem::remove_all(dir.parent_path());
  write_file((dir / "x.txt").string(), "payload");
  std::ifstream in(dir / "x.txt");
  std::string content;
  std::getline(in, content);
  CHECK(content == "payload");
}
