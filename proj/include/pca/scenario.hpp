#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pca/baseline.hpp"
#include "pca/cbf.hpp"
#include "pca/dynamics.hpp"
#include "pca/filter.hpp"
#include "pca/geometry.hpp"

namespace pca {

enum class FilterMode { kOff, kProposed, kBaseline };

std::string filter_mode_name(FilterMode mode, int baseline_density);

// Reference ellipse p_d(t) = (amp_x sin(omega t + phase), amp_y cos(omega t + phase)).
struct CircleTrack {
  double amp_x = 1.0;
  double amp_y = 1.0;
  double omega = 1.0;
  double phase = 0.0;

  Eigen::Vector2d position(double t) const;
  Eigen::Vector2d velocity(double t) const;
};

struct VehicleScenario {
  RigidPolygonShape shape_i, shape_j;
  Eigen::Vector3d initial_i{0, 0, 0}, initial_j{0, 0, 0};
  CircleTrack track_i, track_j;
  Eigen::Matrix2d gain = Eigen::Matrix2d::Identity();
  double l_offset = 0.1;
};

struct CraneScenario {
  RigidPolygonShape container, obstacle;
  CraneModel model;
  Vec6 initial = Vec6::Zero();
  Eigen::Vector2d target{0, 0};
  Eigen::Matrix2d kp = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d kd = Eigen::Matrix2d::Identity();
  double lambda = -0.01;
  Eigen::Vector2d obstacle_center{0, 0};
  Eigen::Vector2d obstacle_velocity{0, 0};
  Eigen::Vector2d qp_weight{1000.0, 2.0};  // diagonal of the crane QP weight
  double eta_gain = 500.0;
};

struct BenchConfig {
  int num_states = 1000;
  int repeats = 5;
  std::vector<std::string> methods;  // "proposed" or "baseline:<density>"
  unsigned long long seed = 2024;
  double position_range = 6.0;  // half-width of the pose sampling box
};

struct ScenarioConfig {
  std::string name = "unnamed";
  std::string kind = "vehicles";  // "vehicles" | "crane"
  double dt = 1e-3;
  double duration = 10.0;
  unsigned long long seed = 1;
  FilterMode filter_mode = FilterMode::kProposed;
  int baseline_density = 20;
  FilterConfig filter;
  CbfParams cbf;
  std::optional<VehicleScenario> vehicles;
  std::optional<CraneScenario> crane;
  std::optional<BenchConfig> bench;
};

// Parses a scenario JSON file; shape file paths are resolved relative to the
// config file's directory. Throws ValidationError on malformed input.
ScenarioConfig load_scenario(const std::string& path);

struct TrajectoryStep {
  double t = 0.0;
  Eigen::VectorXd state_i, state_j;
  Eigen::VectorXd u_nominal, u_filtered;
  double h_hat = 0.0, h_a = 0.0, h_s = 0.0;
  double h_baseline = 0.0;  // surrogate value in baseline mode, else NaN
  double phi = 0.0;         // crane energy barrier, NaN for vehicles
  std::vector<double> eta;
  std::vector<bool> active;
  bool epsilon_shifted = false;
  bool baseline_failure = false;
  bool degenerate_passthrough = false;
};

struct Trajectory {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<TrajectoryStep> steps;
};

struct RunSummary {
  std::string name, kind, filter_mode;
  double dt = 0.0, duration = 0.0;
  double min_h_s = 0.0, argmin_h_s_t = 0.0;
  double min_h_a = 0.0, argmin_h_a_t = 0.0;
  double min_h_hat = 0.0, argmin_h_hat_t = 0.0;
  std::optional<double> first_collision_t;   // first step with h_s < 0
  std::optional<double> first_activation_t;  // first step with an active filter
  std::optional<double> first_failure_t;     // first baseline failure event
  long baseline_failure_count = 0;
  long epsilon_shift_count = 0;
  long barrier_eval_calls = 0;
  double barrier_eval_total_s = 0.0;
  double barrier_eval_mean_s = 0.0;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

// Fixed-step closed-loop simulation. Polygon validity is re-checked every
// step; a violation aborts with a ValidationError naming the step. The
// logged barrier-evaluation time covers only value+gradient computation of
// whichever barrier drives the filter.
RunResult run_scenario(const ScenarioConfig& cfg);

std::string trajectory_csv(const Trajectory& traj);
std::string summary_json(const RunSummary& summary, const ScenarioConfig& cfg);
void write_file(const std::string& path, const std::string& content);

struct BenchRow {
  std::string method;
  int states = 0;
  int repeats = 0;
  double mean_us = 0.0;
  double median_us = 0.0;
  double checksum = 0.0;  // sum of barrier values, keeps the work observable
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Times value+gradient evaluation of each method over a shared set of
// strictly separated random pose pairs of the vehicle shapes.
BenchReport run_benchmark(const ScenarioConfig& cfg);

std::string bench_csv(const BenchReport& report);

}  // namespace pca
