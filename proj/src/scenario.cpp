#include "pca/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numeric>
#include <random>

#include "pca/sdf.hpp"

namespace pca {

using nlohmann::json;

std::string filter_mode_name(FilterMode mode, int baseline_density) {
  switch (mode) {
    case FilterMode::kOff:
      return "off";
    case FilterMode::kProposed:
      return "proposed";
    case FilterMode::kBaseline:
      return "baseline:" + std::to_string(baseline_density);
  }
  return "?";
}

Eigen::Vector2d CircleTrack::position(double t) const {
  return {amp_x * std::sin(omega * t + phase), amp_y * std::cos(omega * t + phase)};
}

Eigen::Vector2d CircleTrack::velocity(double t) const {
  return {amp_x * omega * std::cos(omega * t + phase),
          -amp_y * omega * std::sin(omega * t + phase)};
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

double require_number(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError("config: missing numeric field \"" + key + "\" in " + ctx);
  return j[key].get<double>();
}

Eigen::Vector2d vec2_field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
    throw ValidationError("config: field \"" + key + "\" in " + ctx + " must be [x, y]");
  return {j[key][0].get<double>(), j[key][1].get<double>()};
}

Eigen::Vector3d vec3_field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
    throw ValidationError("config: field \"" + key + "\" in " + ctx + " must be [x, y, z]");
  return {j[key][0].get<double>(), j[key][1].get<double>(), j[key][2].get<double>()};
}

CircleTrack parse_track(const json& j, const std::string& ctx) {
  CircleTrack t;
  t.amp_x = require_number(j, "amp_x", ctx);
  t.amp_y = require_number(j, "amp_y", ctx);
  t.omega = require_number(j, "omega", ctx);
  t.phase = require_number(j, "phase", ctx);
  return t;
}

std::string resolve_path(const std::string& config_path, const std::string& rel) {
  const std::filesystem::path p(rel);
  if (p.is_absolute()) return rel;
  return (std::filesystem::path(config_path).parent_path() / p).string();
}

FilterMode parse_mode(const std::string& mode, int* baseline_density) {
  if (mode == "off") return FilterMode::kOff;
  if (mode == "proposed") return FilterMode::kProposed;
  if (mode.rfind("baseline", 0) == 0) {
    if (mode.size() > 9 && mode[8] == ':') *baseline_density = std::stoi(mode.substr(9));
    return FilterMode::kBaseline;
  }
  throw ValidationError("config: unknown filter mode \"" + mode + "\"");
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }

  ScenarioConfig cfg;
  cfg.name = doc.value("name", std::filesystem::path(path).stem().string());
  cfg.kind = doc.value("kind", "vehicles");
  if (cfg.kind != "vehicles" && cfg.kind != "crane")
    throw ValidationError("config: kind must be \"vehicles\" or \"crane\"");
  cfg.dt = doc.value("dt", 1e-3);
  cfg.duration = doc.value("duration", 10.0);
  cfg.seed = doc.value("seed", 1ULL);
  if (!(cfg.dt > 0.0)) throw ValidationError("config: dt must be positive");
  if (!(cfg.duration > 0.0)) throw ValidationError("config: duration must be positive");

  if (doc.contains("filter")) {
    const json& f = doc["filter"];
    cfg.filter_mode = parse_mode(f.value("mode", "proposed"), &cfg.baseline_density);
    if (f.contains("baseline_density")) cfg.baseline_density = f["baseline_density"].get<int>();
    cfg.filter.alpha_gain = f.value("alpha_gain", cfg.filter.alpha_gain);
    cfg.filter.epsilon = f.value("epsilon", cfg.filter.epsilon);
  }
  if (doc.contains("cbf")) {
    const json& c = doc["cbf"];
    cfg.cbf.kappa = c.value("kappa", cfg.cbf.kappa);
    cfg.cbf.buffer_b = c.value("buffer_b", cfg.cbf.buffer_b);
    cfg.cbf.epsilon = c.value("epsilon", cfg.cbf.epsilon);
  }

  if (cfg.kind == "vehicles") {
    if (!doc.contains("vehicles"))
      throw ValidationError("config: kind \"vehicles\" needs a \"vehicles\" section");
    const json& v = doc["vehicles"];
    VehicleScenario vs;
    vs.shape_i = load_shape(resolve_path(path, v.at("shape_i").get<std::string>()));
    vs.shape_j = load_shape(resolve_path(path, v.at("shape_j").get<std::string>()));
    vs.initial_i = vec3_field(v, "initial_i", "vehicles");
    vs.initial_j = vec3_field(v, "initial_j", "vehicles");
    vs.track_i = parse_track(v.at("track_i"), "vehicles.track_i");
    vs.track_j = parse_track(v.at("track_j"), "vehicles.track_j");
    const Eigen::Vector2d k = vec2_field(v, "gain", "vehicles");
    vs.gain = k.asDiagonal();
    vs.l_offset = require_number(v, "l_offset", "vehicles");
    cfg.vehicles = std::move(vs);
  } else {
    if (!doc.contains("crane"))
      throw ValidationError("config: kind \"crane\" needs a \"crane\" section");
    const json& c = doc["crane"];
    CraneScenario cs;
    cs.container = load_shape(resolve_path(path, c.at("shape_i").get<std::string>()));
    cs.obstacle = load_shape(resolve_path(path, c.at("shape_j").get<std::string>()));
    if (c.contains("model")) {
      const json& m = c["model"];
      cs.model.cart_mass = m.value("cart_mass", cs.model.cart_mass);
      cs.model.load_mass = m.value("load_mass", cs.model.load_mass);
      cs.model.gravity = m.value("gravity", cs.model.gravity);
      cs.model.rope_length = m.value("rope_length", cs.model.rope_length);
    }
    const Eigen::Vector3d q = vec3_field(c, "initial_q", "crane");
    const Eigen::Vector3d qd = vec3_field(c, "initial_q_dot", "crane");
    cs.initial << q, qd;
    cs.target = vec2_field(c, "target", "crane");
    cs.kp = Eigen::Vector2d(vec2_field(c, "kp", "crane")).asDiagonal();
    cs.kd = Eigen::Vector2d(vec2_field(c, "kd", "crane")).asDiagonal();
    cs.lambda = require_number(c, "lambda", "crane");
    cs.obstacle_center = vec2_field(c, "obstacle_center", "crane");
    cs.obstacle_velocity = vec2_field(c, "obstacle_velocity", "crane");
    if (c.contains("qp_weight")) cs.qp_weight = vec2_field(c, "qp_weight", "crane");
    cs.eta_gain = c.value("eta_gain", cs.eta_gain);
    cfg.crane = std::move(cs);
  }

  if (doc.contains("bench")) {
    const json& b = doc["bench"];
    BenchConfig bc;
    bc.num_states = b.value("num_states", bc.num_states);
    bc.repeats = b.value("repeats", bc.repeats);
    bc.seed = b.value("seed", bc.seed);
    bc.position_range = b.value("position_range", bc.position_range);
    if (b.contains("methods"))
      for (const auto& m : b["methods"]) bc.methods.push_back(m.get<std::string>());
    cfg.bench = std::move(bc);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

struct EvalTimer {
  long calls = 0;
  double total_s = 0.0;
  Clock::time_point mark;

  void start() { mark = Clock::now(); }
  void stop() {
    total_s += std::chrono::duration<double>(Clock::now() - mark).count();
    ++calls;
  }
};

void update_summary_minima(RunSummary& s, const TrajectoryStep& step, bool filtered) {
  if (step.h_s < s.min_h_s) {
    s.min_h_s = step.h_s;
    s.argmin_h_s_t = step.t;
  }
  if (step.h_a < s.min_h_a) {
    s.min_h_a = step.h_a;
    s.argmin_h_a_t = step.t;
  }
  if (step.h_hat < s.min_h_hat) {
    s.min_h_hat = step.h_hat;
    s.argmin_h_hat_t = step.t;
  }
  if (step.h_s < 0.0 && !s.first_collision_t) s.first_collision_t = step.t;
  const bool any_active =
      std::any_of(step.active.begin(), step.active.end(), [](bool a) { return a; });
  if (filtered && any_active && !s.first_activation_t) s.first_activation_t = step.t;
  if (step.baseline_failure) {
    ++s.baseline_failure_count;
    if (!s.first_failure_t) s.first_failure_t = step.t;
  }
  if (step.epsilon_shifted) ++s.epsilon_shift_count;
}

RunSummary init_summary(const ScenarioConfig& cfg) {
  RunSummary s;
  s.name = cfg.name;
  s.kind = cfg.kind;
  s.filter_mode = filter_mode_name(cfg.filter_mode, cfg.baseline_density);
  s.dt = cfg.dt;
  s.duration = cfg.duration;
  s.min_h_s = s.min_h_a = s.min_h_hat = std::numeric_limits<double>::infinity();
  return s;
}

const std::vector<std::string> kVehicleColumns = {
    "t",    "xi_x", "xi_y",  "xi_theta", "xj_x",  "xj_y",  "xj_theta",   "u0i_v",
    "u0i_w", "u0j_v", "u0j_w", "ui_v",     "ui_w",  "uj_v",  "uj_w",       "h_hat",
    "h_a",  "h_s",  "h_baseline", "eta_i", "eta_j", "active_i", "active_j",
    "eps_shift", "baseline_fail"};

const std::vector<std::string> kCraneColumns = {
    "t",   "y",   "z",   "theta", "y_dot", "z_dot", "theta_dot", "obs_x", "obs_y", "u0_y",
    "u0_z", "u_y", "u_z", "h_hat", "h_a",   "h_s",   "phi",       "eta",   "active",
    "degenerate"};

RunResult run_vehicles(const ScenarioConfig& cfg) {
  const VehicleScenario& sc = *cfg.vehicles;
  const long n_steps = std::lround(cfg.duration / cfg.dt);

  RunResult out;
  out.trajectory.kind = cfg.kind;
  out.trajectory.columns = kVehicleColumns;
  out.trajectory.steps.reserve(n_steps + 1);
  out.summary = init_summary(cfg);
  EvalTimer timer;

  const BaselineConfig baseline_cfg{cfg.baseline_density};
  Eigen::Vector3d xi = sc.initial_i;
  Eigen::Vector3d xj = sc.initial_j;

  for (long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const PlanarPose pose_i{xi.head<2>(), xi(2)};
    const PlanarPose pose_j{xj.head<2>(), xj(2)};

    TrajectoryStep step;
    step.t = t;
    step.h_baseline = kNan;
    step.phi = kNan;

    try {
      // Proposed barrier: timed only when it drives the filter.
      const bool proposed_drives = cfg.filter_mode != FilterMode::kBaseline;
      if (proposed_drives) timer.start();
      const PosedPolygon body_i = posed_polygon(sc.shape_i, pose_i);
      const PosedPolygon body_j = posed_polygon(sc.shape_j, pose_j);
      const ComponentTable table = component_table(body_i, body_j);
      const BarrierEval barrier = smooth_h(table, cfg.cbf);
      if (proposed_drives) timer.stop();

      step.h_hat = barrier.value;
      step.h_a = h_a(table);
      step.h_s = signed_distance(body_i.polygon, body_j.polygon).value;

      const Eigen::Vector2d u0_i = unicycle_tracking_controller(
          xi, sc.track_i.position(t), sc.track_i.velocity(t), sc.gain, sc.l_offset);
      const Eigen::Vector2d u0_j = unicycle_tracking_controller(
          xj, sc.track_j.position(t), sc.track_j.velocity(t), sc.gain, sc.l_offset);
      step.u_nominal.resize(4);
      step.u_nominal << u0_i, u0_j;

      const Eigen::Vector3d f = Eigen::Vector3d::Zero();
      Eigen::Matrix<double, 3, 2> gi, gj;
      gi << std::cos(xi(2)), 0, std::sin(xi(2)), 0, 0, 1;
      gj << std::cos(xj(2)), 0, std::sin(xj(2)), 0, 0, 1;

      switch (cfg.filter_mode) {
        case FilterMode::kOff:
          step.u_filtered = step.u_nominal;
          step.eta = {0.0, 0.0};
          step.active = {false, false};
          break;
        case FilterMode::kProposed: {
          const FilterResult res =
              filter_control_affine(f, f, gi, gj, u0_i, u0_j, barrier, cfg.filter);
          step.u_filtered = res.u_star;
          step.eta = res.eta;
          step.active = res.active;
          step.epsilon_shifted = res.epsilon_shifted;
          break;
        }
        case FilterMode::kBaseline: {
          timer.start();
          BaselineEval eval;
          bool overlapped = false;
          try {
            eval = baseline_h_and_gradient(sc.shape_i, pose_i, sc.shape_j, pose_j,
                                           baseline_cfg);
          } catch (const OverlapError&) {
            overlapped = true;
          }
          timer.stop();
          if (overlapped) {
            step.baseline_failure = true;
            step.u_filtered = step.u_nominal;
            step.eta = {0.0, 0.0};
            step.active = {false, false};
          } else {
            step.h_baseline = eval.value;
            BarrierEval sig;
            sig.value = eval.value;
            sig.grad_i = eval.grad_i;
            sig.grad_j = eval.grad_j;
            const FilterResult res =
                filter_control_affine(f, f, gi, gj, u0_i, u0_j, sig, cfg.filter);
            step.u_filtered = res.u_star;
            step.eta = res.eta;
            step.active = res.active;
            step.epsilon_shifted = res.epsilon_shifted;
          }
          break;
        }
      }
    } catch (const ValidationError& e) {
      throw ValidationError("step " + std::to_string(k) + " (t=" + std::to_string(t) +
                            "): " + e.what());
    }

    step.state_i = xi;
    step.state_j = xj;
    update_summary_minima(out.summary, step, cfg.filter_mode != FilterMode::kOff);
    out.trajectory.steps.push_back(step);

    if (k < n_steps) {
      const Eigen::Vector2d ui = step.u_filtered.head<2>();
      const Eigen::Vector2d uj = step.u_filtered.tail<2>();
      xi = rk4_step(unicycle_derivative, xi, ui, cfg.dt);
      xj = rk4_step(unicycle_derivative, xj, uj, cfg.dt);
    }
  }

  out.summary.barrier_eval_calls = timer.calls;
  out.summary.barrier_eval_total_s = timer.total_s;
  out.summary.barrier_eval_mean_s = timer.calls ? timer.total_s / timer.calls : 0.0;
  return out;
}

RunResult run_crane(const ScenarioConfig& cfg) {
  if (cfg.filter_mode == FilterMode::kBaseline)
    throw ValidationError("config: the baseline filter is only wired for the vehicle scenario");
  const CraneScenario& sc = *cfg.crane;
  const long n_steps = std::lround(cfg.duration / cfg.dt);

  RunResult out;
  out.trajectory.kind = cfg.kind;
  out.trajectory.columns = kCraneColumns;
  out.trajectory.steps.reserve(n_steps + 1);
  out.summary = init_summary(cfg);
  EvalTimer timer;

  CraneQpConfig qp;
  qp.weight = Eigen::Vector2d(sc.qp_weight).asDiagonal();
  qp.alpha_gain = cfg.filter.alpha_gain;
  qp.eta_gain = sc.eta_gain;
  qp.cbf = cfg.cbf;

  Vec6 x = sc.initial;

  for (long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const Eigen::Vector2d obs_center = sc.obstacle_center + t * sc.obstacle_velocity;

    TrajectoryStep step;
    step.t = t;
    step.h_baseline = kNan;

    try {
      const Eigen::Vector3d p = crane_transformed_position(x, sc.model);
      const Eigen::Vector3d p_dot = crane_transformed_velocity(x, sc.model);

      timer.start();
      const ConvexPolygon poly_i =
          polygon_from_pose(sc.container, PlanarPose{p.head<2>(), 0.0});
      const ConvexPolygon poly_j =
          polygon_from_pose(sc.obstacle, PlanarPose{obs_center, 0.0});
      const PosedPolygon body_i{poly_i, translation_jacobians(poly_i)};
      const PosedPolygon body_j{poly_j, translation_jacobians(poly_j)};
      const ComponentTable table = component_table(body_i, body_j);
      const BarrierEval barrier = smooth_h(table, qp.cbf);
      timer.stop();

      step.h_hat = barrier.value;
      step.h_a = h_a(table);
      step.h_s = signed_distance(poly_i, poly_j).value;
      step.phi =
          crane_energy_barrier(barrier.value, p_dot, qp.eta_gain, sc.model.mass_matrix(p(2)));

      const Eigen::Vector2d u0 =
          crane_pd_controller(x, sc.target, sc.kp, sc.kd, sc.lambda, sc.model);
      step.u_nominal = u0;

      if (cfg.filter_mode == FilterMode::kOff) {
        step.u_filtered = u0;
        step.eta = {0.0};
        step.active = {false};
      } else {
        const FilterResult res = filter_crane(u0, x, sc.model, sc.container, sc.obstacle,
                                              obs_center, sc.obstacle_velocity, qp);
        step.u_filtered = res.u_star;
        step.eta = res.eta;
        step.active = res.active;
        step.degenerate_passthrough = res.degenerate_passthrough;
      }
    } catch (const ValidationError& e) {
      throw ValidationError("step " + std::to_string(k) + " (t=" + std::to_string(t) +
                            "): " + e.what());
    }

    step.state_i = x;
    step.state_j = obs_center;
    update_summary_minima(out.summary, step, cfg.filter_mode != FilterMode::kOff);
    out.trajectory.steps.push_back(step);

    if (k < n_steps) {
      const Eigen::Vector2d u = step.u_filtered;
      x = rk4_step([&sc](const Vec6& s, const Eigen::Vector2d& in) {
        return crane_derivative(s, in, sc.model);
      }, x, u, cfg.dt);
    }
  }

  out.summary.barrier_eval_calls = timer.calls;
  out.summary.barrier_eval_total_s = timer.total_s;
  out.summary.barrier_eval_mean_s = timer.calls ? timer.total_s / timer.calls : 0.0;
  return out;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.kind == "vehicles") {
    if (!cfg.vehicles) throw ValidationError("config: missing vehicles section");
    return run_vehicles(cfg);
  }
  if (cfg.kind == "crane") {
    if (!cfg.crane) throw ValidationError("config: missing crane section");
    return run_crane(cfg);
  }
  throw ValidationError("config: unknown scenario kind \"" + cfg.kind + "\"");
}

// ---------------------------------------------------------------------------
// Output files

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_row(std::string& out, const std::vector<double>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += fmt(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "# trajectory-csv v1 kind=" + traj.kind + "\n";
  for (size_t i = 0; i < traj.columns.size(); ++i) {
    if (i) out += ',';
    out += traj.columns[i];
  }
  out += '\n';

  std::vector<double> row;
  for (const TrajectoryStep& s : traj.steps) {
    row.clear();
    if (traj.kind == "vehicles") {
      row = {s.t,
             s.state_i(0), s.state_i(1), s.state_i(2),
             s.state_j(0), s.state_j(1), s.state_j(2),
             s.u_nominal(0), s.u_nominal(1), s.u_nominal(2), s.u_nominal(3),
             s.u_filtered(0), s.u_filtered(1), s.u_filtered(2), s.u_filtered(3),
             s.h_hat, s.h_a, s.h_s, s.h_baseline,
             s.eta[0], s.eta[1],
             s.active[0] ? 1.0 : 0.0, s.active[1] ? 1.0 : 0.0,
             s.epsilon_shifted ? 1.0 : 0.0, s.baseline_failure ? 1.0 : 0.0};
    } else {
      row = {s.t,
             s.state_i(0), s.state_i(1), s.state_i(2),
             s.state_i(3), s.state_i(4), s.state_i(5),
             s.state_j(0), s.state_j(1),
             s.u_nominal(0), s.u_nominal(1),
             s.u_filtered(0), s.u_filtered(1),
             s.h_hat, s.h_a, s.h_s, s.phi,
             s.eta[0], s.active[0] ? 1.0 : 0.0,
             s.degenerate_passthrough ? 1.0 : 0.0};
    }
    append_row(out, row);
  }
  return out;
}

std::string summary_json(const RunSummary& s, const ScenarioConfig& cfg) {
  json j;
  j["config"] = {
      {"name", s.name},
      {"kind", s.kind},
      {"dt", s.dt},
      {"duration", s.duration},
      {"seed", cfg.seed},
      {"filter",
       {{"mode", s.filter_mode},
        {"alpha_gain", cfg.filter.alpha_gain},
        {"epsilon", cfg.filter.epsilon}}},
      {"cbf",
       {{"kappa", cfg.cbf.kappa}, {"buffer_b", cfg.cbf.buffer_b}, {"epsilon", cfg.cbf.epsilon}}},
  };
  if (cfg.crane) {
    j["config"]["crane_qp"] = {{"weight", {cfg.crane->qp_weight(0), cfg.crane->qp_weight(1)}},
                               {"eta_gain", cfg.crane->eta_gain}};
  }
  j["metadata"] = {{"tie_break", "lowest_index"},
                   {"barrier_split", kBarrierSplit},
                   {"epsilon_shift_rel", kEpsilonShiftRel},
                   {"trajectory_schema", "trajectory-csv v1"}};
  j["min_h_s"] = s.min_h_s;
  j["argmin_h_s_t"] = s.argmin_h_s_t;
  j["min_h_a"] = s.min_h_a;
  j["argmin_h_a_t"] = s.argmin_h_a_t;
  j["min_h_hat"] = s.min_h_hat;
  j["argmin_h_hat_t"] = s.argmin_h_hat_t;
  j["first_collision_t"] = s.first_collision_t ? json(*s.first_collision_t) : json(nullptr);
  j["first_activation_t"] = s.first_activation_t ? json(*s.first_activation_t) : json(nullptr);
  j["first_failure_t"] = s.first_failure_t ? json(*s.first_failure_t) : json(nullptr);
  j["baseline_failure_count"] = s.baseline_failure_count;
  j["epsilon_shift_count"] = s.epsilon_shift_count;
  j["barrier_eval"] = {{"calls", s.barrier_eval_calls},
                       {"total_s", s.barrier_eval_total_s},
                       {"mean_s", s.barrier_eval_mean_s}};
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// Benchmark

namespace {

struct PosePair {
  PlanarPose pose_i, pose_j;
};

std::vector<PosePair> sample_separated_poses(const VehicleScenario& sc, const BenchConfig& bc) {
  std::mt19937_64 rng(bc.seed);
  std::uniform_real_distribution<double> pos(-bc.position_range, bc.position_range);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::vector<PosePair> pairs;
  pairs.reserve(bc.num_states);
  long guard = 0;
  while (static_cast<int>(pairs.size()) < bc.num_states) {
    if (++guard > 1000L * bc.num_states)
      throw std::runtime_error("bench: could not sample enough separated poses");
    PosePair p{{{pos(rng), pos(rng)}, ang(rng)}, {{pos(rng), pos(rng)}, ang(rng)}};
    const ConvexPolygon poly_i = polygon_from_pose(sc.shape_i, p.pose_i);
    const ConvexPolygon poly_j = polygon_from_pose(sc.shape_j, p.pose_j);
    if (signed_distance(poly_i, poly_j).value > 0.0) pairs.push_back(p);
  }
  return pairs;
}

}  // namespace

BenchReport run_benchmark(const ScenarioConfig& cfg) {
  if (!cfg.bench) throw ValidationError("config: missing bench section");
  if (!cfg.vehicles) throw ValidationError("config: benchmark needs the vehicle shapes");
  const BenchConfig& bc = *cfg.bench;
  const VehicleScenario& sc = *cfg.vehicles;
  if (bc.methods.empty()) throw ValidationError("config: bench.methods is empty");

  const std::vector<PosePair> pairs = sample_separated_poses(sc, bc);

  BenchReport report;
  for (const std::string& method : bc.methods) {
    std::function<double(const PosePair&)> eval;
    if (method == "proposed") {
      eval = [&](const PosePair& p) {
        const PosedPolygon body_i = posed_polygon(sc.shape_i, p.pose_i);
        const PosedPolygon body_j = posed_polygon(sc.shape_j, p.pose_j);
        const BarrierEval e = smooth_h(component_table(body_i, body_j), cfg.cbf);
        return e.value + e.grad_i.sum() + e.grad_j.sum();
      };
    } else if (method.rfind("baseline:", 0) == 0) {
      const BaselineConfig bcfg{std::stoi(method.substr(9))};
      eval = [&, bcfg](const PosePair& p) {
        const BaselineEval e =
            baseline_h_and_gradient(sc.shape_i, p.pose_i, sc.shape_j, p.pose_j, bcfg);
        return e.value + e.grad_i.sum() + e.grad_j.sum();
      };
    } else {
      throw ValidationError("config: unknown bench method \"" + method + "\"");
    }

    std::vector<double> per_call_us(bc.repeats);
    double checksum = 0.0;
    for (int rep = 0; rep < bc.repeats; ++rep) {
      checksum = 0.0;
      const auto t0 = Clock::now();
      for (const PosePair& p : pairs) checksum += eval(p);
      const auto t1 = Clock::now();
      per_call_us[rep] =
          std::chrono::duration<double, std::micro>(t1 - t0).count() / pairs.size();
    }
    std::vector<double> sorted = per_call_us;
    std::sort(sorted.begin(), sorted.end());
    BenchRow row;
    row.method = method;
    row.states = static_cast<int>(pairs.size());
    row.repeats = bc.repeats;
    row.mean_us = std::accumulate(per_call_us.begin(), per_call_us.end(), 0.0) / bc.repeats;
    row.median_us = sorted[sorted.size() / 2];
    row.checksum = checksum;
    report.rows.push_back(row);
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out = "# bench-csv v1\nmethod,states,repeats,mean_us,median_us,checksum\n";
  for (const BenchRow& r : report.rows) {
    out += r.method + ',' + std::to_string(r.states) + ',' + std::to_string(r.repeats) + ',' +
           fmt(r.mean_us) + ',' + fmt(r.median_us) + ',' + fmt(r.checksum) + '\n';
  }
  return out;
}

}  // namespace pca
