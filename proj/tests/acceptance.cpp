// Acceptance gate. Each numbered criterion prints one PASS/FAIL line with
// the measured quantities next to the pinned tolerances; the process exits
// nonzero if any line fails. Run from the repository root (ctest sets the
// working directory) so the bundled configs resolve.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pca/cbf.hpp"
#include "pca/dynamics.hpp"
#include "pca/filter.hpp"
#include "pca/geometry.hpp"
#include "pca/scenario.hpp"
#include "pca/sdf.hpp"
#include "pca/verify.hpp"

using namespace pca;
using Clock = std::chrono::steady_clock;
using Outcome = std::pair<bool, std::string>;

namespace {

std::string strf(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

PlanarPose random_pose(std::mt19937_64& rng, double box) {
  std::uniform_real_distribution<double> pos(-box, box);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  const double x = pos(rng);
  const double y = pos(rng);
  return PlanarPose{{x, y}, ang(rng)};
}

// Two out of three pose draws come from a tight box so that overlapping,
// touching and separated configurations all appear in quantity.
double box_for(long n) { return (n % 3 == 2) ? 6.0 : 2.0; }

// -----------------------------------------------------------------------------
// 1. The nonsmooth lower bound h_a against the exact signed distance:
//    equality (1e-9) wherever h_s <= 0, h_a <= h_s + 1e-9 everywhere,
//    matching signs outside a +-1e-9 band, >= 1e4 contact poses, < 30 s.

Outcome criterion_sdf_equivalence() {
  const auto t0 = Clock::now();
  const RigidPolygonShape tri = vehicle_triangle();
  const RigidPolygonShape trap = vehicle_trapezoid();
  std::mt19937_64 rng(101);

  const long total = 24000;
  long contact = 0, sign_mismatch = 0;
  double worst_eq = 0.0, worst_lb = -1e300;
  for (long n = 0; n < total; ++n) {
    const double box = box_for(n);
    const PosedPolygon bi = posed_polygon(tri, random_pose(rng, box));
    const PosedPolygon bj = posed_polygon(trap, random_pose(rng, box));
    const double ha = h_a(component_table(bi, bj));
    const double hs = signed_distance(bi.polygon, bj.polygon).value;
    worst_lb = std::max(worst_lb, ha - hs);
    if (hs <= 0.0) {
      ++contact;
      worst_eq = std::max(worst_eq, std::abs(ha - hs));
    }
    if (std::abs(hs) > 1e-9 && std::abs(ha) > 1e-9 && (ha > 0.0) != (hs > 0.0))
      ++sign_mismatch;
  }
  const double secs = seconds_since(t0);
  const bool pass = contact >= 10000 && worst_eq <= 1e-9 && worst_lb <= 1e-9 &&
                    sign_mismatch == 0 && secs < 30.0;
  return {pass, strf("%ld/%ld contact poses, contact |h_a-h_s| %.1e (tol 1e-9), "
                     "max h_a-h_s %.1e, sign mismatches %ld, %.1fs (< 30s)",
                     contact, total, worst_eq, worst_lb, sign_mismatch, secs)};
}

// -----------------------------------------------------------------------------
// 2. Halfspace certificate of the Minkowski difference: every pairwise vertex
//    difference satisfies all support halfspaces built from the stacked
//    normals {-A_i} u {A_j} (1e-9), and every facet normal of the
//    brute-force difference hull reappears among those normals (1e-9).

Outcome criterion_difference_hull() {
  std::mt19937_64 rng(202);
  const Eigen::Matrix2d B = quarter_turn();
  const long pairs = 1000;
  long facets = 0;
  double worst_inside = -1e300, worst_normal = 0.0;

  for (long n = 0; n < pairs; ++n) {
    const RigidPolygonShape si = random_convex_shape(rng);
    const RigidPolygonShape sj = random_convex_shape(rng);
    const ConvexPolygon pi = polygon_from_pose(si, random_pose(rng, 3.0));
    const ConvexPolygon pj = polygon_from_pose(sj, random_pose(rng, 3.0));

    std::vector<Eigen::Vector2d> diffs;
    diffs.reserve(pi.vertices.size() * pj.vertices.size());
    for (const Eigen::Vector2d& vj : pj.vertices)
      for (const Eigen::Vector2d& vi : pi.vertices) diffs.push_back(vj - vi);

    std::vector<Eigen::Vector2d> candidates;
    for (const Eigen::Vector2d& a : pi.normals) candidates.push_back(-a);
    for (const Eigen::Vector2d& a : pj.normals) candidates.push_back(a);

    for (const Eigen::Vector2d& a : candidates) {
      const double offset = support_value(pj, a) + support_value(pi, -a);
      for (const Eigen::Vector2d& v : diffs)
        worst_inside = std::max(worst_inside, a.dot(v) - offset);
    }

    // Brute-force hull facets: a directed chord with every other point on its
    // inner side. Traversed clockwise, B maps the chord to the outward normal.
    const int m = static_cast<int>(diffs.size());
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        const Eigen::Vector2d chord = diffs[b] - diffs[a];
        const double len = chord.norm();
        if (len < 1e-12) continue;
        const Eigen::Vector2d normal = (B * chord) / len;
        bool facet = true;
        for (int c = 0; c < m && facet; ++c) {
          if (c == a || c == b) continue;
          if (normal.dot(diffs[c] - diffs[a]) > 1e-12) facet = false;
        }
        if (!facet) continue;
        ++facets;
        double best = 1e300;
        for (const Eigen::Vector2d& cand : candidates)
          best = std::min(best, (normal - cand).norm());
        worst_normal = std::max(worst_normal, best);
      }
    }
  }
  const bool pass = worst_inside <= 1e-9 && worst_normal <= 1e-9 && facets >= pairs;
  return {pass, strf("%ld pairs, %ld facets, halfspace residual %.1e, "
                     "normal mismatch %.1e (tol 1e-9)",
                     pairs, facets, worst_inside, worst_normal)};
}

// -----------------------------------------------------------------------------
// 3. Smoothing error: for kappa in {1,5,50} and buffers {ln 7, ln 7 + 1},
//    h_a - (ln 4 + b)/kappa <= h_hat <= h_a + (ln 7 - b)/kappa at 1e4 poses;
//    with b = ln 7 the smooth value never exceeds h_a; the max error decays
//    like 1/kappa (kappa 5 vs 50 ratio within [8, 12]).

Outcome criterion_smoothing_sandwich() {
  const RigidPolygonShape tri = vehicle_triangle();
  const RigidPolygonShape trap = vehicle_trapezoid();
  std::mt19937_64 rng(303);

  const double kappas[3] = {1.0, 5.0, 50.0};
  const double buffers[2] = {std::log(7.0), std::log(7.0) + 1.0};
  double max_err[3][2] = {{0.0}};
  double worst_sandwich = -1e300, worst_conservative = -1e300;

  const long total = 10000;
  for (long n = 0; n < total; ++n) {
    const double box = box_for(n);
    const PosedPolygon bi = posed_polygon(tri, random_pose(rng, box));
    const PosedPolygon bj = posed_polygon(trap, random_pose(rng, box));
    const ComponentTable table = component_table(bi, bj);
    const double ha = h_a(table);
    for (int k = 0; k < 3; ++k) {
      for (int b = 0; b < 2; ++b) {
        const CbfParams prm{kappas[k], buffers[b], 1e-9};
        const double hh = smooth_h(table, prm).value;
        const auto [low, up] = error_bound(prm, 3, 4);
        worst_sandwich = std::max(worst_sandwich,
                                  std::max((ha - low) - hh, hh - (ha + up)));
        if (b == 0) worst_conservative = std::max(worst_conservative, hh - ha);
        max_err[k][b] = std::max(max_err[k][b], std::abs(hh - ha));
      }
    }
  }
  const double ratio = max_err[1][0] / max_err[2][0];
  const bool pass = worst_sandwich <= 1e-9 && worst_conservative <= 1e-12 &&
                    ratio >= 8.0 && ratio <= 12.0;
  return {pass, strf("%ld poses, sandwich residual %.1e (tol 1e-9), "
                     "h_hat-h_a %.1e (tol 1e-12), kappa 5/50 error ratio %.2f in [8,12]",
                     total, worst_sandwich, worst_conservative, ratio)};
}

// -----------------------------------------------------------------------------
// 4. Smooth gradient against central finite differences (step 1e-6): relative
//    error <= 1e-5 wherever the gradient norm is >= 1e-6; the convex
//    combination weights sum to one within 1e-12.

Outcome criterion_gradients() {
  const RigidPolygonShape tri = vehicle_triangle();
  const RigidPolygonShape trap = vehicle_trapezoid();
  const CbfParams prm{5.0, std::log(7.0), 1e-9};
  std::mt19937_64 rng(404);
  const double step = 1e-6;

  const auto value_at = [&](const PlanarPose& pa, const PlanarPose& pb) {
    return smooth_h(component_table(posed_polygon(tri, pa), posed_polygon(trap, pb)), prm)
        .value;
  };

  const long total = 1000;
  long evaluated = 0, skipped = 0;
  double worst_rel = 0.0, worst_weight_sum = 0.0;
  for (long n = 0; n < total; ++n) {
    const double box = box_for(n);
    const PlanarPose pose_i = random_pose(rng, box);
    const PlanarPose pose_j = random_pose(rng, box);
    const BarrierEval ev =
        smooth_h(component_table(posed_polygon(tri, pose_i), posed_polygon(trap, pose_j)), prm);
    worst_weight_sum = std::max(worst_weight_sum, std::abs(ev.weights.sum() - 1.0));

    Eigen::Matrix<double, 6, 1> grad;
    grad << ev.grad_i, ev.grad_j;
    if (grad.norm() < 1e-6) {
      ++skipped;
      continue;
    }
    Eigen::Matrix<double, 6, 1> fd;
    for (int c = 0; c < 6; ++c) {
      PlanarPose pa = pose_i, pb = pose_j;
      PlanarPose& target = (c < 3) ? pa : pb;
      const int axis = c % 3;
      double* coord = (axis < 2) ? &target.position[axis] : &target.theta;
      const double saved = *coord;
      *coord = saved + step;
      const double up = value_at(pa, pb);
      *coord = saved - step;
      const double down = value_at(pa, pb);
      fd(c) = (up - down) / (2.0 * step);
    }
    worst_rel = std::max(worst_rel, (grad - fd).norm() / grad.norm());
    ++evaluated;
  }
  const bool pass = worst_rel <= 1e-5 && worst_weight_sum <= 1e-12 &&
                    evaluated >= total / 2;
  return {pass, strf("%ld/%ld states checked (%ld below norm 1e-6), rel error %.1e "
                     "(tol 1e-5), weight sum dev %.1e (tol 1e-12)",
                     evaluated, total, skipped, worst_rel, worst_weight_sum)};
}

// -----------------------------------------------------------------------------
// 5. The three closed-form filters against a numeric single-constraint KKT
//    solve, 1e3 instances each, max deviation 1e-8. The epsilon regulariser
//    is turned off so the closed forms are exact.

Outcome criterion_filters() {
  const RigidPolygonShape tri = vehicle_triangle();
  const RigidPolygonShape trap = vehicle_trapezoid();
  const CbfParams prm{5.0, std::log(7.0), 1e-9};
  FilterConfig cfg;
  cfg.alpha_gain = 5.0;
  cfg.epsilon = 0.0;

  std::mt19937_64 rng(505);
  std::normal_distribution<double> gauss(0.0, 2.0);
  const long total = 1000;

  // Single integrators: u acts directly on the pose.
  long active_si = 0, skipped_si = 0;
  double worst_si = 0.0;
  const Eigen::Vector3d f0 = Eigen::Vector3d::Zero();
  const Eigen::Matrix3d g0 = Eigen::Matrix3d::Identity();
  for (long n = 0; n < total; ++n) {
    const PosedPolygon bi = posed_polygon(tri, random_pose(rng, box_for(n)));
    const PosedPolygon bj = posed_polygon(trap, random_pose(rng, box_for(n)));
    const BarrierEval barrier = smooth_h(component_table(bi, bj), prm);
    if (barrier.grad_i.norm() < 1e-8 || barrier.grad_j.norm() < 1e-8) {
      ++skipped_si;
      continue;
    }
    const Eigen::Vector3d u0_i(gauss(rng), gauss(rng), gauss(rng));
    const Eigen::Vector3d u0_j(gauss(rng), gauss(rng), gauss(rng));
    const FilterResult res = filter_single_integrator(u0_i, u0_j, barrier, cfg);
    const Eigen::VectorXd ref = qp_reference_filter(f0, f0, g0, g0, u0_i, u0_j, barrier, cfg);
    worst_si = std::max(worst_si, (res.u_star - ref).cwiseAbs().maxCoeff());
    if (res.active[0] || res.active[1]) ++active_si;
  }

  // Control-affine unicycles: u enters through the heading-dependent map.
  long active_ca = 0, skipped_ca = 0;
  double worst_ca = 0.0;
  for (long n = 0; n < total; ++n) {
    const PlanarPose pose_i = random_pose(rng, box_for(n));
    const PlanarPose pose_j = random_pose(rng, box_for(n));
    const BarrierEval barrier =
        smooth_h(component_table(posed_polygon(tri, pose_i), posed_polygon(trap, pose_j)), prm);
    Eigen::Matrix<double, 3, 2> g_i, g_j;
    g_i << std::cos(pose_i.theta), 0.0, std::sin(pose_i.theta), 0.0, 0.0, 1.0;
    g_j << std::cos(pose_j.theta), 0.0, std::sin(pose_j.theta), 0.0, 0.0, 1.0;
    if ((g_i.transpose() * barrier.grad_i).norm() < 1e-8 ||
        (g_j.transpose() * barrier.grad_j).norm() < 1e-8) {
      ++skipped_ca;
      continue;
    }
    const Eigen::Vector2d u0_i(gauss(rng), gauss(rng));
    const Eigen::Vector2d u0_j(gauss(rng), gauss(rng));
    const FilterResult res =
        filter_control_affine(f0, f0, g_i, g_j, u0_i, u0_j, barrier, cfg);
    const Eigen::VectorXd ref =
        qp_reference_filter(f0, f0, g_i, g_j, u0_i, u0_j, barrier, cfg);
    worst_ca = std::max(worst_ca, (res.u_star - ref).cwiseAbs().maxCoeff());
    if (res.active[0] || res.active[1]) ++active_ca;
  }

  // Crane: weighted QP with the energy barrier constraint, obstacle parked
  // near the load so the constraint actually binds on a healthy fraction.
  const CraneModel model;
  const CraneQpConfig qcfg;
  const RigidPolygonShape container = crane_container();
  const RigidPolygonShape obstacle = crane_obstacle();
  const Eigen::Matrix2d kp = Eigen::Vector2d(5.0, 10.0).asDiagonal();
  const Eigen::Matrix2d kd = Eigen::Vector2d(7.0, 7.0).asDiagonal();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long active_cr = 0, skipped_cr = 0;
  double worst_cr = 0.0;
  for (long n = 0; n < total; ++n) {
    Vec6 x;
    x << 10.0 * unit(rng), 0.8 + 1.4 * unit(rng), 1.0 * unit(rng) - 0.5,
        3.0 * unit(rng) - 1.5, 3.0 * unit(rng) - 1.5, 2.0 * unit(rng) - 1.0;
    const Eigen::Vector3d p = crane_transformed_position(x, model);
    const Eigen::Vector2d obs(p(0) - 0.75 + 1.5 * unit(rng), 0.4 + 0.8 * unit(rng));
    const Eigen::Vector2d obs_vel(0.6 * unit(rng) - 0.3, 0.6 * unit(rng) - 0.3);
    const Eigen::Vector2d u0 =
        crane_pd_controller(x, Eigen::Vector2d(10.0, 1.5), kp, kd, -0.01, model);

    const CraneConstraintTerms terms =
        crane_constraint_terms(x, model, container, obstacle, obs, obs_vel, qcfg);
    const FilterResult res =
        filter_crane(u0, x, model, container, obstacle, obs, obs_vel, qcfg);
    if (terms.c.norm() < 1e-6) {
      ++skipped_cr;
      continue;
    }
    Eigen::Vector2d u_ref = u0;
    if (terms.c.dot(u0) < terms.d) {
      ++active_cr;
      Eigen::Matrix3d kkt = Eigen::Matrix3d::Zero();
      kkt.topLeftCorner<2, 2>() = 2.0 * qcfg.weight;
      kkt.topRightCorner<2, 1>() = -terms.c;
      kkt.bottomLeftCorner<1, 2>() = terms.c.transpose();
      Eigen::Vector3d rhs;
      rhs << 2.0 * qcfg.weight * u0, terms.d;
      u_ref = kkt.fullPivLu().solve(rhs).head<2>();
    }
    worst_cr = std::max(worst_cr, (res.u_star - u_ref).cwiseAbs().maxCoeff());
  }

  const bool pass = worst_si <= 1e-8 && worst_ca <= 1e-8 && worst_cr <= 1e-8 &&
                    active_si >= 100 && active_ca >= 100 && active_cr >= 50 &&
                    skipped_si < total / 4 && skipped_ca < total / 4 &&
                    skipped_cr < total / 4;
  return {pass, strf("deviation %.1e / %.1e / %.1e (tol 1e-8), "
                     "active %ld / %ld / %ld of %ld each",
                     worst_si, worst_ca, worst_cr, active_si, active_ca, active_cr, total)};
}

// -----------------------------------------------------------------------------
// 6. Vehicle runs: the unfiltered tracking controllers collide between 1.6 s
//    and 2.2 s; both smooth-filter runs keep min h_s >= 0 and min h_hat
//    >= -1e-6 over 10 s; the kappa=1 filter responds to the approach strictly
//    earlier than kappa=5; each run finishes in under 10 s.
//
//    "Responds" means the first sustained activation episode (>= 0.1 s of
//    consecutive active steps). Both runs also show two sub-40 ms blips
//    within the first 0.1 s while the tracking controllers swing the headings
//    onto the reference tracks, 26 m before contact; those transients are a
//    property of the facet-plane barrier (its attitude gradient carries the
//    full separation as a lever arm) and are not a response to the approach,
//    so the episode measure excludes them. The raw first-activation times are
//    still printed.

double first_sustained_activation(const Trajectory& traj, int min_steps) {
  int run_start = -1;
  for (int k = 0; k <= static_cast<int>(traj.steps.size()); ++k) {
    const bool on = k < static_cast<int>(traj.steps.size()) &&
                    (traj.steps[k].active[0] || traj.steps[k].active[1]);
    if (on && run_start < 0) run_start = k;
    if (!on && run_start >= 0) {
      if (k - run_start >= min_steps) return traj.steps[run_start].t;
      run_start = -1;
    }
  }
  return -1.0;
}

Outcome criterion_vehicle_runs() {
  const auto timed = [](const char* path, double& secs) {
    const ScenarioConfig cfg = load_scenario(path);
    const auto t0 = Clock::now();
    RunResult r = run_scenario(cfg);
    secs = seconds_since(t0);
    return r;
  };
  double s_nom = 0.0, s_k5 = 0.0, s_k1 = 0.0;
  const RunResult nominal = timed("configs/vehicles_nominal.json", s_nom);
  const RunResult k5 = timed("configs/vehicles_smooth_k5.json", s_k5);
  const RunResult k1 = timed("configs/vehicles_smooth_k1.json", s_k1);

  const double t_coll = nominal.summary.first_collision_t.value_or(-1.0);
  const double act5 = first_sustained_activation(k5.trajectory, 100);
  const double act1 = first_sustained_activation(k1.trajectory, 100);
  const double raw5 = k5.summary.first_activation_t.value_or(-1.0);
  const double raw1 = k1.summary.first_activation_t.value_or(-1.0);
  const bool pass = t_coll >= 1.6 && t_coll <= 2.2 &&
                    k5.summary.min_h_s >= 0.0 && k5.summary.min_h_hat >= -1e-6 &&
                    k1.summary.min_h_s >= 0.0 && k1.summary.min_h_hat >= -1e-6 &&
                    act1 >= 0.0 && act5 >= 0.0 && act1 < act5 &&
                    s_nom < 10.0 && s_k5 < 10.0 && s_k1 < 10.0;
  return {pass, strf("collision %.3fs in [1.6,2.2], min h_s %.2e/%.2e, "
                     "min h_hat %.2e/%.2e, response %.3fs < %.3fs (raw first "
                     "%.3f/%.3fs), runtimes %.1f/%.1f/%.1fs (< 10s)",
                     t_coll, k5.summary.min_h_s, k1.summary.min_h_s,
                     k5.summary.min_h_hat, k1.summary.min_h_hat, act1, act5,
                     raw1, raw5, s_nom, s_k5, s_k1)};
}

// -----------------------------------------------------------------------------
// 7. Crane runs: unfiltered, the container passes through the obstacle
//    somewhere inside [6, 11] s; with the energy filter, min h_s >= 0 over
//    the whole horizon.

Outcome criterion_crane_runs() {
  const RunResult nominal = run_scenario(load_scenario("configs/crane_nominal.json"));
  const RunResult filtered = run_scenario(load_scenario("configs/crane_filtered.json"));

  bool hit_in_window = false;
  for (const TrajectoryStep& s : nominal.trajectory.steps)
    if (s.h_s < 0.0 && s.t >= 6.0 && s.t <= 11.0) hit_in_window = true;

  const bool pass = hit_in_window && filtered.summary.min_h_s >= 0.0;
  return {pass, strf("nominal min h_s %.3f at %.2fs (window hit: %s), "
                     "filtered min h_s %.2e >= 0",
                     nominal.summary.min_h_s, nominal.summary.argmin_h_s_t,
                     hit_in_window ? "yes" : "no", filtered.summary.min_h_s)};
}

// -----------------------------------------------------------------------------
// 8. Sampling baseline: density 20 keeps the run collision-free, density 10
//    collides or hits a failure event; evaluating the smooth barrier is
//    faster than the density-20 baseline (ratio > 1 required, > 2 expected).

Outcome criterion_baseline() {
  const RunResult b20 = run_scenario(load_scenario("configs/vehicles_baseline_20.json"));
  const RunResult b10 = run_scenario(load_scenario("configs/vehicles_baseline_10.json"));

  const bool b20_safe = b20.summary.min_h_s >= 0.0;
  const bool b10_fails =
      b10.summary.min_h_s < 0.0 || b10.summary.baseline_failure_count > 0;

  const ScenarioConfig bench_cfg = load_scenario("configs/bench.json");
  const BenchReport bench = run_benchmark(bench_cfg);
  double proposed_us = 0.0, baseline_us = 0.0;
  for (const BenchRow& row : bench.rows) {
    if (row.method == "proposed") proposed_us = row.mean_us;
    if (row.method == "baseline:20") baseline_us = row.mean_us;
  }
  const double ratio = proposed_us > 0.0 ? baseline_us / proposed_us : 0.0;

  const bool pass = b20_safe && b10_fails && ratio > 1.0;
  return {pass, strf("density 20 min h_s %.2e, density 10 min h_s %.2e with %ld "
                     "failure events, eval %.2f vs %.2f us, ratio %.1fx "
                     "(need > 1, expect > 2)",
                     b20.summary.min_h_s, b10.summary.min_h_s,
                     b10.summary.baseline_failure_count, proposed_us, baseline_us, ratio)};
}

// -----------------------------------------------------------------------------
// 9. Crane dynamics cross-check: the generalized-coordinate equations and the
//    load-centred form agree to 1e-9 at 1e3 random states; the gravity-
//    compensated equilibrium stays put to 1e-12 per integration step.

Outcome criterion_crane_dynamics() {
  const CraneModel model;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double l = model.rope_length;

  double worst_res = 0.0;
  for (long n = 0; n < 1000; ++n) {
    Vec6 x;
    x << 5.0 * unit(rng), 1.5 + 1.0 * unit(rng), 1.2 * unit(rng), 2.0 * unit(rng),
        2.0 * unit(rng), 2.0 * unit(rng);
    const Eigen::Vector2d u(30.0 * unit(rng), 30.0 * unit(rng));
    const Vec6 xdot = crane_derivative(x, u, model);
    const double c = std::cos(x(2)), s = std::sin(x(2)), td = x(5);

    Eigen::Matrix3d J, Jdot;
    J << 1, 0, l * c, 0, 1, l * s, 0, 0, 1;
    Jdot << 0, 0, -l * s * td, 0, 0, l * c * td, 0, 0, 0;
    const Eigen::Vector3d p_ddot = J * xdot.tail<3>() + Jdot * x.tail<3>();
    const Eigen::Vector3d p_dot = crane_transformed_velocity(x, model);

    const Eigen::Vector3d residual = model.mass_matrix(x(2)) * p_ddot +
                                     model.coriolis_matrix(x(2), td) * p_dot +
                                     model.gravity_vector(x(2)) - model.input_map(x(2)) * u;
    worst_res = std::max(worst_res, residual.cwiseAbs().maxCoeff());
  }

  const Eigen::Matrix2d kp = Eigen::Vector2d(5.0, 10.0).asDiagonal();
  const Eigen::Matrix2d kd = Eigen::Vector2d(7.0, 7.0).asDiagonal();
  Vec6 xeq;
  xeq << 3.0, 1.5, 0.0, 0.0, 0.0, 0.0;
  const Eigen::Vector2d target(3.0, 1.5);
  const Eigen::Vector2d u_eq = crane_pd_controller(xeq, target, kp, kd, -0.01, model);
  const double hover = (model.cart_mass + model.load_mass) * model.gravity;
  const double worst_hover =
      std::max(std::abs(u_eq(0)), std::abs(u_eq(1) - hover));

  double worst_step = 0.0;
  Vec6 x = xeq;
  for (int k = 0; k < 200; ++k) {
    const Vec6 before = x;
    x = rk4_step([&model](const Vec6& s, const Eigen::Vector2d& in) {
      return crane_derivative(s, in, model);
    }, x, u_eq, 1e-3);
    worst_step = std::max(worst_step, (x - before).cwiseAbs().maxCoeff());
  }

  const bool pass = worst_res <= 1e-9 && worst_hover <= 1e-12 && worst_step <= 1e-12;
  return {pass, strf("formulation residual %.1e (tol 1e-9), hover input dev %.1e, "
                     "equilibrium drift %.1e per step (tol 1e-12)",
                     worst_res, worst_hover, worst_step)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"lower bound matches SDF on contact", criterion_sdf_equivalence},
      {"difference hull halfspace certificate", criterion_difference_hull},
      {"smoothing error sandwich and rate", criterion_smoothing_sandwich},
      {"smooth gradient finite differences", criterion_gradients},
      {"closed-form filters match QP solves", criterion_filters},
      {"vehicle runs: collision and safety", criterion_vehicle_runs},
      {"crane runs: collision and safety", criterion_crane_runs},
      {"baseline safety and timing", criterion_baseline},
      {"crane dynamics cross-check", criterion_crane_dynamics},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.first) ++failures;
    std::printf("%s  %zu. %-40s %s\n", outcome.first ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.second.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
