#pragma once

#include <Eigen/Dense>

#include "pca/filter.hpp"
#include "pca/geometry.hpp"

namespace pca {

struct BaselineConfig {
  int samples_per_edge = 20;  // boundary sampling density, >= 2
};

// Linearised signed-distance surrogate built from the nearest pair of
// sampled boundary points w_i, w_j:
//   a = (w_j - w_i) / |w_j - w_i|,  value = |w_j - w_i|,
//   grad_i = -[a; a . (R(th_i + pi/2) g_i)],  g_i = R(th_i)^T (w_i - p_i)
// (and +[...] for agent j). Only defined for disjoint polygons.
struct BaselineEval {
  double value = 0.0;
  Eigen::Vector3d grad_i{0.0, 0.0, 0.0};
  Eigen::Vector3d grad_j{0.0, 0.0, 0.0};
  Eigen::Vector2d witness_i{0.0, 0.0};
  Eigen::Vector2d witness_j{0.0, 0.0};
};

// Throws OverlapError when the polygons are not strictly separated.
BaselineEval baseline_h_and_gradient(const RigidPolygonShape& shape_i, const PlanarPose& pose_i,
                                     const RigidPolygonShape& shape_j, const PlanarPose& pose_j,
                                     const BaselineConfig& cfg);

// Safety-filter step driven by the baseline barrier. Overlap makes the
// surrogate undefined: the nominal inputs pass through unchanged and the
// step is reported as a failure event.
struct BaselineStepResult {
  FilterResult filter;
  bool failure_event = false;
  double value = 0.0;  // surrogate barrier value when defined
};

BaselineStepResult baseline_filter_step(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j,
                                        const Eigen::MatrixXd& g_i, const Eigen::MatrixXd& g_j,
                                        const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                        const RigidPolygonShape& shape_i,
                                        const PlanarPose& pose_i,
                                        const RigidPolygonShape& shape_j,
                                        const PlanarPose& pose_j, const BaselineConfig& cfg,
                                        const FilterConfig& filter_cfg);

}  // namespace pca
