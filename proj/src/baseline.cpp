#include "pca/baseline.hpp"

#include <cmath>

#include "pca/sdf.hpp"

namespace pca {

BaselineEval baseline_h_and_gradient(const RigidPolygonShape& shape_i, const PlanarPose& pose_i,
                                     const RigidPolygonShape& shape_j, const PlanarPose& pose_j,
                                     const BaselineConfig& cfg) {
  if (cfg.samples_per_edge < 2)
    throw std::invalid_argument("samples_per_edge must be at least 2");

  const ConvexPolygon poly_i = polygon_from_pose(shape_i, pose_i);
  const ConvexPolygon poly_j = polygon_from_pose(shape_j, pose_j);
  const auto [wi, wj] = nearest_boundary_points(poly_i, poly_j, cfg.samples_per_edge);

  BaselineEval eval;
  eval.witness_i = wi;
  eval.witness_j = wj;
  eval.value = (wj - wi).norm();
  const Eigen::Vector2d a = (wj - wi) / eval.value;

  // The witnesses are frozen in their body frames; only the poses vary in
  // the linearisation.
  const Eigen::Vector2d gi = rotation(pose_i.theta).transpose() * (wi - pose_i.position);
  const Eigen::Vector2d gj = rotation(pose_j.theta).transpose() * (wj - pose_j.position);
  eval.grad_i.head<2>() = -a;
  eval.grad_i(2) = -a.dot(rotation(pose_i.theta + M_PI / 2.0) * gi);
  eval.grad_j.head<2>() = a;
  eval.grad_j(2) = a.dot(rotation(pose_j.theta + M_PI / 2.0) * gj);
  return eval;
}

BaselineStepResult baseline_filter_step(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j,
                                        const Eigen::MatrixXd& g_i, const Eigen::MatrixXd& g_j,
                                        const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                        const RigidPolygonShape& shape_i,
                                        const PlanarPose& pose_i,
                                        const RigidPolygonShape& shape_j,
                                        const PlanarPose& pose_j, const BaselineConfig& cfg,
                                        const FilterConfig& filter_cfg) {
  BaselineStepResult step;
  try {
    const BaselineEval eval = baseline_h_and_gradient(shape_i, pose_i, shape_j, pose_j, cfg);
    BarrierEval barrier;
    barrier.value = eval.value;
    barrier.grad_i = eval.grad_i;
    barrier.grad_j = eval.grad_j;
    step.value = eval.value;
    step.filter = filter_control_affine(f_i, f_j, g_i, g_j, u0_i, u0_j, barrier, filter_cfg);
  } catch (const OverlapError&) {
    step.failure_event = true;
    step.value = std::numeric_limits<double>::quiet_NaN();
    step.filter.u_star.resize(u0_i.size() + u0_j.size());
    step.filter.u_star << u0_i, u0_j;
    step.filter.eta = {0.0, 0.0};
    step.filter.active = {false, false};
    step.filter.constraint_residual = 0.0;
  }
  return step;
}

}  // namespace pca
