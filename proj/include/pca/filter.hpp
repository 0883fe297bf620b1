#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pca/cbf.hpp"
#include "pca/dynamics.hpp"
#include "pca/geometry.hpp"

namespace pca {

struct FilterConfig {
  double alpha_gain = 5.0;  // linear class-K: alpha(h) = alpha_gain * h
  double epsilon = 1e-9;    // denominator regulariser of the closed form
};

// Each agent enforces half of the shared barrier-rate budget.
inline constexpr double kBarrierSplit = 0.5;

// Relative shift of u_star above which the epsilon regulariser is considered
// to have distorted the closed-form solution.
inline constexpr double kEpsilonShiftRel = 1e-6;

struct FilterResult {
  Eigen::VectorXd u_star;      // filtered inputs, stacked in agent order
  std::vector<double> eta;     // per agent: constraint violation of the nominal input
  std::vector<bool> active;    // eta > 0
  double constraint_residual = 0.0;  // min over agents of the post-hoc slack
  bool epsilon_shifted = false;      // epsilon moved u_star > kEpsilonShiftRel relative
  bool degenerate_passthrough = false;  // active constraint with no usable direction
};

// Minimally invasive correction for two single integrators sharing the
// barrier: per agent, u = u0 + max(0, eta) grad / (|grad|^2 + eps) with
// eta = -u0 . grad - (1/2) alpha(h).
FilterResult filter_single_integrator(const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                      const BarrierEval& barrier, const FilterConfig& cfg);

// Control-affine version: dynamics x' = f + g u per agent, correction along
// c = g^T grad. The input maps must have full column rank.
FilterResult filter_control_affine(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j,
                                   const Eigen::MatrixXd& g_i, const Eigen::MatrixXd& g_j,
                                   const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                   const BarrierEval& barrier, const FilterConfig& cfg);

// Energy-based barrier for the crane: phi = eta_gain * h_hat - (1/2) p' M_T p'
// in load-centred coordinates. mass_matrix must be positive definite.
double crane_energy_barrier(double h_hat, const Eigen::Vector3d& p_dot, double eta_gain,
                            const Eigen::Matrix3d& mass_matrix);

struct CraneQpConfig {
  Eigen::Matrix2d weight = Eigen::Vector2d(1000.0, 2.0).asDiagonal();
  double alpha_gain = 3.0;
  double eta_gain = 500.0;
  CbfParams cbf{5.0, 8.0, 1e-9};
};

// Constraint row of the energy filter, phi' >= -alpha phi written as
// c . u >= d. Along the transformed dynamics
//   phi' = -(y', z') . u + eta_gain * dh_hat/dt + p' . G_T,
// so c = -(y', z') (the cart velocity) and d collects the rest.
struct CraneConstraintTerms {
  double phi = 0.0;
  double h_hat = 0.0;
  Eigen::Vector2d c{0.0, 0.0};
  double d = 0.0;
  BarrierEval barrier;  // gradients w.r.t. the two polygon centres
};

CraneConstraintTerms crane_constraint_terms(const Vec6& crane_state, const CraneModel& model,
                                            const RigidPolygonShape& container,
                                            const RigidPolygonShape& obstacle_shape,
                                            const Eigen::Vector2d& obstacle_center,
                                            const Eigen::Vector2d& obstacle_velocity,
                                            const CraneQpConfig& cfg);

// Weighted one-constraint QP: min (u - u0)^T Q (u - u0) s.t. c . u >= d.
// When the cart is at rest the constraint cannot be actuated; the nominal
// input passes through and the result is flagged.
FilterResult filter_crane(const Eigen::Vector2d& u0, const Vec6& crane_state,
                          const CraneModel& model, const RigidPolygonShape& container,
                          const RigidPolygonShape& obstacle_shape,
                          const Eigen::Vector2d& obstacle_center,
                          const Eigen::Vector2d& obstacle_velocity, const CraneQpConfig& cfg);

}  // namespace pca
