#include "pca/filter.hpp"

#include <cmath>

namespace pca {

namespace {

// Shared per-agent closed form: correction along `dir` scaled by the
// constraint violation eta of the nominal input. Returns the filtered input
// and updates the bookkeeping flags.
Eigen::VectorXd correct_agent(const Eigen::VectorXd& u0, const Eigen::VectorXd& dir, double eta,
                              double epsilon, bool* epsilon_shifted) {
  if (eta <= 0.0) return u0;
  const double norm2 = dir.squaredNorm();
  if (norm2 < tol::kUnitNorm * tol::kUnitNorm) {
    if (epsilon <= 0.0)
      throw FilterError("active constraint with vanishing gradient and epsilon = 0");
    *epsilon_shifted = true;  // epsilon absorbed the whole (unbounded) correction
    return u0 + eta * dir / (norm2 + epsilon);
  }
  const Eigen::VectorXd u = u0 + eta * dir / (norm2 + epsilon);
  if (epsilon > 0.0) {
    const double shift = eta * dir.norm() * (1.0 / norm2 - 1.0 / (norm2 + epsilon));
    if (shift > kEpsilonShiftRel * std::max(u.norm(), 1e-12)) *epsilon_shifted = true;
  }
  return u;
}

}  // namespace

FilterResult filter_single_integrator(const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                      const BarrierEval& barrier, const FilterConfig& cfg) {
  // Single integrator: x' = u, so the constraint direction is the gradient.
  const Eigen::MatrixXd gi = Eigen::MatrixXd::Identity(u0_i.size(), u0_i.size());
  const Eigen::MatrixXd gj = Eigen::MatrixXd::Identity(u0_j.size(), u0_j.size());
  return filter_control_affine(Eigen::VectorXd::Zero(u0_i.size()),
                               Eigen::VectorXd::Zero(u0_j.size()), gi, gj, u0_i, u0_j, barrier,
                               cfg);
}

FilterResult filter_control_affine(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j,
                                   const Eigen::MatrixXd& g_i, const Eigen::MatrixXd& g_j,
                                   const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                   const BarrierEval& barrier, const FilterConfig& cfg) {
  const auto check_input_map = [](const Eigen::MatrixXd& g, const char* name) {
    const Eigen::MatrixXd gram = g.transpose() * g;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.eigenvalues().minCoeff() <= tol::kUnitNorm * std::max(1.0, gram.norm()))
      throw FilterError(std::string("input map ") + name + " is column rank deficient");
  };
  check_input_map(g_i, "g_i");
  check_input_map(g_j, "g_j");

  FilterResult res;
  res.eta.resize(2);
  res.active.resize(2);
  res.u_star.resize(u0_i.size() + u0_j.size());
  res.constraint_residual = std::numeric_limits<double>::infinity();

  const double budget = kBarrierSplit * cfg.alpha_gain * barrier.value;
  const struct {
    const Eigen::VectorXd *f, *u0, *grad;
    const Eigen::MatrixXd* g;
  } agents[2] = {{&f_i, &u0_i, &barrier.grad_i, &g_i}, {&f_j, &u0_j, &barrier.grad_j, &g_j}};

  int offset = 0;
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd c = agents[a].g->transpose() * (*agents[a].grad);
    // Agent constraint: grad . (f + g u) >= -(1/2) alpha(h).
    const double eta =
        -agents[a].grad->dot(*agents[a].f + *agents[a].g * (*agents[a].u0)) - budget;
    const Eigen::VectorXd u =
        correct_agent(*agents[a].u0, c, eta, cfg.epsilon, &res.epsilon_shifted);
    res.eta[a] = eta;
    res.active[a] = eta > 0.0;
    res.u_star.segment(offset, u.size()) = u;
    const double residual = agents[a].grad->dot(*agents[a].f + *agents[a].g * u) + budget;
    res.constraint_residual = std::min(res.constraint_residual, residual);
    offset += static_cast<int>(u.size());
  }
  return res;
}

double crane_energy_barrier(double h_hat, const Eigen::Vector3d& p_dot, double eta_gain,
                            const Eigen::Matrix3d& mass_matrix) {
  const Eigen::LLT<Eigen::Matrix3d> llt(mass_matrix);
  if (llt.info() != Eigen::Success)
    throw FilterError("mass matrix is not positive definite");
  return eta_gain * h_hat - 0.5 * p_dot.dot(mass_matrix * p_dot);
}

CraneConstraintTerms crane_constraint_terms(const Vec6& crane_state, const CraneModel& model,
                                            const RigidPolygonShape& container,
                                            const RigidPolygonShape& obstacle_shape,
                                            const Eigen::Vector2d& obstacle_center,
                                            const Eigen::Vector2d& obstacle_velocity,
                                            const CraneQpConfig& cfg) {
  const Eigen::Vector3d p = crane_transformed_position(crane_state, model);
  const Eigen::Vector3d p_dot = crane_transformed_velocity(crane_state, model);

  // Both polygons enter with frozen attitude; only their centres move.
  const ConvexPolygon poly_i = polygon_from_pose(container, PlanarPose{p.head<2>(), 0.0});
  const ConvexPolygon poly_j =
      polygon_from_pose(obstacle_shape, PlanarPose{obstacle_center, 0.0});
  const PosedPolygon body_i{poly_i, translation_jacobians(poly_i)};
  const PosedPolygon body_j{poly_j, translation_jacobians(poly_j)};

  CraneConstraintTerms terms;
  terms.barrier = smooth_h(component_table(body_i, body_j), cfg.cbf);
  terms.h_hat = terms.barrier.value;

  const Eigen::Matrix3d mass = model.mass_matrix(p(2));
  terms.phi = crane_energy_barrier(terms.h_hat, p_dot, cfg.eta_gain, mass);

  const double h_rate_free =
      terms.barrier.grad_i.dot(p_dot.head<2>()) + terms.barrier.grad_j.dot(obstacle_velocity);
  const double gravity_rate = p_dot.dot(model.gravity_vector(p(2)));

  terms.c = -crane_state.segment<2>(3);  // -(y', z'), the cart velocity
  terms.d = -cfg.alpha_gain * terms.phi - cfg.eta_gain * h_rate_free - gravity_rate;
  return terms;
}

FilterResult filter_crane(const Eigen::Vector2d& u0, const Vec6& crane_state,
                          const CraneModel& model, const RigidPolygonShape& container,
                          const RigidPolygonShape& obstacle_shape,
                          const Eigen::Vector2d& obstacle_center,
                          const Eigen::Vector2d& obstacle_velocity, const CraneQpConfig& cfg) {
  const Eigen::LLT<Eigen::Matrix2d> weight_llt(cfg.weight);
  if (weight_llt.info() != Eigen::Success)
    throw FilterError("QP weight matrix is not positive definite");

  const CraneConstraintTerms terms = crane_constraint_terms(
      crane_state, model, container, obstacle_shape, obstacle_center, obstacle_velocity, cfg);

  FilterResult res;
  res.eta = {terms.d - terms.c.dot(u0)};
  res.active = {res.eta[0] > 0.0};
  res.u_star = u0;

  if (res.active[0]) {
    if (terms.c.norm() < tol::kUnitNorm) {
      // Cart at rest: no admissible direction, hand the nominal input through.
      res.degenerate_passthrough = true;
    } else {
      const Eigen::Vector2d w_inv_c = weight_llt.solve(terms.c);
      res.u_star = u0 + (res.eta[0] / terms.c.dot(w_inv_c)) * w_inv_c;
    }
  }
  res.constraint_residual = terms.c.dot(Eigen::Vector2d(res.u_star)) - terms.d;
  return res;
}

}  // namespace pca
