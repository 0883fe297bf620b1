#include "pca/dynamics.hpp"

#include <cmath>

#include "pca/geometry.hpp"

namespace pca {

Eigen::Vector3d unicycle_derivative(const Eigen::Vector3d& state, const Eigen::Vector2d& input) {
  return {input(0) * std::cos(state(2)), input(0) * std::sin(state(2)), input(1)};
}

Eigen::Vector2d unicycle_tracking_controller(const Eigen::Vector3d& state,
                                             const Eigen::Vector2d& p_d,
                                             const Eigen::Vector2d& p_d_dot,
                                             const Eigen::Matrix2d& gain,
                                             double l_offset) {
  if (std::abs(l_offset) < 1e-12) throw std::invalid_argument("l_offset must be nonzero");
  const Eigen::Vector2d desired = -gain * (state.head<2>() - p_d) + p_d_dot;
  const Eigen::Vector2d body = rotation(state(2)).transpose() * desired;
  return {body(0), body(1) / l_offset};
}

Eigen::Matrix3d CraneModel::mass_matrix(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double total = cart_mass + load_mass;
  const double ml = cart_mass * rope_length;
  Eigen::Matrix3d m;
  m << total, 0.0, -ml * c,
       0.0, total, -ml * s,
       -ml * c, -ml * s, cart_mass * rope_length * rope_length;
  return m;
}

Eigen::Matrix3d CraneModel::coriolis_matrix(double theta, double theta_dot) const {
  const double ml = cart_mass * rope_length;
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 2) = ml * theta_dot * std::sin(theta);
  c(1, 2) = -ml * theta_dot * std::cos(theta);
  return c;
}

Eigen::Vector3d CraneModel::gravity_vector(double theta) const {
  return {0.0, (cart_mass + load_mass) * gravity,
          -cart_mass * gravity * rope_length * std::sin(theta)};
}

Eigen::Matrix<double, 3, 2> CraneModel::input_map(double theta) const {
  Eigen::Matrix<double, 3, 2> b;
  b << 1.0, 0.0,
       0.0, 1.0,
       -rope_length * std::cos(theta), -rope_length * std::sin(theta);
  return b;
}

Vec6 crane_derivative(const Vec6& state, const Eigen::Vector2d& input, const CraneModel& model) {
  const double theta = state(2);
  const double theta_dot = state(5);
  const double c = std::cos(theta), s = std::sin(theta);
  const double total = model.cart_mass + model.load_mass;
  const double ml = model.load_mass * model.rope_length;

  // Cart-centred equations of motion:
  //   (M+m) y'' + m l (th'' cos - th'^2 sin)     = u_y
  //   (M+m)(z'' + g) + m l (th'' sin + th'^2 cos) = u_z
  //   m l (y'' cos + z'' sin) + m l^2 th'' + m g l sin = 0
  Eigen::Matrix3d mass;
  mass << total, 0.0, ml * c,
          0.0, total, ml * s,
          ml * c, ml * s, ml * model.rope_length;
  Eigen::Vector3d rhs;
  rhs << input(0) + ml * theta_dot * theta_dot * s,
         input(1) - total * model.gravity - ml * theta_dot * theta_dot * c,
         -model.load_mass * model.gravity * model.rope_length * s;
  const Eigen::Vector3d acc = mass.ldlt().solve(rhs);

  Vec6 deriv;
  deriv.head<3>() = state.tail<3>();
  deriv.tail<3>() = acc;
  return deriv;
}

Eigen::Vector3d crane_transformed_position(const Vec6& state, const CraneModel& model) {
  const double l = model.rope_length;
  return {state(0) + l * std::sin(state(2)), state(1) - l * std::cos(state(2)), state(2)};
}

Eigen::Vector3d crane_transformed_velocity(const Vec6& state, const CraneModel& model) {
  const double l = model.rope_length;
  const double c = std::cos(state(2)), s = std::sin(state(2));
  return {state(3) + l * state(5) * c, state(4) + l * state(5) * s, state(5)};
}

Eigen::Vector2d crane_pd_controller(const Vec6& state, const Eigen::Vector2d& target,
                                    const Eigen::Matrix2d& kp, const Eigen::Matrix2d& kd,
                                    double lambda, const CraneModel& model) {
  const double c = std::cos(state(2)), s = std::sin(state(2));
  const Eigen::Vector2d chi{state(0) + lambda * s, state(1) - lambda * c};
  const Eigen::Vector2d chi_d{target(0), target(1) - lambda};
  const Eigen::Vector2d chi_dot{state(3) + lambda * state(5) * c,
                                state(4) + lambda * state(5) * s};
  const Eigen::Vector2d err = (chi - chi_d).array().tanh();
  const Eigen::Vector2d damp = chi_dot.array().tanh();
  Eigen::Vector2d u = -kp * err - kd * damp;
  u(1) += (model.cart_mass + model.load_mass) * model.gravity;
  return u;
}

}  // namespace pca
