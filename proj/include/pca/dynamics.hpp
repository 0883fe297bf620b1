#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace pca {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Unicycle state (p_x, p_y, theta), input (v, omega).
Eigen::Vector3d unicycle_derivative(const Eigen::Vector3d& state, const Eigen::Vector2d& input);

// Hand-position tracking controller:
//   u = diag(1, 1/l_offset) R(theta)^T (-K (p - p_d) + p_d_dot).
Eigen::Vector2d unicycle_tracking_controller(const Eigen::Vector3d& state,
                                             const Eigen::Vector2d& p_d,
                                             const Eigen::Vector2d& p_d_dot,
                                             const Eigen::Matrix2d& gain,
                                             double l_offset);

// Gantry crane with a rigid rope: cart (y, z) driven by a planar force, load
// swinging at angle theta from the vertical. State (y, z, theta, rates).
struct CraneModel {
  double cart_mass = 10.0;
  double load_mass = 5.0;
  double gravity = 9.8;
  double rope_length = 0.7;

  // Load-centred coordinates p = (y + l sin th, z - l cos th, th) turn the
  // equations of motion into M_T p'' + C_T p' + G_T = B_T u.
  Eigen::Matrix3d mass_matrix(double theta) const;
  Eigen::Matrix3d coriolis_matrix(double theta, double theta_dot) const;
  Eigen::Vector3d gravity_vector(double theta) const;
  Eigen::Matrix<double, 3, 2> input_map(double theta) const;
};

Vec6 crane_derivative(const Vec6& state, const Eigen::Vector2d& input, const CraneModel& model);

Eigen::Vector3d crane_transformed_position(const Vec6& state, const CraneModel& model);
Eigen::Vector3d crane_transformed_velocity(const Vec6& state, const CraneModel& model);

// Saturated PD on the near-load point chi = (y + lam sin th, z - lam cos th)
// plus gravity feedforward:
//   u = -Kp tanh(chi - chi_d) - Kd tanh(chi_dot) + (M + m) g e2.
Eigen::Vector2d crane_pd_controller(const Vec6& state, const Eigen::Vector2d& target,
                                    const Eigen::Matrix2d& kp, const Eigen::Matrix2d& kd,
                                    double lambda, const CraneModel& model);

// One classical Runge-Kutta step with the input held constant.
template <typename State, typename Input, typename F>
State rk4_step(F&& derivative, const State& state, const Input& input, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const State k1 = derivative(state, input);
  const State k2 = derivative(State(state + 0.5 * dt * k1), input);
  const State k3 = derivative(State(state + 0.5 * dt * k2), input);
  const State k4 = derivative(State(state + dt * k3), input);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace pca
