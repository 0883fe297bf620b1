#pragma once

#include <Eigen/Dense>
#include <utility>

#include "pca/geometry.hpp"

namespace pca {

struct CbfParams {
  double kappa = 5.0;     // smoothing sharpness, > 0
  double buffer_b = 0.0;  // buffer term; >= ln(r_i + r_j) keeps the smooth
                          // value below the nonsmooth one
  double epsilon = 1e-9;  // filter denominator regulariser (not used here)
};

// Per-facet separation components between two placed polygons:
//   phi(k, l) = A_i[k] . v_j[l] - b_i[k]   (halfspace of i against vertex of j)
//   psi(k, l) = A_j[k] . v_i[l] - b_j[k]   (halfspace of j against vertex of i)
// plus the gradient of each component w.r.t. the stacked state (x_i, x_j).
// Gradient columns are indexed row-major: column k * cols + l.
struct ComponentTable {
  Eigen::MatrixXd phi;       // r_i x r_j
  Eigen::MatrixXd psi;       // r_j x r_i
  Eigen::MatrixXd grad_phi;  // (n_i + n_j) x (r_i * r_j)
  Eigen::MatrixXd grad_psi;  // (n_i + n_j) x (r_j * r_i)
  int n_i = 0;
  int n_j = 0;
};

// Smoothed barrier value with its gradient blocks and the convex-combination
// weight of every component gradient (phi block first, then psi, same
// column order as the table; nonnegative, sums to one).
struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd grad_i;
  Eigen::VectorXd grad_j;
  Eigen::VectorXd weights;
};

ComponentTable component_table(const PosedPolygon& body_i, const PosedPolygon& body_j);

// Nonsmooth lower bound of the signed distance:
//   h_a = max( max_k min_l phi(k, l), max_k min_l psi(k, l) ).
// Equals the signed distance wherever the polygons are not strictly
// separated, never exceeds it, and always shares its sign.
double h_a(const ComponentTable& table);

// Log-sum-exp smoothing of h_a over both component families:
//   h_hat = (1/kappa) ln( sum_rows 1 / sum_cols exp(-kappa row(col)) ) - b/kappa,
// a softmax across rows of per-row softmins. Evaluated in the log domain
// (exponents kept nonpositive), so any kappa > 0 is safe. Gradient weights
// come from the same shifted quantities.
BarrierEval smooth_h(const ComponentTable& table, const CbfParams& params);

// Sandwich margins of the smoothing error for polygons with the given edge
// counts: h_a - first <= h_hat <= h_a + second.
std::pair<double, double> error_bound(const CbfParams& params, int edges_i, int edges_j);

}  // namespace pca
