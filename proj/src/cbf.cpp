#include "pca/cbf.hpp"

#include <cmath>
#include <stdexcept>

namespace pca {

ComponentTable component_table(const PosedPolygon& body_i, const PosedPolygon& body_j) {
  const ConvexPolygon& pi = body_i.polygon;
  const ConvexPolygon& pj = body_j.polygon;
  const ShapeJacobians& ji = body_i.jacobians;
  const ShapeJacobians& jj = body_j.jacobians;
  const int ri = pi.edge_count();
  const int rj = pj.edge_count();
  const int ni = ji.state_dim;
  const int nj = jj.state_dim;

  ComponentTable t;
  t.n_i = ni;
  t.n_j = nj;
  t.phi.resize(ri, rj);
  t.psi.resize(rj, ri);
  t.grad_phi.resize(ni + nj, ri * rj);
  t.grad_psi.resize(ni + nj, rj * ri);

  for (int k = 0; k < ri; ++k) {
    for (int l = 0; l < rj; ++l) {
      t.phi(k, l) = pi.normals[k].dot(pj.vertices[l]) - pi.offsets[k];
      auto col = t.grad_phi.col(k * rj + l);
      col.head(ni) = ji.d_normal[k].transpose() * pj.vertices[l] - ji.d_offset[k].transpose();
      col.tail(nj) = jj.d_vertex[l].transpose() * pi.normals[k];
    }
  }
  for (int k = 0; k < rj; ++k) {
    for (int l = 0; l < ri; ++l) {
      t.psi(k, l) = pj.normals[k].dot(pi.vertices[l]) - pj.offsets[k];
      auto col = t.grad_psi.col(k * ri + l);
      col.head(ni) = ji.d_vertex[l].transpose() * pj.normals[k];
      col.tail(nj) = jj.d_normal[k].transpose() * pi.vertices[l] - jj.d_offset[k].transpose();
    }
  }
  return t;
}

double h_a(const ComponentTable& table) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < table.phi.rows(); ++k)
    best = std::max(best, table.phi.row(k).minCoeff());
  for (int k = 0; k < table.psi.rows(); ++k)
    best = std::max(best, table.psi.row(k).minCoeff());
  return best;
}

namespace {

// Log-domain softmin of one table row: value s = m - ln(S)/kappa with
// m = min_l row(l) and S = sum_l exp(-kappa (row(l) - m)) in [1, cols].
struct RowSoftmin {
  double s = 0.0;
  double m = 0.0;
  double sum = 1.0;
};

RowSoftmin row_softmin(const Eigen::MatrixXd& rows, int k, double kappa) {
  RowSoftmin r;
  r.m = rows.row(k).minCoeff();
  r.sum = 0.0;
  for (int l = 0; l < rows.cols(); ++l) r.sum += std::exp(-kappa * (rows(k, l) - r.m));
  r.s = r.m - std::log(r.sum) / kappa;
  return r;
}

}  // namespace

BarrierEval smooth_h(const ComponentTable& table, const CbfParams& params) {
  const double kappa = params.kappa;
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const int rows_phi = static_cast<int>(table.phi.rows());
  const int rows_psi = static_cast<int>(table.psi.rows());
  const int total_rows = rows_phi + rows_psi;
  if (total_rows == 0) throw std::invalid_argument("component table is empty");

  std::vector<RowSoftmin> rows(total_rows);
  for (int k = 0; k < rows_phi; ++k) rows[k] = row_softmin(table.phi, k, kappa);
  for (int k = 0; k < rows_psi; ++k) rows[rows_phi + k] = row_softmin(table.psi, k, kappa);

  double outer_max = -std::numeric_limits<double>::infinity();
  for (const RowSoftmin& r : rows) outer_max = std::max(outer_max, r.s);
  double outer_sum = 0.0;
  for (const RowSoftmin& r : rows) outer_sum += std::exp(kappa * (r.s - outer_max));

  BarrierEval eval;
  eval.value = outer_max + std::log(outer_sum) / kappa - params.buffer_b / kappa;

  const int cols_phi = static_cast<int>(table.phi.cols());
  const int cols_psi = static_cast<int>(table.psi.cols());
  eval.weights.resize(rows_phi * cols_phi + rows_psi * cols_psi);
  // Weight of component (k, l): softmax weight of row k times softmin weight
  // of entry l inside the row. Both factors are normalised sums of
  // exp of nonpositive arguments.
  auto fill_weights = [&](const Eigen::MatrixXd& mat, int row_offset, int weight_offset) {
    for (int k = 0; k < mat.rows(); ++k) {
      const RowSoftmin& r = rows[row_offset + k];
      const double w_row = std::exp(kappa * (r.s - outer_max)) / outer_sum;
      for (int l = 0; l < mat.cols(); ++l) {
        const double w_entry = std::exp(-kappa * (mat(k, l) - r.m)) / r.sum;
        eval.weights(weight_offset + k * mat.cols() + l) = w_row * w_entry;
      }
    }
  };
  fill_weights(table.phi, 0, 0);
  fill_weights(table.psi, rows_phi, rows_phi * cols_phi);

  const int n = table.n_i + table.n_j;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  if (table.grad_phi.cols() > 0)
    grad += table.grad_phi * eval.weights.head(rows_phi * cols_phi);
  if (table.grad_psi.cols() > 0)
    grad += table.grad_psi * eval.weights.tail(rows_psi * cols_psi);
  eval.grad_i = grad.head(table.n_i);
  eval.grad_j = grad.tail(table.n_j);
  return eval;
}

std::pair<double, double> error_bound(const CbfParams& params, int edges_i, int edges_j) {
  if (!(params.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (edges_i < 3 || edges_j < 3) throw std::invalid_argument("polygons need >= 3 edges");
  const double b1 = static_cast<double>(edges_i + edges_j);
  const double b2 = static_cast<double>(std::max(edges_i, edges_j));
  const double lower = (std::log(b2) + params.buffer_b) / params.kappa;
  const double upper = (std::log(b1) - params.buffer_b) / params.kappa;
  return {lower, upper};
}

}  // namespace pca
