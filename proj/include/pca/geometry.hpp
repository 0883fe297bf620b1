#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "pca/errors.hpp"
#include "pca/tolerances.hpp"

namespace pca {

// Counterclockwise rotation by theta.
Eigen::Matrix2d rotation(double theta);

// Quarter-turn matrix B = rotation(pi/2) = [0 -1; 1 0]. For a clockwise
// vertex loop, B maps an edge direction to the outward normal.
Eigen::Matrix2d quarter_turn();

// Compact convex polygon in dual representation:
//   vertices  v_k, clockwise, strictly convex
//   normals   A_k, unit outward normal of edge v_k -> v_{k+1}
//   offsets   b_k = A_k . v_k, so the set is { z : A_k . z <= b_k  for all k }
struct ConvexPolygon {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<Eigen::Vector2d> normals;
  std::vector<double> offsets;

  // Builds normals/offsets from a clockwise vertex loop and validates.
  static ConvexPolygon from_vertices(std::vector<Eigen::Vector2d> verts);

  int edge_count() const { return static_cast<int>(vertices.size()); }

  bool contains(const Eigen::Vector2d& point, double slack = tol::kGeometric) const;

  // Throws ValidationError naming the first violated invariant: unit normals,
  // clockwise strictly convex loop, every vertex inside every halfspace, and
  // each halfspace supported by exactly its own two edge vertices (which also
  // rules out redundant halfspaces).
  void validate() const;
};

// Body-frame vertex list of a rigid polygonal body, clockwise.
struct RigidPolygonShape {
  std::vector<Eigen::Vector2d> vertices;

  void validate() const;  // same invariants as the polygon it generates
};

struct PlanarPose {
  Eigen::Vector2d position{0.0, 0.0};
  double theta = 0.0;
};

// Derivatives of one polygon's dual representation with respect to the
// state x that places it (rigid pose: n = 3, translation only: n = 2):
//   d_normal[k]  = dA_k/dx   (2 x n)
//   d_offset[k]  = db_k/dx   (1 x n)
//   d_vertex[k]  = dv_k/dx   (2 x n, full row rank)
struct ShapeJacobians {
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> d_normal;
  std::vector<Eigen::RowVectorXd> d_offset;
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> d_vertex;
  int state_dim = 0;
};

// Polygon plus the Jacobians of its representation, the unit consumed by the
// barrier layer.
struct PosedPolygon {
  ConvexPolygon polygon;
  ShapeJacobians jacobians;
};

// World polygon of a rigid body at a planar pose:
//   v_k = p + R(theta) l_k,   A_k = B R(theta) dl_k / |dl_k|,   b_k = A_k . v_k
ConvexPolygon polygon_from_pose(const RigidPolygonShape& shape, const PlanarPose& pose);

// Jacobians of the representation above w.r.t. x = (p_x, p_y, theta):
//   dA_k/dx = [0  B A_k],   dv_k/dx = [I  R(theta + pi/2) l_k],
//   db_k/dx = [A_k^T  (B A_k) . v_k + A_k . (R(theta + pi/2) l_k)]
ShapeJacobians shape_jacobians(const RigidPolygonShape& shape, const PlanarPose& pose);

// Jacobians when only the centre translates (state x = p, attitude frozen):
// dv_k/dx = I, dA_k/dx = 0, db_k/dx = A_k^T.
ShapeJacobians translation_jacobians(const ConvexPolygon& world_polygon);

PosedPolygon posed_polygon(const RigidPolygonShape& shape, const PlanarPose& pose);

// Triangle spanned by three agent positions given in clockwise order.
ConvexPolygon formation_polygon(const std::array<Eigen::Vector2d, 3>& positions);

// Convex hull of the pairwise differences { vj - vi }, i.e. the Minkowski
// difference P_j (-) P_i. Collinear hull points are dropped.
ConvexPolygon minkowski_difference(const ConvexPolygon& poly_i, const ConvexPolygon& poly_j);

// h_P(direction) = max_k direction . v_k. Direction need not be unit but must
// be nonzero.
double support_value(const ConvexPolygon& poly, const Eigen::Vector2d& direction);

// Reads {"vertices": [[x, y], ...]} (body frame, clockwise) and validates.
RigidPolygonShape load_shape(const std::string& path);

}  // namespace pca
