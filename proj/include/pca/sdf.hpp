#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pca/geometry.hpp"

namespace pca {

// Exact signed distance between two polygons plus a witness pair:
//   value > 0: gap, |witness_j - witness_i| = value
//   value < 0: penetration depth, witnesses on the two boundaries
struct SdfResult {
  double value = 0.0;
  Eigen::Vector2d witness_i{0.0, 0.0};
  Eigen::Vector2d witness_j{0.0, 0.0};
};

// Signed distance through the Minkowski difference D = P_j (-) P_i: the
// distance from the origin to the boundary of D, negated when the origin is
// inside D. Ties between boundary edges go to the lowest edge index.
SdfResult signed_distance(const ConvexPolygon& poly_i, const ConvexPolygon& poly_j);

// Distance from an arbitrary point to the polygon boundary (always >= 0).
double distance_point_to_boundary(const Eigen::Vector2d& point, const ConvexPolygon& poly);

// Uniform boundary samples: samples_per_edge per edge including the vertices,
// shared vertices emitted once. Requires samples_per_edge >= 2.
std::vector<Eigen::Vector2d> sample_boundary(const ConvexPolygon& poly, int samples_per_edge);

// Nearest pair among sampled boundary points, lowest-index pair on ties.
// Throws OverlapError unless the polygons are strictly separated.
std::pair<Eigen::Vector2d, Eigen::Vector2d> nearest_boundary_points(
    const ConvexPolygon& poly_i, const ConvexPolygon& poly_j, int samples_per_edge);

}  // namespace pca
