#include "pca/sdf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pca {

namespace {

// Closest point on segment [a, b] to p, returned as the interpolation
// parameter in [0, 1].
double segment_parameter(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return 0.0;
  return std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
}

struct BoundaryHit {
  double distance = std::numeric_limits<double>::infinity();
  int edge = -1;
  double t = 0.0;
};

BoundaryHit closest_boundary_point(const Eigen::Vector2d& p, const ConvexPolygon& poly) {
  BoundaryHit best;
  for (int k = 0; k < poly.edge_count(); ++k) {
    const Eigen::Vector2d& a = poly.vertices[k];
    const Eigen::Vector2d& b = poly.vertices[(k + 1) % poly.edge_count()];
    const double t = segment_parameter(p, a, b);
    const double d = (a + t * (b - a) - p).norm();
    if (d < best.distance) best = BoundaryHit{d, k, t};
  }
  return best;
}

// Which (vertex of poly_i, vertex of poly_j) pair produced a given Minkowski
// difference vertex. Hull vertices are copies of difference points, so the
// match is exact; the nearest pair is kept as a guard.
std::pair<int, int> difference_provenance(const Eigen::Vector2d& diff_vertex,
                                          const ConvexPolygon& poly_i,
                                          const ConvexPolygon& poly_j) {
  std::pair<int, int> best{0, 0};
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < poly_i.edge_count(); ++k) {
    for (int l = 0; l < poly_j.edge_count(); ++l) {
      const double d = (poly_j.vertices[l] - poly_i.vertices[k] - diff_vertex).norm();
      if (d < best_d) {
        best_d = d;
        best = {k, l};
      }
    }
  }
  return best;
}

// Strict separation test on the support margins of both halfspace families;
// equals the sign of the exact signed distance.
bool strictly_separated(const ConvexPolygon& poly_i, const ConvexPolygon& poly_j) {
  double margin = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < poly_i.edge_count(); ++k) {
    double row = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector2d& v : poly_j.vertices)
      row = std::min(row, poly_i.normals[k].dot(v) - poly_i.offsets[k]);
    margin = std::max(margin, row);
  }
  for (int k = 0; k < poly_j.edge_count(); ++k) {
    double row = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector2d& v : poly_i.vertices)
      row = std::min(row, poly_j.normals[k].dot(v) - poly_j.offsets[k]);
    margin = std::max(margin, row);
  }
  return margin > 0.0;
}

}  // namespace

SdfResult signed_distance(const ConvexPolygon& poly_i, const ConvexPolygon& poly_j) {
  const ConvexPolygon diff = minkowski_difference(poly_i, poly_j);
  const int r = diff.edge_count();

  // Origin inside D <=> every offset nonnegative (A_k . 0 <= b_k).
  bool inside = true;
  for (double b : diff.offsets) inside = inside && b >= 0.0;

  const BoundaryHit hit = closest_boundary_point(Eigen::Vector2d::Zero(), diff);

  const auto [k1, l1] =
      difference_provenance(diff.vertices[hit.edge], poly_i, poly_j);
  const auto [k2, l2] =
      difference_provenance(diff.vertices[(hit.edge + 1) % r], poly_i, poly_j);

  SdfResult res;
  res.value = inside ? -hit.distance : hit.distance;
  res.witness_i = (1.0 - hit.t) * poly_i.vertices[k1] + hit.t * poly_i.vertices[k2];
  res.witness_j = (1.0 - hit.t) * poly_j.vertices[l1] + hit.t * poly_j.vertices[l2];
  return res;
}

double distance_point_to_boundary(const Eigen::Vector2d& point, const ConvexPolygon& poly) {
  return closest_boundary_point(point, poly).distance;
}

std::vector<Eigen::Vector2d> sample_boundary(const ConvexPolygon& poly, int samples_per_edge) {
  if (samples_per_edge < 2)
    throw std::invalid_argument("samples_per_edge must be at least 2");
  const int r = poly.edge_count();
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<size_t>(r) * (samples_per_edge - 1));
  for (int k = 0; k < r; ++k) {
    const Eigen::Vector2d& a = poly.vertices[k];
    const Eigen::Vector2d& b = poly.vertices[(k + 1) % r];
    // The edge endpoint is the next edge's first sample, so emit it once.
    for (int m = 0; m + 1 < samples_per_edge; ++m) {
      const double t = static_cast<double>(m) / (samples_per_edge - 1);
      pts.push_back(a + t * (b - a));
    }
  }
  return pts;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> nearest_boundary_points(
    const ConvexPolygon& poly_i, const ConvexPolygon& poly_j, int samples_per_edge) {
  if (!strictly_separated(poly_i, poly_j))
    throw OverlapError("nearest boundary direction undefined: polygons are not disjoint");

  const std::vector<Eigen::Vector2d> si = sample_boundary(poly_i, samples_per_edge);
  const std::vector<Eigen::Vector2d> sj = sample_boundary(poly_j, samples_per_edge);
  std::pair<Eigen::Vector2d, Eigen::Vector2d> best{si[0], sj[0]};
  double best_d = std::numeric_limits<double>::infinity();
  for (const Eigen::Vector2d& wi : si) {
    for (const Eigen::Vector2d& wj : sj) {
      const double d = (wj - wi).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = {wi, wj};
      }
    }
  }
  return best;
}

}  // namespace pca
