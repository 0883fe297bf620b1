#include "pca/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

namespace pca {

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix2d quarter_turn() {
  Eigen::Matrix2d b;
  b << 0.0, -1.0, 1.0, 0.0;
  return b;
}

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

std::string index_msg(const char* what, int k) {
  return std::string(what) + " (index " + std::to_string(k) + ")";
}

}  // namespace

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Eigen::Vector2d> verts) {
  ConvexPolygon poly;
  poly.vertices = std::move(verts);
  const int r = poly.edge_count();
  if (r < 3) throw ValidationError("polygon needs at least 3 vertices");
  const Eigen::Matrix2d b_turn = quarter_turn();
  poly.normals.resize(r);
  poly.offsets.resize(r);
  for (int k = 0; k < r; ++k) {
    const Eigen::Vector2d edge = poly.vertices[(k + 1) % r] - poly.vertices[k];
    const double len = edge.norm();
    if (len < tol::kGeometric) throw ValidationError(index_msg("zero-length edge", k));
    poly.normals[k] = b_turn * (edge / len);
    poly.offsets[k] = poly.normals[k].dot(poly.vertices[k]);
  }
  poly.validate();
  return poly;
}

bool ConvexPolygon::contains(const Eigen::Vector2d& point, double slack) const {
  for (int k = 0; k < edge_count(); ++k) {
    if (normals[k].dot(point) > offsets[k] + slack) return false;
  }
  return true;
}

void ConvexPolygon::validate() const {
  const int r = edge_count();
  if (r < 3) throw ValidationError("polygon needs at least 3 vertices");
  if (static_cast<int>(normals.size()) != r || static_cast<int>(offsets.size()) != r)
    throw ValidationError("vertex/normal/offset counts differ");
  for (int k = 0; k < r; ++k) {
    if (!vertices[k].allFinite() || !normals[k].allFinite() || !std::isfinite(offsets[k]))
      throw ValidationError(index_msg("non-finite polygon data", k));
  }
  for (int k = 0; k < r; ++k) {
    if (std::abs(normals[k].norm() - 1.0) > tol::kUnitNorm)
      throw ValidationError(index_msg("normal is not unit length", k));
  }

  // Turn direction at every vertex: clockwise loops turn right everywhere.
  // Near-zero turns (middle vertex within 1e-9 of the chord) are degenerate.
  int positive_turns = 0;
  for (int k = 0; k < r; ++k) {
    const Eigen::Vector2d a = vertices[k];
    const Eigen::Vector2d b = vertices[(k + 1) % r];
    const Eigen::Vector2d c = vertices[(k + 2) % r];
    const double chord = (c - a).norm();
    if (chord < tol::kGeometric) throw ValidationError(index_msg("repeated vertex", k));
    const double turn = cross2(b - a, c - a);
    if (std::abs(turn) / chord < tol::kGeometric)
      throw ValidationError(index_msg("three consecutive vertices are collinear", k));
    if (turn > 0.0) ++positive_turns;
  }
  if (positive_turns == r) throw ValidationError("vertices are in counterclockwise order");
  if (positive_turns != 0) throw ValidationError("vertices are not in convex position");

  // Halfspace consistency: every vertex inside, and halfspace k supported by
  // exactly its own edge vertices k and k+1 (no redundant halfspace).
  for (int k = 0; k < r; ++k) {
    if (std::abs(normals[k].dot(vertices[k]) - offsets[k]) > tol::kGeometric)
      throw ValidationError(index_msg("offset does not match its edge", k));
    for (int l = 0; l < r; ++l) {
      const double slack = offsets[k] - normals[k].dot(vertices[l]);
      if (slack < -tol::kGeometric)
        throw ValidationError(index_msg("vertex lies outside halfspace", k));
      const bool touches = slack <= tol::kGeometric;
      const bool own = (l == k) || (l == (k + 1) % r);
      if (touches != own)
        throw ValidationError(index_msg("halfspace not supported by exactly its edge", k));
    }
  }
}

void RigidPolygonShape::validate() const {
  ConvexPolygon::from_vertices(vertices);
}

namespace {

// World-frame vertices and dual representation of a shape at a pose; shared
// by polygon_from_pose and shape_jacobians so both see identical numbers.
ConvexPolygon posed(const RigidPolygonShape& shape, const PlanarPose& pose) {
  const Eigen::Matrix2d r_wb = rotation(pose.theta);
  std::vector<Eigen::Vector2d> world(shape.vertices.size());
  for (size_t k = 0; k < shape.vertices.size(); ++k)
    world[k] = pose.position + r_wb * shape.vertices[k];
  return ConvexPolygon::from_vertices(std::move(world));
}

}  // namespace

ConvexPolygon polygon_from_pose(const RigidPolygonShape& shape, const PlanarPose& pose) {
  return posed(shape, pose);
}

ShapeJacobians shape_jacobians(const RigidPolygonShape& shape, const PlanarPose& pose) {
  const ConvexPolygon poly = posed(shape, pose);
  const Eigen::Matrix2d b_turn = quarter_turn();
  const Eigen::Matrix2d r_quarter_ahead = rotation(pose.theta + M_PI / 2.0);
  const int r = poly.edge_count();

  ShapeJacobians jac;
  jac.state_dim = 3;
  jac.d_normal.resize(r);
  jac.d_offset.resize(r);
  jac.d_vertex.resize(r);
  for (int k = 0; k < r; ++k) {
    const Eigen::Vector2d da_dtheta = b_turn * poly.normals[k];       // dA/dtheta
    const Eigen::Vector2d dv_dtheta = r_quarter_ahead * shape.vertices[k];

    jac.d_normal[k].setZero(2, 3);
    jac.d_normal[k].col(2) = da_dtheta;

    jac.d_vertex[k].resize(2, 3);
    jac.d_vertex[k].leftCols<2>() = Eigen::Matrix2d::Identity();
    jac.d_vertex[k].col(2) = dv_dtheta;

    // b = A . v, so db = (dA)^T v + A^T dv.
    jac.d_offset[k].resize(3);
    jac.d_offset[k].head<2>() = poly.normals[k].transpose();
    jac.d_offset[k](2) = da_dtheta.dot(poly.vertices[k]) + poly.normals[k].dot(dv_dtheta);
  }
  return jac;
}

ShapeJacobians translation_jacobians(const ConvexPolygon& world_polygon) {
  const int r = world_polygon.edge_count();
  ShapeJacobians jac;
  jac.state_dim = 2;
  jac.d_normal.assign(r, Eigen::MatrixXd::Zero(2, 2));
  jac.d_vertex.assign(r, Eigen::Matrix2d::Identity());
  jac.d_offset.resize(r);
  for (int k = 0; k < r; ++k) jac.d_offset[k] = world_polygon.normals[k].transpose();
  return jac;
}

PosedPolygon posed_polygon(const RigidPolygonShape& shape, const PlanarPose& pose) {
  return PosedPolygon{polygon_from_pose(shape, pose), shape_jacobians(shape, pose)};
}

ConvexPolygon formation_polygon(const std::array<Eigen::Vector2d, 3>& positions) {
  return ConvexPolygon::from_vertices({positions[0], positions[1], positions[2]});
}

namespace {

// Andrew's monotone chain, counterclockwise output. Points closer than the
// geometric tolerance to a hull chord are dropped.
std::vector<Eigen::Vector2d> hull_ccw(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return (a - b).norm() < tol::kGeometric;
                        }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;

  std::vector<Eigen::Vector2d> hull(2 * n + 1);
  size_t h = 0;
  auto keeps_left_turn = [&](const Eigen::Vector2d& candidate) {
    const Eigen::Vector2d& o = hull[h - 2];
    const Eigen::Vector2d& a = hull[h - 1];
    return cross2(a - o, candidate - o) > tol::kGeometric * (candidate - o).norm();
  };
  for (size_t i = 0; i < n; ++i) {  // lower hull
    while (h >= 2 && !keeps_left_turn(pts[i])) --h;
    hull[h++] = pts[i];
  }
  const size_t lower_end = h + 1;
  for (size_t i = n - 1; i-- > 0;) {  // upper hull
    while (h >= lower_end && !keeps_left_turn(pts[i])) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);  // last point repeats the first
  return hull;
}

}  // namespace

ConvexPolygon minkowski_difference(const ConvexPolygon& poly_i, const ConvexPolygon& poly_j) {
  std::vector<Eigen::Vector2d> diffs;
  diffs.reserve(poly_i.vertices.size() * poly_j.vertices.size());
  for (const Eigen::Vector2d& vj : poly_j.vertices)
    for (const Eigen::Vector2d& vi : poly_i.vertices) diffs.push_back(vj - vi);

  std::vector<Eigen::Vector2d> hull = hull_ccw(std::move(diffs));
  std::reverse(hull.begin(), hull.end());  // clockwise convention
  return ConvexPolygon::from_vertices(std::move(hull));
}

double support_value(const ConvexPolygon& poly, const Eigen::Vector2d& direction) {
  if (direction.norm() < tol::kUnitNorm)
    throw std::invalid_argument("support direction must be nonzero");
  double best = -std::numeric_limits<double>::infinity();
  for (const Eigen::Vector2d& v : poly.vertices) best = std::max(best, direction.dot(v));
  return best;
}

RigidPolygonShape load_shape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open shape file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("shape file " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array())
    throw ValidationError("shape file " + path + ": expected object with a \"vertices\" array");

  RigidPolygonShape shape;
  for (const auto& entry : doc["vertices"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
      throw ValidationError("shape file " + path + ": each vertex must be a [x, y] number pair");
    shape.vertices.emplace_back(entry[0].get<double>(), entry[1].get<double>());
  }
  shape.validate();
  return shape;
}

}  // namespace pca
