#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pca/errors.hpp"
#include "pca/sdf.hpp"
#include "pca/verify.hpp"

using namespace pca;

namespace {

ConvexPolygon square_at(double cx, double cy, double half = 0.5) {
  return ConvexPolygon::from_vertices({{cx + half, cy + half},
                                       {cx + half, cy - half},
                                       {cx - half, cy - half},
                                       {cx - half, cy + half}});
}

}  // namespace

TEST_CASE("signed distance of axis-aligned squares") {
  const ConvexPolygon a = square_at(0, 0);

  SUBCASE("separated by a 2.0 gap") {
    const SdfResult r = signed_distance(a, square_at(3, 0));
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.witness_i.x() == doctest::Approx(0.5));
    CHECK(r.witness_j.x() == doctest::Approx(2.5));
    CHECK((r.witness_i - r.witness_j).norm() == doctest::Approx(2.0));
  }
  SUBCASE("overlapping by 0.4") {
    const SdfResult r = signed_distance(a, square_at(0.6, 0));
    CHECK(r.value == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK((r.witness_i - r.witness_j).norm() == doctest::Approx(0.4));
  }
  SUBCASE("touching faces") {
    const SdfResult r = signed_distance(a, square_at(1.0, 0));
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("symmetry") {
    const ConvexPolygon b = square_at(2.2, 1.3);
    CHECK(signed_distance(a, b).value == doctest::Approx(signed_distance(b, a).value));
  }
}

TEST_CASE("witnesses sit on the boundaries") {
  const ConvexPolygon a = square_at(0, 0);
  const ConvexPolygon b = square_at(1.7, 0.9);
  const SdfResult r = signed_distance(a, b);
  CHECK(distance_point_to_boundary(r.witness_i, a) < 1e-9);
  CHECK(distance_point_to_boundary(r.witness_j, b) < 1e-9);
  CHECK((r.witness_i - r.witness_j).norm() == doctest::Approx(std::abs(r.value)));
}

TEST_CASE("point to boundary distance") {
  const ConvexPolygon sq = square_at(0, 0);
  CHECK(distance_point_to_boundary({0, 0}, sq) == doctest::Approx(0.5));
  CHECK(distance_point_to_boundary({0.5, 0.2}, sq) == doctest::Approx(0.0));
  CHECK(distance_point_to_boundary({2.5, 0}, sq) == doctest::Approx(2.0));
  CHECK(distance_point_to_boundary({1.5, 1.5}, sq) ==
        doctest::Approx(std::sqrt(2.0)));  // nearest at the corner
}

TEST_CASE("boundary sampling") {
  const ConvexPolygon sq = square_at(0, 0);
  CHECK(sample_boundary(sq, 2).size() == 4);  // corners only, shared ones once
  CHECK(sample_boundary(sq, 3).size() == 8);
  CHECK(sample_boundary(sq, 11).size() == 40);
  CHECK_THROWS_AS(sample_boundary(sq, 1), std::invalid_argument);

  for (const auto& s : sample_boundary(sq, 7))
    CHECK(distance_point_to_boundary(s, sq) < 1e-12);
}

TEST_CASE("nearest boundary points between aligned faces") {
  const ConvexPolygon a = square_at(0, 0);
  const ConvexPolygon b = square_at(3, 0);
  for (const int density : {2, 5, 20}) {
    const auto [wi, wj] = nearest_boundary_points(a, b, density);
    CHECK((wi - wj).norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(wi.x() == doctest::Approx(0.5));
    CHECK(wj.x() == doctest::Approx(2.5));
  }
}

TEST_CASE("nearest boundary points require strict separation") {
  const ConvexPolygon a = square_at(0, 0);
  CHECK_THROWS_AS(nearest_boundary_points(a, square_at(0.6, 0), 10), OverlapError);
  CHECK_THROWS_AS(nearest_boundary_points(a, square_at(1.0, 0), 10), OverlapError);
}

TEST_CASE("rotated pair agrees with the support gap") {
  // Corner-to-face separation along x: the distance equals the support gap
  // in the separating direction.
  const RigidPolygonShape sq = crane_container();
  const ConvexPolygon a = polygon_from_pose(sq, {{0.0, 0.0}, M_PI / 4});
  const ConvexPolygon b = polygon_from_pose(sq, {{2.0, 0.0}, 0.0});
  const SdfResult r = signed_distance(a, b);
  const Eigen::Vector2d d(-1.0, 0.0);
  const double gap = -(support_value(a, -d) + support_value(b, d));
  CHECK(r.value == doctest::Approx(gap).epsilon(1e-12));
}
