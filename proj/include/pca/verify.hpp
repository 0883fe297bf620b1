#pragma once
// Randomized property suite: every module is cross-checked against an
// independent oracle (central finite differences, dense boundary sampling,
// a full-pivot KKT solve, long-double reference summation, energy
// conservation). The same fixtures back the unit tests and the demo configs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pca/cbf.hpp"
#include "pca/filter.hpp"
#include "pca/geometry.hpp"

namespace pca {

struct CheckResult {
  std::string name;
  bool passed = true;
  long trials = 0;
  double worst = 0.0;      // worst observed error (or ratio, where noted)
  double tolerance = 0.0;  // bound `worst` was held against
  std::string detail;      // first failure, empty when passed
};

struct VerifyCounts {
  long poses = 2000;     // random pose pairs for the barrier identities
  long shapes = 300;     // random polygons for representation checks
  long gradients = 300;  // finite-difference probes
  long filters = 400;    // QP cross-checks per filter variant
};

struct PropertyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Body-frame fixtures shared by tests and the bundled configs.
RigidPolygonShape vehicle_triangle();
RigidPolygonShape vehicle_trapezoid();
RigidPolygonShape crane_container();
RigidPolygonShape crane_obstacle();

// Random polygon with 3..8 vertices on a circle of radius about `scale`
// (cyclic, hence strictly convex), listed clockwise.
RigidPolygonShape random_convex_shape(std::mt19937_64& rng, double scale = 1.0);

// Reference solve of the half-split filter: one small QP per agent,
// minimize |u - u0|^2 subject to grad . (f + g u) >= -(1/2) alpha h,
// solved through its KKT system with full-pivot LU. Returns stacked inputs.
Eigen::VectorXd qp_reference_filter(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j,
                                    const Eigen::MatrixXd& g_i, const Eigen::MatrixXd& g_j,
                                    const Eigen::VectorXd& u0_i, const Eigen::VectorXd& u0_j,
                                    const BarrierEval& barrier, const FilterConfig& cfg);

PropertyReport run_property_suite(std::uint64_t seed, const VerifyCounts& counts);

std::string verify_json(const PropertyReport& report, std::uint64_t seed);

}  // namespace pca
