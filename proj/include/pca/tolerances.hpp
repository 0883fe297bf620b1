#pragma once

// Central tolerance table. Every module compares against these instead of
// scattering magic numbers.
namespace pca::tol {

inline constexpr double kUnitNorm = 1e-12;   // unit-vector / exact-identity checks
inline constexpr double kGeometric = 1e-9;   // collinearity, halfspace membership, sign bands
inline constexpr double kFiniteDiff = 1e-6;  // central-difference step for gradient checks

}  // namespace pca::tol
