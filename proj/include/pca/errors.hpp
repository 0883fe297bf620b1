#pragma once

#include <stdexcept>
#include <string>

namespace pca {

// Geometry input that violates a documented invariant. The message names the
// first violated invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Operation that is only defined for disjoint polygons was called on an
// overlapping (or touching) pair.
struct OverlapError : std::runtime_error {
  explicit OverlapError(const std::string& what) : std::runtime_error(what) {}
};

// Safety filter could not produce a correction (degenerate gradient while the
// constraint is active, bad weight matrix, ...).
struct FilterError : std::runtime_error {
  explicit FilterError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pca
