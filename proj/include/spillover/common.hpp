#pragma once

#include <stdexcept>

namespace spillover {

// Operations that enumerate all 2^n assignments refuse to run above this
// bound unless the caller raises it (hard cap kMaxExhaustiveBound).
inline constexpr int kDefaultExhaustiveBound = 16;
inline constexpr int kMaxExhaustiveBound = 24;

// Thrown when an exhaustive operation is asked to run above its bound.
struct BoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on unreadable or malformed input files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spillover
