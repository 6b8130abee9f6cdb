#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spillover/structure.hpp"

namespace spillover {

// Produces an assumed interference structure from a true one. Seeded kinds
// are deterministic given their seed.
struct MisspecTransform {
  enum class Kind { shell_swap, radius_shift, edge_rewire, subset_sample, replace_with };

  Kind kind = Kind::replace_with;
  double rho = 0.0;        // edge_rewire: per-member rewire probability, in [0, 1]
  double kappa = 1.0;      // subset_sample: per-member keep probability, in (0, 1]
  std::uint64_t seed = 0;  // edge_rewire / subset_sample
  std::optional<InterferenceStructure> replacement;  // replace_with

  static MisspecTransform shell_swap();
  static MisspecTransform radius_shift();
  static MisspecTransform edge_rewire(double rho, std::uint64_t seed);
  static MisspecTransform subset_sample(double kappa, std::uint64_t seed);
  static MisspecTransform replace_with(InterferenceStructure assumed);
};

// Applies the transform. The result has the same n and radius as the input
// and satisfies all structure invariants.
//   shell_swap    reverses shell order (radius 2: exchanges shells 1 and 2)
//   radius_shift  rotates shells down by one: new shell r = old shell r+1,
//                 new shell R = old shell 1
//   edge_rewire   keeps shell sizes, replaces each member with prob rho by a
//                 uniform unit outside {i} and i's current shells; errors if
//                 no legal replacement exists
//   subset_sample keeps each member independently with prob kappa (shells
//                 may come out empty)
//   replace_with  returns the supplied structure (validated, same n/radius)
InterferenceStructure apply_misspec(const InterferenceStructure& s, const MisspecTransform& t);

std::string to_string(MisspecTransform::Kind k);
std::optional<MisspecTransform::Kind> transform_kind_from_string(const std::string& name);

}  // namespace spillover
