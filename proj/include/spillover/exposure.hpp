#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spillover/common.hpp"
#include "spillover/model.hpp"
#include "spillover/structure.hpp"

namespace spillover {

// Exposure signature of one unit: its own treatment and the treated count in
// each of its shells. Only integer lattice points are attainable; equality
// is exact integer equality, never toleranced.
struct ExposureSignature {
  int own = 0;
  std::vector<int> counts;  // length = radius

  bool operator==(const ExposureSignature&) const = default;

  // Basis signatures: e_0 all zero, e_1 own treated only, e_{r+1} exactly one
  // treated at shell r. index runs 0..radius+1.
  static ExposureSignature basis(int radius, int index);

  // 0..radius+1 when this is a basis signature, -1 otherwise.
  int basis_index() const;

  std::string str() const;  // "own:c1,...,cR"
};

ExposureSignature exposure(const InterferenceStructure& s, const Assignment& a, int i);

// Bernoulli(p) probability that unit i realizes sig:
//   p^own (1-p)^(1-own) * prod_r C(m_r, c_r) p^{c_r} (1-p)^{m_r - c_r}
// with m_r = |shell(i, r)|. Zero whenever some c_r exceeds m_r (the
// signature is unattainable). Requires 0 < p < 1.
double exposure_probability(const InterferenceStructure& s, double p, int i,
                            const ExposureSignature& sig);

// Every attainable signature of unit i (own in {0,1}, counts within shell
// sizes). Intended for desk-scale normalization checks.
std::vector<ExposureSignature> attainable_signatures(const InterferenceStructure& s, int i);

struct ProbabilityRow {
  int unit = 0;
  ExposureSignature sig;
  double probability = 0.0;
};

// Basis-signature probabilities e_0..e_{R+1} for every unit.
std::vector<ProbabilityRow> basis_probability_table(const InterferenceStructure& s, double p);

// CSV `i,signature,probability`; the signature field is double-quoted since
// its serialization contains commas.
void write_probability_table_csv(std::ostream& out, const std::vector<ProbabilityRow>& rows);

struct SpecCheckWitness {
  Assignment z;
  Assignment z_alt;
  int unit = 0;
};

struct SpecCheckResult {
  bool ok = true;
  std::optional<SpecCheckWitness> witness;
};

// Exhaustively checks whether the candidate structure's exposure signature
// determines outcomes under the truth: groups all 2^n assignments by the
// candidate signature of each unit and demands bit-identical outcomes within
// each group. Returns the first witness pair otherwise. Throws BoundExceeded
// when n exceeds the bound; there is no sampling fallback.
SpecCheckResult verify_correct_specification(const InterferenceStructure& candidate,
                                             const OutcomeModel& model,
                                             const InterferenceStructure& truth,
                                             int exhaustive_bound = kDefaultExhaustiveBound);

}  // namespace spillover
