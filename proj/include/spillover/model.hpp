#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spillover/structure.hpp"

namespace spillover {

// Treatment assignment vector, entries in {0, 1}.
struct Assignment {
  std::vector<std::uint8_t> z;

  static Assignment zeros(int n);
  static Assignment single_treated(int n, int unit);
  static Assignment from_mask(int n, std::uint64_t mask);  // bit i -> z_i

  int n() const { return static_cast<int>(z.size()); }
  int treated_count() const;

  bool operator==(const Assignment&) const = default;
};

// Linear potential-outcome model: per-unit baseline alpha, direct treatment
// effect beta, and spillover effect gamma[i][r-1] per additional treated
// unit at shell distance r.
struct OutcomeModel {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> gamma;  // [i][r - 1]

  int n() const { return static_cast<int>(alpha.size()); }
  int radius() const { return alpha.empty() ? 0 : static_cast<int>(gamma.front().size()); }
};

struct Estimands {
  double beta_bar = 0.0;       // average direct effect
  double gamma_bar = 0.0;      // average spillover effect
  double policy_effect = 0.0;  // beta_bar + gamma_bar, stored as that exact sum
};

// Throws std::invalid_argument when model and structure shapes disagree.
void check_dimensions(const OutcomeModel& m, const InterferenceStructure& s);

// y_i = alpha_i + beta_i z_i + sum_r gamma_{ir} * (# treated in shell(i, r))
std::vector<double> eval_outcomes(const OutcomeModel& m, const InterferenceStructure& s,
                                  const Assignment& a);

Estimands estimands(const OutcomeModel& m, const InterferenceStructure& s);

// Average outcome change from treating one unit drawn uniformly at random,
// computed the slow way: (1/n) sum_k [ sum_i y_i(1_k) - sum_i y_i(0) ].
// Independent route to Estimands::policy_effect.
double policy_effect_oracle(const OutcomeModel& m, const InterferenceStructure& s);

// All coefficients iid uniform on [lo, hi] from a SplitMix64 stream.
OutcomeModel random_model(const InterferenceStructure& s, double lo, double hi,
                          std::uint64_t seed);

// Model file: one line per unit, `i alpha beta gamma_1 ... gamma_R`,
// whitespace-separated 17-significant-digit decimals; '#' comments ignored.
// Round-trips losslessly.
void write_model(std::ostream& out, const OutcomeModel& m);
OutcomeModel read_model(std::istream& in);
void write_model_file(const std::string& path, const OutcomeModel& m);
OutcomeModel read_model_file(const std::string& path);

}  // namespace spillover
