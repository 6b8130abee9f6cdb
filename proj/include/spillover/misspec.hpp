#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spillover/common.hpp"
#include "spillover/model.hpp"
#include "spillover/structure.hpp"

namespace spillover {

// Weights linking the misspecified average spillover effect to the true
// spillover coefficients:
//   gamma_breve = (1/n) sum_i sum_r gamma_ir |N_i^r| w[i][r].
// w_by_s[i][r-1][s-1] is the per-conditioning-event decomposition
//   |N_i^r ∩ Na_i^s| / |Na_i^s|        (Na = assumed shells; 0 if Na_i^s empty),
// the probability that the one treated unit of assumed shell s lies in the
// true shell r. The combined weight is
//   w[i][r] = sum_s w_by_s[i][r-1][s-1] |Na_i^s| / |N_i^r|
//           = |N_i^r ∩ (union of assumed shells)| / |N_i^r|,
// defined as 0 when N_i^r is empty. Weights are nonnegative and need not sum
// to one across r.
struct MisspecWeights {
  std::vector<std::vector<double>> w;                    // [i][r-1]
  std::vector<std::vector<std::vector<double>>> w_by_s;  // [i][r-1][s-1]
};

// Requires matching n and radius and two valid structures.
MisspecWeights misspec_weights(const InterferenceStructure& truth,
                               const InterferenceStructure& assumed);

// Closed-form misspecified average spillover effect (via the weights above).
double misspec_gamma_closed(const OutcomeModel& m, const InterferenceStructure& truth,
                            const InterferenceStructure& assumed);

struct DefinitionalGamma {
  double gamma_breve = 0.0;
  double p = 0.0;                            // design probability used
  std::vector<std::pair<int, int>> skipped;  // (i, r) with empty assumed shell
};

// Definitional route: conditional expected outcomes at the basis signatures
// of the assumed structure, by exact enumeration of all 2^n Bernoulli(p)
// weighted assignments (no Monte Carlo fallback), then
//   gamma_breve = sum_r (1/n) sum_i (ybar_i(e_{r+1}) - ybar_i(e_0)) |Na_i^r|.
// Units whose assumed shell r is empty condition on an impossible event;
// they contribute 0 and are listed in `skipped`. The result does not depend
// on p. Throws BoundExceeded when n exceeds the bound.
DefinitionalGamma misspec_gamma_definitional(const OutcomeModel& m,
                                             const InterferenceStructure& truth,
                                             const InterferenceStructure& assumed, double p,
                                             int exhaustive_bound = kDefaultExhaustiveBound);

// Witness-assignment contrasts of the correctly specified exposure response:
// value_e0[i] = y_i(no one treated), value_e1[i] = y_i(only i treated),
// value_shell[i][r-1] = y_i(exactly one unit of shell(i, r) treated), plus
// the reconstruction of the average direct / spillover effects from those
// contrasts and the directly computed estimands for comparison.
struct ContrastIdentityReport {
  std::vector<double> value_e0;
  std::vector<double> value_e1;
  std::vector<std::vector<double>> value_shell;  // NaN where the shell is empty
  double beta_bar_reconstructed = 0.0;
  double gamma_bar_reconstructed = 0.0;
  Estimands reference;
  std::vector<std::pair<int, int>> skipped;  // (i, r) with empty shell
};

ContrastIdentityReport contrast_identities(const OutcomeModel& m,
                                           const InterferenceStructure& s);

struct MisspecReport {
  double gamma_breve_closed = 0.0;
  std::optional<double> gamma_breve_definitional;  // absent when not computed
  double definitional_p = 0.0;
  MisspecWeights weights;
  double gamma_bar = 0.0;
  double beta_bar = 0.0;
  double policy_effect = 0.0;
  bool sign_agree = false;       // sign(gamma_breve_closed) == sign(policy_effect)
  double magnitude_ratio = 0.0;  // |gamma_breve_closed| / |policy_effect| (may be inf/nan)
};

MisspecReport misspec_report(const OutcomeModel& m, const InterferenceStructure& truth,
                             const InterferenceStructure& assumed, double p,
                             bool want_definitional,
                             int exhaustive_bound = kDefaultExhaustiveBound);

// Weights CSV: `i,r,w`.
void write_weights_csv(std::ostream& out, const MisspecWeights& weights);

// Report CSV: gamma_breve_closed,gamma_breve_definitional,gamma_bar,beta_bar,
// policy_effect,sign_agree,magnitude_ratio[,p_grid_spread]. The optional
// column appears only when a p-grid spread was computed.
void write_misspec_report_csv(std::ostream& out, const MisspecReport& report,
                              std::optional<double> p_grid_spread = std::nullopt);

enum class AdversarialKind { sign_flip, magnitude_inflation, cancellation };

struct AdversarialInstance {
  OutcomeModel model;
  InterferenceStructure truth;
  InterferenceStructure assumed;
  MisspecReport report;  // includes the definitional (enumeration) value
};

// Deterministic parameterized families demonstrating that a misspecified
// spillover effect can disagree in sign with the policy effect, dwarf it in
// magnitude, or be large while the policy effect is exactly zero. Each
// instance is verified at construction against the enumeration route; a
// failed construction is a defect and throws std::logic_error.
AdversarialInstance adversarial_instance(AdversarialKind kind);

std::optional<AdversarialKind> adversarial_kind_from_string(const std::string& name);
std::string to_string(AdversarialKind kind);

}  // namespace spillover
