#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "spillover/common.hpp"
#include "spillover/model.hpp"
#include "spillover/structure.hpp"

namespace spillover {

// One realized experiment: the draw, the observed outcomes, and the design
// probability that generated them. Estimators see nothing else — in
// particular neither the outcome model nor the true structure.
struct ExperimentRecord {
  Assignment z;
  std::vector<double> y;
  double p = 0.5;
  std::uint64_t seed = 0;
};

// iid Bernoulli(p) assignment drawn from SplitMix64(seed), outcomes
// evaluated under the true structure at generation time. Same seed, same
// record, bit for bit.
ExperimentRecord simulate(const OutcomeModel& m, const InterferenceStructure& s, double p,
                          std::uint64_t seed);

struct HTEstimate {
  double beta_hat = 0.0;
  double gamma_hat = 0.0;
  double policy_hat = 0.0;         // beta_hat + gamma_hat, stored as that exact sum
  std::vector<long> basis_counts;  // units realizing e_0 .. e_{R+1} in this draw
};

// Horvitz-Thompson estimates of the average direct and spillover effects.
// Exposures and their probabilities are judged under the assumed structure
// only. A unit whose assumed shell r is empty contributes zero to that
// r-term (the |shell| multiplier is zero; no division by a zero probability
// ever happens). Signatures unrealized in this draw simply contribute zero.
HTEstimate ht_estimate(const InterferenceStructure& assumed, const ExperimentRecord& record);

struct ExpectedHT {
  double beta_hat = 0.0;
  double gamma_hat = 0.0;
  double policy_hat = 0.0;
  std::vector<double> basis_counts;
};

// Exact design expectation of ht_estimate: enumerates all 2^n assignments,
// weights each by p^T (1-p)^(n-T), and averages. Throws BoundExceeded when n
// exceeds the bound.
ExpectedHT exact_expectation_ht(const OutcomeModel& m, const InterferenceStructure& truth,
                                const InterferenceStructure& assumed, double p,
                                int exhaustive_bound = kDefaultExhaustiveBound);

struct MonteCarloSummary {
  long reps = 0;
  double mean_beta_hat = 0.0;
  double mean_gamma_hat = 0.0;
  double mean_policy_hat = 0.0;
  // sample standard deviations; absent when reps == 1
  std::optional<double> sd_beta_hat;
  std::optional<double> sd_gamma_hat;
  std::optional<double> sd_policy_hat;
  double mean_count_e0 = 0.0;
  double mean_count_e1 = 0.0;
  double mean_count_e2plus = 0.0;
};

// Per-replicate CSV: rep,beta_hat,gamma_hat,policy_hat,count_e0,count_e1,count_e2plus
void write_per_rep_csv_header(std::ostream& out);

// reps independent simulate + ht_estimate runs. Replicate k (0-based) draws
// from the stream seeded with stream_seed(master_seed, k); see rng.hpp.
// Optionally streams one CSV row per replicate. Fully reproducible.
MonteCarloSummary monte_carlo(const OutcomeModel& m, const InterferenceStructure& truth,
                              const InterferenceStructure& assumed, double p, long reps,
                              std::uint64_t master_seed, std::ostream* per_rep_csv = nullptr);

// Summary CSV: header `statistic,value`, one row per statistic; sd rows have
// an empty value field when reps == 1.
void write_summary_csv(std::ostream& out, const MonteCarloSummary& summary);

}  // namespace spillover
