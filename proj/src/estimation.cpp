#include "spillover/estimation.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spillover/csv.hpp"
#include "spillover/exposure.hpp"
#include "spillover/rng.hpp"

namespace spillover {

ExperimentRecord simulate(const OutcomeModel& m, const InterferenceStructure& s, double p,
                          std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("simulate: p must be in (0, 1)");
  check_dimensions(m, s);
  SplitMix64 rng(seed);
  ExperimentRecord record;
  record.z.z.resize(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) record.z.z[i] = rng.bernoulli(p) ? 1 : 0;
  record.y = eval_outcomes(m, s, record.z);
  record.p = p;
  record.seed = seed;
  return record;
}

HTEstimate ht_estimate(const InterferenceStructure& assumed, const ExperimentRecord& record) {
  const double p = record.p;
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("ht_estimate: p must be in (0, 1)");
  const int n = assumed.n;
  if (record.z.n() != n || static_cast<int>(record.y.size()) != n)
    throw std::invalid_argument("ht_estimate: record length differs from assumed structure");
  const int radius = assumed.radius;

  HTEstimate est;
  est.basis_counts.assign(static_cast<std::size_t>(radius) + 2, 0);
  double beta_sum = 0.0;
  std::vector<double> gamma_r_sum(static_cast<std::size_t>(radius), 0.0);

  for (int i = 0; i < n; ++i) {
    const ExposureSignature sig = exposure(assumed, record.z, i);
    const int k = sig.basis_index();
    if (k < 0) continue;  // non-basis draw: contributes to nothing
    ++est.basis_counts[k];
    const double y = record.y[i];
    if (k == 0) {
      const double t = y / exposure_probability(assumed, p, i,
                                                ExposureSignature::basis(radius, 0));
      beta_sum -= t;
      for (int r = 1; r <= radius; ++r) gamma_r_sum[r - 1] -= t * assumed.shell_size(i, r);
    } else if (k == 1) {
      beta_sum += y / exposure_probability(assumed, p, i,
                                           ExposureSignature::basis(radius, 1));
    } else {
      const int r = k - 1;  // one treated at shell r, so the shell is nonempty
      const double t = y / exposure_probability(assumed, p, i,
                                                ExposureSignature::basis(radius, k));
      gamma_r_sum[r - 1] += t * assumed.shell_size(i, r);
    }
  }

  est.beta_hat = beta_sum / n;
  double gamma_hat = 0.0;
  for (int r = 1; r <= radius; ++r) gamma_hat += gamma_r_sum[r - 1] / n;
  est.gamma_hat = gamma_hat;
  est.policy_hat = est.beta_hat + est.gamma_hat;
  return est;
}

ExpectedHT exact_expectation_ht(const OutcomeModel& m, const InterferenceStructure& truth,
                                const InterferenceStructure& assumed, double p,
                                int exhaustive_bound) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("exact_expectation_ht: p must be in (0, 1)");
  check_dimensions(m, truth);
  if (assumed.n != truth.n)
    throw std::invalid_argument("exact_expectation_ht: assumed n differs");
  const int n = truth.n;
  if (n > exhaustive_bound)
    throw BoundExceeded("exact_expectation_ht: n=" + std::to_string(n) +
                        " exceeds exhaustive bound " + std::to_string(exhaustive_bound));

  std::vector<double> pow_p(static_cast<std::size_t>(n) + 1, 1.0);
  std::vector<double> pow_q(static_cast<std::size_t>(n) + 1, 1.0);
  for (int t = 1; t <= n; ++t) {
    pow_p[t] = pow_p[t - 1] * p;
    pow_q[t] = pow_q[t - 1] * (1.0 - p);
  }

  ExpectedHT expected;
  expected.basis_counts.assign(static_cast<std::size_t>(assumed.radius) + 2, 0.0);
  ExperimentRecord record;
  record.p = p;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    record.z = Assignment::from_mask(n, mask);
    record.y = eval_outcomes(m, truth, record.z);
    const int treated = record.z.treated_count();
    const double weight = pow_p[treated] * pow_q[n - treated];
    const HTEstimate est = ht_estimate(assumed, record);
    expected.beta_hat += weight * est.beta_hat;
    expected.gamma_hat += weight * est.gamma_hat;
    for (std::size_t k = 0; k < expected.basis_counts.size(); ++k)
      expected.basis_counts[k] += weight * est.basis_counts[k];
  }
  expected.policy_hat = expected.beta_hat + expected.gamma_hat;
  return expected;
}

void write_per_rep_csv_header(std::ostream& out) {
  out << "rep,beta_hat,gamma_hat,policy_hat,count_e0,count_e1,count_e2plus\n";
}

MonteCarloSummary monte_carlo(const OutcomeModel& m, const InterferenceStructure& truth,
                              const InterferenceStructure& assumed, double p, long reps,
                              std::uint64_t master_seed, std::ostream* per_rep_csv) {
  if (reps < 1) throw std::invalid_argument("monte_carlo: reps must be >= 1");
  if (assumed.n != truth.n) throw std::invalid_argument("monte_carlo: assumed n differs");
  check_dimensions(m, truth);

  MonteCarloSummary summary;
  summary.reps = reps;
  double mean_b = 0.0, mean_g = 0.0, mean_pe = 0.0;
  double m2_b = 0.0, m2_g = 0.0, m2_pe = 0.0;
  double mean_c0 = 0.0, mean_c1 = 0.0, mean_c2 = 0.0;

  for (long k = 0; k < reps; ++k) {
    const ExperimentRecord record = simulate(m, truth, p, stream_seed(master_seed, k));
    const HTEstimate est = ht_estimate(assumed, record);
    long c2plus = 0;
    for (std::size_t j = 2; j < est.basis_counts.size(); ++j) c2plus += est.basis_counts[j];
    if (per_rep_csv) {
      *per_rep_csv << k << ',' << g17(est.beta_hat) << ',' << g17(est.gamma_hat) << ','
                   << g17(est.policy_hat) << ',' << est.basis_counts[0] << ','
                   << est.basis_counts[1] << ',' << c2plus << '\n';
    }
    const double count = static_cast<double>(k + 1);
    auto welford = [count](double x, double& mean, double& m2) {
      const double delta = x - mean;
      mean += delta / count;
      m2 += delta * (x - mean);
    };
    welford(est.beta_hat, mean_b, m2_b);
    welford(est.gamma_hat, mean_g, m2_g);
    welford(est.policy_hat, mean_pe, m2_pe);
    mean_c0 += (est.basis_counts[0] - mean_c0) / count;
    mean_c1 += (est.basis_counts[1] - mean_c1) / count;
    mean_c2 += (c2plus - mean_c2) / count;
  }

  summary.mean_beta_hat = mean_b;
  summary.mean_gamma_hat = mean_g;
  summary.mean_policy_hat = mean_pe;
  if (reps >= 2) {
    summary.sd_beta_hat = std::sqrt(m2_b / (reps - 1));
    summary.sd_gamma_hat = std::sqrt(m2_g / (reps - 1));
    summary.sd_policy_hat = std::sqrt(m2_pe / (reps - 1));
  }
  summary.mean_count_e0 = mean_c0;
  summary.mean_count_e1 = mean_c1;
  summary.mean_count_e2plus = mean_c2;
  return summary;
}

void write_summary_csv(std::ostream& out, const MonteCarloSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string{}; };
  out << "statistic,value\n";
  out << "reps," << s.reps << '\n';
  out << "mean_beta_hat," << g17(s.mean_beta_hat) << '\n';
  out << "mean_gamma_hat," << g17(s.mean_gamma_hat) << '\n';
  out << "mean_policy_hat," << g17(s.mean_policy_hat) << '\n';
  out << "sd_beta_hat," << opt(s.sd_beta_hat) << '\n';
  out << "sd_gamma_hat," << opt(s.sd_gamma_hat) << '\n';
  out << "sd_policy_hat," << opt(s.sd_policy_hat) << '\n';
  out << "mean_count_e0," << g17(s.mean_count_e0) << '\n';
  out << "mean_count_e1," << g17(s.mean_count_e1) << '\n';
  out << "mean_count_e2plus," << g17(s.mean_count_e2plus) << '\n';
}

}  // namespace spillover
