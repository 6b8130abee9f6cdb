#include "spillover/misspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spillover/csv.hpp"
#include "spillover/transform.hpp"

namespace spillover {

namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  // both sorted ascending
  int count = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib])
      ++ia;
    else if (b[ib] < a[ia])
      ++ib;
    else
      ++count, ++ia, ++ib;
  }
  return count;
}

void check_pair(const InterferenceStructure& truth, const InterferenceStructure& assumed) {
  if (truth.n != assumed.n || truth.radius != assumed.radius)
    throw std::invalid_argument("structure pair must share n and radius");
  for (const auto* s : {&truth, &assumed}) {
    const auto violations = validate(*s);
    if (!violations.empty())
      throw std::invalid_argument("invalid structure: " + describe(violations.front()));
  }
}

}  // namespace

MisspecWeights misspec_weights(const InterferenceStructure& truth,
                               const InterferenceStructure& assumed) {
  check_pair(truth, assumed);
  const int n = truth.n;
  const int radius = truth.radius;
  MisspecWeights weights;
  weights.w.assign(static_cast<std::size_t>(n), std::vector<double>(radius, 0.0));
  weights.w_by_s.assign(
      static_cast<std::size_t>(n),
      std::vector<std::vector<double>>(radius, std::vector<double>(radius, 0.0)));
  for (int i = 0; i < n; ++i) {
    for (int r = 1; r <= radius; ++r) {
      const auto& true_shell = truth.shell(i, r);
      long captured = 0;
      for (int s = 1; s <= radius; ++s) {
        const int assumed_size = assumed.shell_size(i, s);
        if (assumed_size == 0) continue;  // conditioning event impossible
        const int inter = intersection_size(true_shell, assumed.shell(i, s));
        weights.w_by_s[i][r - 1][s - 1] = static_cast<double>(inter) / assumed_size;
        captured += inter;
      }
      if (!true_shell.empty())
        weights.w[i][r - 1] = static_cast<double>(captured) / true_shell.size();
    }
  }
  return weights;
}

double misspec_gamma_closed(const OutcomeModel& m, const InterferenceStructure& truth,
                            const InterferenceStructure& assumed) {
  check_dimensions(m, truth);
  const MisspecWeights weights = misspec_weights(truth, assumed);
  double acc = 0.0;
  for (int i = 0; i < truth.n; ++i)
    for (int r = 1; r <= truth.radius; ++r)
      acc += m.gamma[i][r - 1] * truth.shell_size(i, r) * weights.w[i][r - 1];
  return acc / truth.n;
}

DefinitionalGamma misspec_gamma_definitional(const OutcomeModel& m,
                                             const InterferenceStructure& truth,
                                             const InterferenceStructure& assumed, double p,
                                             int exhaustive_bound) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("misspec_gamma_definitional: p must be in (0, 1)");
  check_dimensions(m, truth);
  check_pair(truth, assumed);
  const int n = truth.n;
  const int radius = truth.radius;
  if (n > exhaustive_bound)
    throw BoundExceeded("misspec_gamma_definitional: n=" + std::to_string(n) +
                        " exceeds exhaustive bound " + std::to_string(exhaustive_bound));

  // num/den of E[y_i | assumed signature = e_k] for k = 0 and k = r+1
  std::vector<std::vector<double>> num(static_cast<std::size_t>(n),
                                       std::vector<double>(radius + 2, 0.0));
  std::vector<std::vector<double>> den(static_cast<std::size_t>(n),
                                       std::vector<double>(radius + 2, 0.0));

  std::vector<double> pow_p(static_cast<std::size_t>(n) + 1, 1.0);
  std::vector<double> pow_q(static_cast<std::size_t>(n) + 1, 1.0);
  for (int t = 1; t <= n; ++t) {
    pow_p[t] = pow_p[t - 1] * p;
    pow_q[t] = pow_q[t - 1] * (1.0 - p);
  }

  std::vector<std::uint8_t> z(static_cast<std::size_t>(n));
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    int treated = 0;
    for (int i = 0; i < n; ++i) {
      z[i] = (mask >> i) & 1u;
      treated += z[i];
    }
    const double weight = pow_p[treated] * pow_q[n - treated];
    for (int i = 0; i < n; ++i) {
      if (z[i]) continue;  // only e_0 and e_{r+1} matter, both have own = 0
      int hot = -1;
      bool basis = true;
      for (int s = 1; s <= radius && basis; ++s) {
        int count = 0;
        for (int j : assumed.shell(i, s)) count += z[j];
        if (count == 0) continue;
        if (count > 1 || hot >= 0)
          basis = false;
        else
          hot = s;
      }
      if (!basis) continue;
      const int k = hot < 0 ? 0 : hot + 1;
      double y = m.alpha[i];
      for (int r = 1; r <= radius; ++r) {
        int count = 0;
        for (int j : truth.shell(i, r)) count += z[j];
        y += m.gamma[i][r - 1] * count;
      }
      num[i][k] += weight * y;
      den[i][k] += weight;
    }
  }

  DefinitionalGamma result;
  result.p = p;
  double total_gamma = 0.0;
  for (int r = 1; r <= radius; ++r) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (assumed.shell_size(i, r) == 0) {
        result.skipped.emplace_back(i, r);
        continue;
      }
      const double ybar_r = num[i][r + 1] / den[i][r + 1];
      const double ybar_0 = num[i][0] / den[i][0];
      acc += (ybar_r - ybar_0) * assumed.shell_size(i, r);
    }
    total_gamma += acc / n;
  }
  result.gamma_breve = total_gamma;
  return result;
}

ContrastIdentityReport contrast_identities(const OutcomeModel& m,
                                           const InterferenceStructure& s) {
  check_dimensions(m, s);
  const int n = s.n;
  const int radius = s.radius;
  ContrastIdentityReport report;
  report.reference = estimands(m, s);
  report.value_e0.resize(static_cast<std::size_t>(n));
  report.value_e1.resize(static_cast<std::size_t>(n));
  report.value_shell.assign(static_cast<std::size_t>(n),
                            std::vector<double>(radius, std::numeric_limits<double>::quiet_NaN()));

  const std::vector<double> base = eval_outcomes(m, s, Assignment::zeros(n));
  for (int i = 0; i < n; ++i) {
    report.value_e0[i] = base[i];
    report.value_e1[i] = eval_outcomes(m, s, Assignment::single_treated(n, i))[i];
    for (int r = 1; r <= radius; ++r) {
      const auto& shell = s.shell(i, r);
      if (shell.empty()) {
        report.skipped.emplace_back(i, r);
        continue;
      }
      // treating any one shell member realizes e_{r+1} for unit i
      report.value_shell[i][r - 1] =
          eval_outcomes(m, s, Assignment::single_treated(n, shell.front()))[i];
    }
  }

  double beta_acc = 0.0;
  for (int i = 0; i < n; ++i) beta_acc += report.value_e1[i] - report.value_e0[i];
  report.beta_bar_reconstructed = beta_acc / n;

  double gamma_total = 0.0;
  for (int r = 1; r <= radius; ++r) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (s.shell_size(i, r) == 0) continue;
      acc += (report.value_shell[i][r - 1] - report.value_e0[i]) * s.shell_size(i, r);
    }
    gamma_total += acc / n;
  }
  report.gamma_bar_reconstructed = gamma_total;
  return report;
}

MisspecReport misspec_report(const OutcomeModel& m, const InterferenceStructure& truth,
                             const InterferenceStructure& assumed, double p,
                             bool want_definitional, int exhaustive_bound) {
  MisspecReport report;
  report.weights = misspec_weights(truth, assumed);
  report.gamma_breve_closed = misspec_gamma_closed(m, truth, assumed);
  const Estimands truth_values = estimands(m, truth);
  report.gamma_bar = truth_values.gamma_bar;
  report.beta_bar = truth_values.beta_bar;
  report.policy_effect = truth_values.policy_effect;
  if (want_definitional) {
    const DefinitionalGamma d = misspec_gamma_definitional(m, truth, assumed, p,
                                                           exhaustive_bound);
    report.gamma_breve_definitional = d.gamma_breve;
    report.definitional_p = p;
  }
  report.sign_agree = sgn(report.gamma_breve_closed) == sgn(report.policy_effect);
  report.magnitude_ratio = std::abs(report.gamma_breve_closed) / std::abs(report.policy_effect);
  return report;
}

void write_weights_csv(std::ostream& out, const MisspecWeights& weights) {
  out << "i,r,w\n";
  for (std::size_t i = 0; i < weights.w.size(); ++i)
    for (std::size_t r = 0; r < weights.w[i].size(); ++r)
      out << i << ',' << (r + 1) << ',' << g17(weights.w[i][r]) << '\n';
}

void write_misspec_report_csv(std::ostream& out, const MisspecReport& report,
                              std::optional<double> p_grid_spread) {
  out << "gamma_breve_closed,gamma_breve_definitional,gamma_bar,beta_bar,policy_effect,"
         "sign_agree,magnitude_ratio";
  if (p_grid_spread) out << ",p_grid_spread";
  out << '\n';
  out << g17(report.gamma_breve_closed) << ',';
  if (report.gamma_breve_definitional) out << g17(*report.gamma_breve_definitional);
  out << ',' << g17(report.gamma_bar) << ',' << g17(report.beta_bar) << ','
      << g17(report.policy_effect) << ',' << (report.sign_agree ? "true" : "false") << ','
      << g17(report.magnitude_ratio);
  if (p_grid_spread) out << ',' << g17(*p_grid_spread);
  out << '\n';
}

namespace {

// Assumed structure that keeps exactly one true shell, relabeled to
// place_r, with every other assumed shell empty.
InterferenceStructure keep_one_shell(const InterferenceStructure& s, int keep_r, int place_r) {
  InterferenceStructure out(s.n, s.radius);
  for (int i = 0; i < s.n; ++i) out.shell(i, place_r) = s.shell(i, keep_r);
  return out;
}

OutcomeModel constant_model(int n, double alpha, double beta, double gamma1, double gamma2) {
  OutcomeModel m;
  m.alpha.assign(static_cast<std::size_t>(n), alpha);
  m.beta.assign(static_cast<std::size_t>(n), beta);
  m.gamma.assign(static_cast<std::size_t>(n), {gamma1, gamma2});
  return m;
}

}  // namespace

AdversarialInstance adversarial_instance(AdversarialKind kind) {
  // Ring of 12 with two shells (sizes 2 and 2) and opposite-signed spillover
  // coefficients; the assumed structure captures only one of the two shells,
  // so the built-in cancellation is undone.
  constexpr int kUnits = 12;
  AdversarialInstance inst;
  inst.truth = ring_structure(kUnits, 2);
  switch (kind) {
    case AdversarialKind::sign_flip:
      // policy = +0.05, misspecified spillover = -1
      inst.model = constant_model(kUnits, 1.0, 0.05, 0.5, -0.5);
      inst.assumed = keep_one_shell(inst.truth, 2, 2);
      break;
    case AdversarialKind::magnitude_inflation:
      // policy = +0.1, misspecified spillover = +2
      inst.model = constant_model(kUnits, 1.0, 0.1, 1.0, -1.0);
      inst.assumed = keep_one_shell(inst.truth, 1, 1);
      break;
    case AdversarialKind::cancellation:
      // policy = 0 exactly, misspecified spillover = +2
      inst.model = constant_model(kUnits, 1.0, 0.0, 1.0, -1.0);
      inst.assumed = keep_one_shell(inst.truth, 1, 1);
      break;
  }
  inst.report = misspec_report(inst.model, inst.truth, inst.assumed, 0.5,
                               /*want_definitional=*/true);

  const double definitional = *inst.report.gamma_breve_definitional;
  const double policy = inst.report.policy_effect;
  if (std::abs(inst.report.gamma_breve_closed - definitional) > 1e-10)
    throw std::logic_error("adversarial_instance: closed and enumerated values disagree");
  bool ok = false;
  switch (kind) {
    case AdversarialKind::sign_flip:
      ok = sgn(definitional) != sgn(policy) && definitional != 0.0 && policy != 0.0;
      break;
    case AdversarialKind::magnitude_inflation:
      ok = policy != 0.0 && std::abs(definitional) >= 10.0 * std::abs(policy);
      break;
    case AdversarialKind::cancellation:
      ok = std::abs(policy) <= 1e-12 && std::abs(definitional) >= 1.0;
      break;
  }
  if (!ok) throw std::logic_error("adversarial_instance: construction failed its contract");
  return inst;
}

std::optional<AdversarialKind> adversarial_kind_from_string(const std::string& name) {
  if (name == "sign_flip") return AdversarialKind::sign_flip;
  if (name == "magnitude_inflation") return AdversarialKind::magnitude_inflation;
  if (name == "cancellation") return AdversarialKind::cancellation;
  return std::nullopt;
}

std::string to_string(AdversarialKind kind) {
  switch (kind) {
    case AdversarialKind::sign_flip: return "sign_flip";
    case AdversarialKind::magnitude_inflation: return "magnitude_inflation";
    case AdversarialKind::cancellation: return "cancellation";
  }
  return "unknown";
}

}  // namespace spillover
