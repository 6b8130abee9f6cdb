#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "spillover/estimation.hpp"
#include "spillover/exposure.hpp"
#include "spillover/misspec.hpp"
#include "spillover/structure.hpp"
#include "spillover/transform.hpp"
#include "test_support.hpp"

using namespace spillover;
using testsupport::nth_transform;
using testsupport::random_structure;

namespace {

// enumeration oracle for the per-conditioning-event weight: the expected
// number of treated true-shell-r members inside the assumed neighborhood,
// given that the assumed signature is e_{s+1}
double enumerated_w_irs(const InterferenceStructure& truth, const InterferenceStructure& assumed,
                        double p, int i, int r, int s) {
  std::set<int> assumed_union;
  for (int q = 1; q <= assumed.radius; ++q)
    for (int j : assumed.shell(i, q)) assumed_union.insert(j);
  const auto target = ExposureSignature::basis(assumed.radius, s + 1);
  double num = 0.0, den = 0.0;
  const std::uint64_t total = std::uint64_t{1} << truth.n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const auto a = Assignment::from_mask(truth.n, mask);
    if (!(exposure(assumed, a, i) == target)) continue;
    double w = 1.0;
    for (int j = 0; j < truth.n; ++j) w *= a.z[j] ? p : 1.0 - p;
    double val = 0.0;
    for (int j : truth.shell(i, r))
      if (a.z[j] && assumed_union.count(j)) val += 1.0;
    num += w * val;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

// frozen four-unit instance: unit 0 has true shells {1} and {2,3}; the
// assumed structure swaps which shell the members sit in
struct FrozenInstance {
  InterferenceStructure truth{4, 2};
  InterferenceStructure assumed{4, 2};
  OutcomeModel model;
  FrozenInstance() {
    truth.shell(0, 1) = {1};
    truth.shell(0, 2) = {2, 3};
    assumed.shell(0, 1) = {2, 3};
    assumed.shell(0, 2) = {1};
    model.alpha.assign(4, 0.0);
    model.beta.assign(4, 0.0);
    model.gamma.assign(4, {0.0, 0.0});
    model.gamma[0] = {0.7, -0.3};
  }
};

}  // namespace

TEST_CASE("correct specification gives unit weights and the true estimand") {
  SplitMix64 rng(808);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const auto s = random_structure(rng, n, 1 + static_cast<int>(rng.below(3)));
    const auto weights = misspec_weights(s, s);
    for (int i = 0; i < n; ++i)
      for (int r = 1; r <= s.radius; ++r)
        if (s.shell_size(i, r) > 0) CHECK(weights.w[i][r - 1] == 1.0);
    const auto m = random_model(s, -2.0, 2.0, rng.next());
    CHECK(misspec_gamma_closed(m, s, s) == estimands(m, s).gamma_bar);
  }
}

TEST_CASE("disjoint assumed shells zero out the weights") {
  InterferenceStructure truth(5, 1);
  truth.shell(0, 1) = {1, 2};
  InterferenceStructure assumed(5, 1);
  assumed.shell(0, 1) = {3, 4};
  const auto weights = misspec_weights(truth, assumed);
  CHECK(weights.w[0][0] == 0.0);
  CHECK(weights.w_by_s[0][0][0] == 0.0);
}

TEST_CASE("shell swap on a ring keeps unit weights") {
  const auto s = ring_structure(8, 2);
  const auto swapped = apply_misspec(s, MisspecTransform::shell_swap());
  const auto weights = misspec_weights(s, swapped);
  for (int i = 0; i < 8; ++i) {
    // equals |shell 2| / |shell 1| = 1 on a ring
    CHECK(weights.w[i][0] == 1.0);
    CHECK(weights.w[i][1] == 1.0);
  }
  OutcomeModel m;
  m.alpha.assign(8, 0.0);
  m.beta.assign(8, 0.0);
  m.gamma.assign(8, {1.0, -1.0});
  CHECK(misspec_gamma_closed(m, s, swapped) == 0.0);
  CHECK(estimands(m, s).gamma_bar == 0.0);
  m.gamma.assign(8, {1.0, 0.0});
  CHECK(misspec_gamma_closed(m, s, swapped) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("per-event weights equal the enumerated conditional expectation") {
  SplitMix64 rng(910);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const int radius = 1 + static_cast<int>(rng.below(2));
    const auto truth = random_structure(rng, n, radius);
    const auto assumed = apply_misspec(truth, nth_transform(trial, truth, rng));
    const auto weights = misspec_weights(truth, assumed);
    const double p = 0.2 + 0.6 * rng.next_double();
    for (int i = 0; i < n; ++i) {
      for (int r = 1; r <= radius; ++r) {
        double combined = 0.0;
        for (int s = 1; s <= radius; ++s) {
          if (assumed.shell_size(i, s) == 0) {
            CHECK(weights.w_by_s[i][r - 1][s - 1] == 0.0);
            continue;
          }
          const double oracle = enumerated_w_irs(truth, assumed, p, i, r, s);
          CHECK(std::abs(weights.w_by_s[i][r - 1][s - 1] - oracle) <= 1e-10);
          // direct intersection form
          std::set<int> a(assumed.shell(i, s).begin(), assumed.shell(i, s).end());
          int inter = 0;
          for (int j : truth.shell(i, r)) inter += a.count(j);
          CHECK(weights.w_by_s[i][r - 1][s - 1] ==
                doctest::Approx(double(inter) / assumed.shell_size(i, s)).epsilon(1e-15));
          combined += weights.w_by_s[i][r - 1][s - 1] * assumed.shell_size(i, s);
        }
        if (truth.shell_size(i, r) > 0)
          CHECK(std::abs(weights.w[i][r - 1] - combined / truth.shell_size(i, r)) <= 1e-12);
        else
          CHECK(weights.w[i][r - 1] == 0.0);
      }
    }
  }
}

TEST_CASE("frozen four-unit instance") {
  FrozenInstance f;
  // full capture: both routes give the true spillover average
  CHECK(misspec_gamma_closed(f.model, f.truth, f.assumed) ==
        doctest::Approx(0.025).epsilon(1e-15));
  for (double p : {0.2, 0.5, 0.8}) {
    const auto d = misspec_gamma_definitional(f.model, f.truth, f.assumed, p);
    CHECK(std::abs(d.gamma_breve - 0.025) <= 1e-12);
  }

  // partial capture: only unit 1 is seen, spillover from {2,3} is lost
  InterferenceStructure partial(4, 2);
  partial.shell(0, 2) = {1};
  CHECK(misspec_gamma_closed(f.model, f.truth, partial) ==
        doctest::Approx(0.175).epsilon(1e-15));
  const auto d = misspec_gamma_definitional(f.model, f.truth, partial, 0.5);
  CHECK(std::abs(d.gamma_breve - 0.175) <= 1e-12);
  CHECK(estimands(f.model, f.truth).gamma_bar == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("closed form equals the enumeration for every transform kind") {
  SplitMix64 rng(2025);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(7));
    const int radius = 1 + static_cast<int>(rng.below(3));
    const auto truth = random_structure(rng, n, radius);
    const auto assumed = apply_misspec(truth, nth_transform(trial, truth, rng));
    const auto m = random_model(truth, -2.0, 2.0, rng.next());
    const double closed = misspec_gamma_closed(m, truth, assumed);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double value = misspec_gamma_definitional(m, truth, assumed, p).gamma_breve;
      CHECK(std::abs(closed - value) <= 1e-10);
      lo = first ? value : std::min(lo, value);
      hi = first ? value : std::max(hi, value);
      first = false;
    }
    CHECK(hi - lo <= 1e-10);  // p drops out
  }
}

TEST_CASE("correct specification recovers the estimand by enumeration") {
  const auto s = ring_structure(8, 2);
  const auto m = random_model(s, -2.0, 2.0, 77);
  const auto d = misspec_gamma_definitional(m, s, s, 0.3);
  CHECK(std::abs(d.gamma_breve - estimands(m, s).gamma_bar) <= 1e-10);
  CHECK(d.skipped.empty());
}

TEST_CASE("empty assumed shells are skipped and reported") {
  const auto truth = ring_structure(6, 2);
  InterferenceStructure assumed(6, 2);
  for (int i = 0; i < 6; ++i) assumed.shell(i, 1) = truth.shell(i, 1);
  const auto d = misspec_gamma_definitional(random_model(truth, -1.0, 1.0, 5), truth, assumed,
                                            0.5);
  REQUIRE(d.skipped.size() == 6);
  for (const auto& [i, r] : d.skipped) CHECK(r == 2);
}

TEST_CASE("definitional route refuses above the bound and bad p") {
  const auto s = ring_structure(18, 2);
  const auto m = random_model(s, -1.0, 1.0, 6);
  CHECK_THROWS_AS(misspec_gamma_definitional(m, s, s, 0.5), BoundExceeded);
  const auto small = ring_structure(6, 2);
  const auto ms = random_model(small, -1.0, 1.0, 6);
  CHECK_THROWS_AS(misspec_gamma_definitional(ms, small, small, 1.0), std::invalid_argument);
}

TEST_CASE("mismatched structure pairs are rejected") {
  const auto a = ring_structure(8, 2);
  const auto b = ring_structure(8, 1);
  CHECK_THROWS_AS(misspec_weights(a, b), std::invalid_argument);
  const auto c = ring_structure(6, 2);
  CHECK_THROWS_AS(misspec_weights(a, c), std::invalid_argument);
}

TEST_CASE("contrast identities reconstruct the estimands") {
  SplitMix64 rng(31);
  // generator families plus adversarial random partitions
  std::vector<InterferenceStructure> cases{
      ring_structure(9, 2), grid_structure(3, 4, 2, GridMetric::manhattan),
      grid_structure(4, 3, 2, GridMetric::chebyshev),
      bfs_shells(10, testsupport::random_edges(rng, 10, 0.3), 3),
      random_structure(rng, 11, 3)};
  for (const auto& s : cases) {
    const auto m = random_model(s, -2.0, 2.0, rng.next());
    const auto report = contrast_identities(m, s);
    const double scale_b = std::max(1.0, std::abs(report.reference.beta_bar));
    const double scale_g = std::max(1.0, std::abs(report.reference.gamma_bar));
    CHECK(std::abs(report.beta_bar_reconstructed - report.reference.beta_bar) <=
          1e-12 * scale_b);
    CHECK(std::abs(report.gamma_bar_reconstructed - report.reference.gamma_bar) <=
          1e-12 * scale_g);
  }
}

TEST_CASE("contrast values identify the model coefficients") {
  const auto s = ring_structure(6, 2);
  const auto m = random_model(s, -2.0, 2.0, 44);
  const auto report = contrast_identities(m, s);
  for (int i = 0; i < 6; ++i) {
    CHECK(report.value_e0[i] == m.alpha[i]);
    CHECK(std::abs((report.value_e1[i] - report.value_e0[i]) - m.beta[i]) <= 1e-12);
    // one treated unit at distance 2 shifts the outcome by gamma_{i2}
    CHECK(std::abs((report.value_shell[i][1] - report.value_e0[i]) - m.gamma[i][1]) <= 1e-12);
  }

  OutcomeModel null_model;
  null_model.alpha = m.alpha;
  null_model.beta.assign(6, 0.0);
  null_model.gamma.assign(6, {0.0, 0.0});
  const auto null_report = contrast_identities(null_model, s);
  for (int i = 0; i < 6; ++i) {
    CHECK(null_report.value_e1[i] == m.alpha[i]);
    CHECK(null_report.value_shell[i][0] == m.alpha[i]);
  }
}

TEST_CASE("contrast identities list unattainable shells") {
  InterferenceStructure s(3, 2);
  s.shell(0, 1) = {1};
  s.shell(1, 1) = {0};
  // every distance-2 shell empty, unit 2 fully isolated
  const auto report = contrast_identities(random_model(s, -1.0, 1.0, 2), s);
  CHECK(report.skipped.size() == 4);
  CHECK(std::isnan(report.value_shell[0][1]));
}

TEST_CASE("weights are nonnegative and need not sum to one") {
  SplitMix64 rng(505);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const int radius = 1 + static_cast<int>(rng.below(3));
    const auto truth = random_structure(rng, n, radius);
    const auto assumed = apply_misspec(truth, nth_transform(trial, truth, rng));
    const auto weights = misspec_weights(truth, assumed);
    for (const auto& row : weights.w)
      for (double w : row) CHECK(w >= 0.0);
  }

  // above one: correct specification with two nonempty shells sums to 2
  const auto ring = ring_structure(8, 2);
  const auto unit_weights = misspec_weights(ring, ring);
  CHECK(unit_weights.w[0][0] + unit_weights.w[0][1] == 2.0);

  // below one: sampled-away members leave partial capture
  const auto thinned = apply_misspec(ring, MisspecTransform::subset_sample(0.4, 9));
  const auto thin_weights = misspec_weights(ring, thinned);
  bool found_below = false;
  for (int i = 0; i < 8 && !found_below; ++i)
    found_below = thin_weights.w[i][0] + thin_weights.w[i][1] < 1.0;
  CHECK(found_below);
}

TEST_CASE("same-signed spillovers keep the sign; zero model stays zero") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const int radius = 1 + static_cast<int>(rng.below(3));
    const auto truth = random_structure(rng, n, radius);
    const auto assumed = apply_misspec(truth, nth_transform(trial, truth, rng));
    auto m = random_model(truth, -2.0, 2.0, rng.next());
    for (auto& row : m.gamma)
      for (double& g : row) g = std::abs(g);
    CHECK(misspec_gamma_closed(m, truth, assumed) >= 0.0);
    for (auto& row : m.gamma)
      for (double& g : row) g = -g;
    CHECK(misspec_gamma_closed(m, truth, assumed) <= 0.0);
    for (auto& row : m.gamma)
      for (double& g : row) g = 0.0;
    CHECK(misspec_gamma_closed(m, truth, assumed) == 0.0);
  }
}

TEST_CASE("adversarial demonstrations meet their contracts") {
  const auto flip = adversarial_instance(AdversarialKind::sign_flip);
  REQUIRE(flip.report.gamma_breve_definitional.has_value());
  CHECK_FALSE(flip.report.sign_agree);
  CHECK(*flip.report.gamma_breve_definitional < 0.0);
  CHECK(flip.report.policy_effect > 0.0);

  const auto inflate = adversarial_instance(AdversarialKind::magnitude_inflation);
  CHECK(std::abs(*inflate.report.gamma_breve_definitional) >=
        10.0 * std::abs(inflate.report.policy_effect));
  CHECK(inflate.report.policy_effect != 0.0);
  CHECK(inflate.report.magnitude_ratio >= 10.0);

  const auto cancel = adversarial_instance(AdversarialKind::cancellation);
  CHECK(std::abs(cancel.report.policy_effect) <= 1e-12);
  CHECK(std::abs(*cancel.report.gamma_breve_definitional) >= 1.0);

  // the seeds all mix signs: same-signed spillovers could never flip
  for (const auto* inst : {&flip, &inflate, &cancel}) {
    bool has_positive = false, has_negative = false;
    for (const auto& row : inst->model.gamma)
      for (double g : row) {
        has_positive = has_positive || g > 0.0;
        has_negative = has_negative || g < 0.0;
      }
    CHECK(has_positive);
    CHECK(has_negative);
  }
}

TEST_CASE("report CSV columns") {
  FrozenInstance f;
  const auto report = misspec_report(f.model, f.truth, f.assumed, 0.5, true);
  std::ostringstream with_spread;
  write_misspec_report_csv(with_spread, report, 0.0);
  CHECK(with_spread.str().find("p_grid_spread") != std::string::npos);
  std::ostringstream plain;
  write_misspec_report_csv(plain, report, std::nullopt);
  CHECK(plain.str().find("p_grid_spread") == std::string::npos);
  CHECK(plain.str().rfind("gamma_breve_closed,gamma_breve_definitional,gamma_bar,beta_bar,"
                          "policy_effect,sign_agree,magnitude_ratio\n", 0) == 0);

  const auto closed_only = misspec_report(f.model, f.truth, f.assumed, 0.5, false);
  CHECK_FALSE(closed_only.gamma_breve_definitional.has_value());
  std::ostringstream co;
  write_misspec_report_csv(co, closed_only, std::nullopt);
  // definitional field left empty
  CHECK(co.str().find(",,") != std::string::npos);
}

TEST_CASE("weights CSV lists every unit and radius") {
  const auto ring = ring_structure(4, 1);
  const auto weights = misspec_weights(ring, ring);
  std::ostringstream out;
  write_weights_csv(out, weights);
  CHECK(out.str() == "i,r,w\n0,1,1\n1,1,1\n2,1,1\n3,1,1\n");
}
