#include <doctest.h>

#include <stdexcept>

#include "spillover/structure.hpp"
#include "spillover/transform.hpp"
#include "test_support.hpp"

using namespace spillover;
using testsupport::nth_transform;
using testsupport::random_structure;

TEST_CASE("replace_with the same structure is the identity") {
  const auto s = ring_structure(6, 2);
  CHECK(apply_misspec(s, MisspecTransform::replace_with(s)) == s);
}

TEST_CASE("shell_swap exchanges shells 1 and 2") {
  const auto s = ring_structure(6, 2);
  const auto swapped = apply_misspec(s, MisspecTransform::shell_swap());
  CHECK(swapped.shell(0, 1) == std::vector<int>{2, 4});
  CHECK(swapped.shell(0, 2) == std::vector<int>{1, 5});
  // reversal: identity at radius 1
  const auto r1 = ring_structure(6, 1);
  CHECK(apply_misspec(r1, MisspecTransform::shell_swap()) == r1);
}

TEST_CASE("radius_shift rotates shells down by one") {
  const auto s = ring_structure(9, 3);
  const auto shifted = apply_misspec(s, MisspecTransform::radius_shift());
  for (int i = 0; i < s.n; ++i) {
    CHECK(shifted.shell(i, 1) == s.shell(i, 2));
    CHECK(shifted.shell(i, 2) == s.shell(i, 3));
    CHECK(shifted.shell(i, 3) == s.shell(i, 1));
  }
}

TEST_CASE("subset_sample keeps subsets and stays valid") {
  const auto s = ring_structure(8, 1);
  const auto t = MisspecTransform::subset_sample(0.5, 7);
  const auto sub = apply_misspec(s, t);
  CHECK(validate(sub).empty());
  for (int i = 0; i < s.n; ++i) {
    for (int j : sub.shell(i, 1)) {
      const auto& orig = s.shell(i, 1);
      CHECK(std::count(orig.begin(), orig.end(), j) == 1);
    }
  }
  CHECK_THROWS_AS(MisspecTransform::subset_sample(0.0, 1), std::invalid_argument);
}

TEST_CASE("edge_rewire keeps shell sizes and stays valid") {
  const auto s = ring_structure(10, 2);
  const auto rewired = apply_misspec(s, MisspecTransform::edge_rewire(0.8, 3));
  CHECK(validate(rewired).empty());
  for (int i = 0; i < s.n; ++i)
    for (int r = 1; r <= s.radius; ++r) CHECK(rewired.shell_size(i, r) == s.shell_size(i, r));
  // rho = 0 leaves the structure untouched
  CHECK(apply_misspec(s, MisspecTransform::edge_rewire(0.0, 3)) == s);
}

TEST_CASE("edge_rewire errors when no replacement target exists") {
  InterferenceStructure s(3, 1);
  s.shell(0, 1) = {1, 2};
  s.shell(1, 1) = {0, 2};
  s.shell(2, 1) = {0, 1};
  CHECK_THROWS_AS(apply_misspec(s, MisspecTransform::edge_rewire(1.0, 1)),
                  std::invalid_argument);
}

TEST_CASE("seeded transforms are deterministic") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(8));
    const int radius = 1 + static_cast<int>(rng.below(3));
    const auto s = random_structure(rng, n, radius);
    SplitMix64 params_a(trial), params_b(trial);
    const auto ta = nth_transform(trial, s, params_a);
    const auto tb = nth_transform(trial, s, params_b);
    CHECK(apply_misspec(s, ta) == apply_misspec(s, tb));
  }
}

TEST_CASE("every transform output validates") {
  SplitMix64 rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const int radius = 1 + static_cast<int>(rng.below(3));
    const auto s = random_structure(rng, n, radius);
    const auto t = nth_transform(trial, s, rng);
    const auto assumed = apply_misspec(s, t);
    CHECK(validate(assumed).empty());
    CHECK(assumed.n == s.n);
    CHECK(assumed.radius == s.radius);
  }
}

TEST_CASE("replace_with rejects mismatched or invalid structures") {
  const auto s = ring_structure(6, 2);
  CHECK_THROWS_AS(apply_misspec(s, MisspecTransform::replace_with(ring_structure(8, 2))),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_misspec(s, MisspecTransform::replace_with(ring_structure(6, 1))),
                  std::invalid_argument);
  InterferenceStructure bad(6, 2);
  bad.shell(0, 1) = {0};  // self-inclusion
  CHECK_THROWS_AS(apply_misspec(s, MisspecTransform::replace_with(bad)),
                  std::invalid_argument);
}

TEST_CASE("transform kind names round-trip") {
  using Kind = MisspecTransform::Kind;
  for (Kind k : {Kind::shell_swap, Kind::radius_shift, Kind::edge_rewire, Kind::subset_sample,
                 Kind::replace_with})
    CHECK(transform_kind_from_string(to_string(k)) == k);
  CHECK_FALSE(transform_kind_from_string("bogus").has_value());
}
