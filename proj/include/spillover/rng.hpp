#pragma once

#include <cstdint>

namespace spillover {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output mix (Steele/Lea/Vigna). Also used standalone to derive
// per-replicate stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic, fast, portable. All randomness in the project flows
// through this generator so seeded runs reproduce bit-for-bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // uniform in [0, 1), 53 random bits
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // unbiased uniform integer in [0, m), m > 0
  std::uint64_t below(std::uint64_t m) {
    const std::uint64_t threshold = (0 - m) % m;  // 2^64 mod m
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return x % m;
  }

 private:
  std::uint64_t state_;
};

// Replicate k of a Monte Carlo run draws from SplitMix64 seeded with
// stream_seed(master_seed, k). This derivation is part of the output
// format contract and must stay stable across versions.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t k) {
  return mix64(master_seed ^ mix64(k + kGolden));
}

}  // namespace spillover
