#include "spillover/exposure.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "spillover/csv.hpp"

namespace spillover {

ExposureSignature ExposureSignature::basis(int radius, int index) {
  if (radius < 1) throw std::invalid_argument("basis: radius must be >= 1");
  if (index < 0 || index > radius + 1)
    throw std::invalid_argument("basis: index must be in 0..radius+1");
  ExposureSignature sig;
  sig.counts.assign(static_cast<std::size_t>(radius), 0);
  if (index == 1)
    sig.own = 1;
  else if (index >= 2)
    sig.counts[index - 2] = 1;
  return sig;
}

int ExposureSignature::basis_index() const {
  if (own != 0 && own != 1) return -1;
  int hot = -1;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] == 0) continue;
    if (counts[r] != 1 || hot >= 0) return -1;
    hot = static_cast<int>(r);
  }
  if (own == 1) return hot < 0 ? 1 : -1;
  return hot < 0 ? 0 : hot + 2;
}

std::string ExposureSignature::str() const {
  std::ostringstream os;
  os << own << ':';
  for (std::size_t r = 0; r < counts.size(); ++r) os << (r ? "," : "") << counts[r];
  return os.str();
}

ExposureSignature exposure(const InterferenceStructure& s, const Assignment& a, int i) {
  if (a.n() != s.n) throw std::invalid_argument("exposure: assignment length differs from n");
  if (i < 0 || i >= s.n) throw std::invalid_argument("exposure: unit id out of range");
  ExposureSignature sig;
  sig.own = a.z[i];
  sig.counts.resize(static_cast<std::size_t>(s.radius));
  for (int r = 1; r <= s.radius; ++r) {
    int count = 0;
    for (int j : s.shell(i, r)) count += a.z[j];
    sig.counts[r - 1] = count;
  }
  return sig;
}

namespace {

double binomial(int m, int c) {
  double b = 1.0;
  for (int j = 1; j <= c; ++j) b = b * (m - c + j) / j;
  return b;
}

}  // namespace

double exposure_probability(const InterferenceStructure& s, double p, int i,
                            const ExposureSignature& sig) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("exposure_probability: p must be in (0, 1)");
  if (i < 0 || i >= s.n)
    throw std::invalid_argument("exposure_probability: unit id out of range");
  if (static_cast<int>(sig.counts.size()) != s.radius)
    throw std::invalid_argument("exposure_probability: signature has wrong radius");
  if (sig.own != 0 && sig.own != 1) return 0.0;
  double prob = sig.own == 1 ? p : 1.0 - p;
  for (int r = 1; r <= s.radius; ++r) {
    const int m = s.shell_size(i, r);
    const int c = sig.counts[r - 1];
    if (c < 0 || c > m) return 0.0;  // unattainable
    prob *= binomial(m, c) * std::pow(p, c) * std::pow(1.0 - p, m - c);
  }
  return prob;
}

std::vector<ExposureSignature> attainable_signatures(const InterferenceStructure& s, int i) {
  if (i < 0 || i >= s.n)
    throw std::invalid_argument("attainable_signatures: unit id out of range");
  std::vector<ExposureSignature> out;
  ExposureSignature sig;
  sig.counts.assign(static_cast<std::size_t>(s.radius), 0);
  for (int own = 0; own <= 1; ++own) {
    sig.own = own;
    std::fill(sig.counts.begin(), sig.counts.end(), 0);
    while (true) {
      out.push_back(sig);
      int r = 0;
      while (r < s.radius) {  // odometer over shell counts
        if (sig.counts[r] < s.shell_size(i, r + 1)) {
          ++sig.counts[r];
          break;
        }
        sig.counts[r] = 0;
        ++r;
      }
      if (r == s.radius) break;
    }
  }
  return out;
}

std::vector<ProbabilityRow> basis_probability_table(const InterferenceStructure& s, double p) {
  std::vector<ProbabilityRow> rows;
  rows.reserve(static_cast<std::size_t>(s.n) * (s.radius + 2));
  for (int i = 0; i < s.n; ++i) {
    for (int k = 0; k <= s.radius + 1; ++k) {
      ProbabilityRow row;
      row.unit = i;
      row.sig = ExposureSignature::basis(s.radius, k);
      row.probability = exposure_probability(s, p, i, row.sig);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_probability_table_csv(std::ostream& out, const std::vector<ProbabilityRow>& rows) {
  out << "i,signature,probability\n";
  for (const auto& row : rows)
    out << row.unit << ",\"" << row.sig.str() << "\"," << g17(row.probability) << '\n';
}

namespace {

// Packs a signature into one 64-bit key: exact, collision-free as long as
// the per-shell bit widths fit, which holds at every exhaustive-bound scale.
struct SignaturePacker {
  std::vector<int> shift;
  int total_bits = 1;

  SignaturePacker(const InterferenceStructure& s, int i) {
    shift.resize(static_cast<std::size_t>(s.radius));
    for (int r = 1; r <= s.radius; ++r) {
      shift[r - 1] = total_bits;
      total_bits += std::bit_width(static_cast<unsigned>(s.shell_size(i, r)));
    }
    if (total_bits > 64)
      throw std::invalid_argument("signature does not fit a 64-bit key");
  }

  std::uint64_t pack(int own, const std::vector<int>& counts) const {
    std::uint64_t key = static_cast<std::uint64_t>(own);
    for (std::size_t r = 0; r < counts.size(); ++r)
      key |= static_cast<std::uint64_t>(counts[r]) << shift[r];
    return key;
  }
};

}  // namespace

SpecCheckResult verify_correct_specification(const InterferenceStructure& candidate,
                                             const OutcomeModel& model,
                                             const InterferenceStructure& truth,
                                             int exhaustive_bound) {
  check_dimensions(model, truth);
  if (candidate.n != truth.n)
    throw std::invalid_argument("verify_correct_specification: candidate n differs");
  const int n = truth.n;
  if (n > exhaustive_bound)
    throw BoundExceeded("verify_correct_specification: n=" + std::to_string(n) +
                        " exceeds exhaustive bound " + std::to_string(exhaustive_bound));

  struct Group {
    std::uint64_t mask;
    double y;
  };
  std::vector<std::unordered_map<std::uint64_t, Group>> groups(static_cast<std::size_t>(n));
  std::vector<SignaturePacker> packers;
  packers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) packers.emplace_back(candidate, i);

  std::vector<std::uint8_t> z(static_cast<std::size_t>(n));
  std::vector<int> counts(static_cast<std::size_t>(candidate.radius));
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (int i = 0; i < n; ++i) z[i] = (mask >> i) & 1u;
    for (int i = 0; i < n; ++i) {
      // outcome under the truth
      double y = model.alpha[i] + model.beta[i] * z[i];
      for (int r = 1; r <= truth.radius; ++r) {
        int count = 0;
        for (int j : truth.shell(i, r)) count += z[j];
        y += model.gamma[i][r - 1] * count;
      }
      // signature under the candidate
      for (int r = 1; r <= candidate.radius; ++r) {
        int count = 0;
        for (int j : candidate.shell(i, r)) count += z[j];
        counts[r - 1] = count;
      }
      const std::uint64_t key = packers[i].pack(z[i], counts);
      auto [it, inserted] = groups[i].try_emplace(key, Group{mask, y});
      if (!inserted && it->second.y != y) {
        SpecCheckResult res;
        res.ok = false;
        res.witness = SpecCheckWitness{Assignment::from_mask(n, it->second.mask),
                                       Assignment::from_mask(n, mask), i};
        return res;
      }
    }
  }
  return SpecCheckResult{};
}

}  // namespace spillover
