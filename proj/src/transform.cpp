#include "spillover/transform.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "spillover/rng.hpp"

namespace spillover {

MisspecTransform MisspecTransform::shell_swap() {
  MisspecTransform t;
  t.kind = Kind::shell_swap;
  return t;
}

MisspecTransform MisspecTransform::radius_shift() {
  MisspecTransform t;
  t.kind = Kind::radius_shift;
  return t;
}

MisspecTransform MisspecTransform::edge_rewire(double rho, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("edge_rewire: rho must be in [0, 1]");
  MisspecTransform t;
  t.kind = Kind::edge_rewire;
  t.rho = rho;
  t.seed = seed;
  return t;
}

MisspecTransform MisspecTransform::subset_sample(double kappa, std::uint64_t seed) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw std::invalid_argument("subset_sample: kappa must be in (0, 1]");
  MisspecTransform t;
  t.kind = Kind::subset_sample;
  t.kappa = kappa;
  t.seed = seed;
  return t;
}

MisspecTransform MisspecTransform::replace_with(InterferenceStructure assumed) {
  MisspecTransform t;
  t.kind = Kind::replace_with;
  t.replacement = std::move(assumed);
  return t;
}

namespace {

InterferenceStructure apply_shell_swap(const InterferenceStructure& s) {
  InterferenceStructure out(s.n, s.radius);
  for (int i = 0; i < s.n; ++i)
    for (int r = 1; r <= s.radius; ++r) out.shell(i, r) = s.shell(i, s.radius - r + 1);
  return out;
}

InterferenceStructure apply_radius_shift(const InterferenceStructure& s) {
  InterferenceStructure out(s.n, s.radius);
  for (int i = 0; i < s.n; ++i)
    for (int r = 1; r <= s.radius; ++r) out.shell(i, r) = s.shell(i, r % s.radius + 1);
  return out;
}

InterferenceStructure apply_edge_rewire(const InterferenceStructure& s, double rho,
                                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  InterferenceStructure out(s.n, s.radius);
  std::vector<char> used(static_cast<std::size_t>(s.n));
  std::vector<int> candidates;
  for (int i = 0; i < s.n; ++i) {
    std::fill(used.begin(), used.end(), 0);
    used[i] = 1;
    for (int r = 1; r <= s.radius; ++r)
      for (int j : s.shell(i, r)) used[j] = 1;
    for (int r = 1; r <= s.radius; ++r) {
      std::vector<int> members;
      members.reserve(s.shell(i, r).size());
      for (int j : s.shell(i, r)) {
        if (rng.next_double() >= rho) {
          members.push_back(j);
          continue;
        }
        candidates.clear();
        for (int u = 0; u < s.n; ++u)
          if (!used[u]) candidates.push_back(u);
        if (candidates.empty())
          throw std::invalid_argument(
              "edge_rewire: no legal replacement target exists (unit " + std::to_string(i) +
              "'s shells already cover every other unit)");
        const int pick = candidates[rng.below(candidates.size())];
        used[j] = 0;
        used[pick] = 1;
        members.push_back(pick);
      }
      std::sort(members.begin(), members.end());
      out.shell(i, r) = std::move(members);
    }
  }
  return out;
}

InterferenceStructure apply_subset_sample(const InterferenceStructure& s, double kappa,
                                          std::uint64_t seed) {
  SplitMix64 rng(seed);
  InterferenceStructure out(s.n, s.radius);
  for (int i = 0; i < s.n; ++i) {
    for (int r = 1; r <= s.radius; ++r) {
      std::vector<int> members;
      for (int j : s.shell(i, r))
        if (rng.next_double() < kappa) members.push_back(j);
      out.shell(i, r) = std::move(members);
    }
  }
  return out;
}

}  // namespace

InterferenceStructure apply_misspec(const InterferenceStructure& s, const MisspecTransform& t) {
  InterferenceStructure out;
  switch (t.kind) {
    case MisspecTransform::Kind::shell_swap:
      out = apply_shell_swap(s);
      break;
    case MisspecTransform::Kind::radius_shift:
      out = apply_radius_shift(s);
      break;
    case MisspecTransform::Kind::edge_rewire:
      if (!(t.rho >= 0.0 && t.rho <= 1.0))
        throw std::invalid_argument("edge_rewire: rho must be in [0, 1]");
      out = apply_edge_rewire(s, t.rho, t.seed);
      break;
    case MisspecTransform::Kind::subset_sample:
      if (!(t.kappa > 0.0 && t.kappa <= 1.0))
        throw std::invalid_argument("subset_sample: kappa must be in (0, 1]");
      out = apply_subset_sample(s, t.kappa, t.seed);
      break;
    case MisspecTransform::Kind::replace_with: {
      if (!t.replacement) throw std::invalid_argument("replace_with: no structure supplied");
      if (t.replacement->n != s.n || t.replacement->radius != s.radius)
        throw std::invalid_argument("replace_with: n and radius must match the true structure");
      const auto violations = validate(*t.replacement);
      if (!violations.empty())
        throw std::invalid_argument("replace_with: invalid structure: " +
                                    describe(violations.front()));
      out = *t.replacement;
      break;
    }
  }
  const auto violations = validate(out);
  if (!violations.empty())
    throw std::logic_error("apply_misspec produced an invalid structure: " +
                           describe(violations.front()));
  return out;
}

std::string to_string(MisspecTransform::Kind k) {
  switch (k) {
    case MisspecTransform::Kind::shell_swap: return "shell_swap";
    case MisspecTransform::Kind::radius_shift: return "radius_shift";
    case MisspecTransform::Kind::edge_rewire: return "edge_rewire";
    case MisspecTransform::Kind::subset_sample: return "subset_sample";
    case MisspecTransform::Kind::replace_with: return "replace_with";
  }
  return "unknown";
}

std::optional<MisspecTransform::Kind> transform_kind_from_string(const std::string& name) {
  using Kind = MisspecTransform::Kind;
  if (name == "shell_swap") return Kind::shell_swap;
  if (name == "radius_shift") return Kind::radius_shift;
  if (name == "edge_rewire") return Kind::edge_rewire;
  if (name == "subset_sample") return Kind::subset_sample;
  if (name == "replace_with") return Kind::replace_with;
  return std::nullopt;
}

}  // namespace spillover
