#include "spillover/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "spillover/common.hpp"
#include "spillover/csv.hpp"
#include "spillover/rng.hpp"

namespace spillover {

Assignment Assignment::zeros(int n) {
  Assignment a;
  a.z.assign(static_cast<std::size_t>(n), 0);
  return a;
}

Assignment Assignment::single_treated(int n, int unit) {
  Assignment a = zeros(n);
  a.z.at(static_cast<std::size_t>(unit)) = 1;
  return a;
}

Assignment Assignment::from_mask(int n, std::uint64_t mask) {
  Assignment a = zeros(n);
  const int bits = std::min(n, 64);
  for (int i = 0; i < bits; ++i) a.z[i] = (mask >> i) & 1u;
  return a;
}

int Assignment::treated_count() const {
  return static_cast<int>(std::count(z.begin(), z.end(), std::uint8_t{1}));
}

void check_dimensions(const OutcomeModel& m, const InterferenceStructure& s) {
  if (m.n() != s.n)
    throw std::invalid_argument("model/structure dimension mismatch: n differs");
  if (static_cast<int>(m.beta.size()) != s.n ||
      static_cast<int>(m.gamma.size()) != s.n)
    throw std::invalid_argument("model: alpha, beta, gamma must all have length n");
  for (const auto& row : m.gamma)
    if (static_cast<int>(row.size()) != s.radius)
      throw std::invalid_argument("model/structure dimension mismatch: radius differs");
}

std::vector<double> eval_outcomes(const OutcomeModel& m, const InterferenceStructure& s,
                                  const Assignment& a) {
  check_dimensions(m, s);
  if (a.n() != s.n) throw std::invalid_argument("assignment length differs from n");
  std::vector<double> y(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) {
    double v = m.alpha[i] + m.beta[i] * a.z[i];
    for (int r = 1; r <= s.radius; ++r) {
      int count = 0;
      for (int j : s.shell(i, r)) count += a.z[j];
      v += m.gamma[i][r - 1] * count;
    }
    y[i] = v;
  }
  return y;
}

Estimands estimands(const OutcomeModel& m, const InterferenceStructure& s) {
  check_dimensions(m, s);
  Estimands e;
  double beta_sum = 0.0;
  double gamma_sum = 0.0;
  for (int i = 0; i < s.n; ++i) {
    beta_sum += m.beta[i];
    for (int r = 1; r <= s.radius; ++r)
      gamma_sum += m.gamma[i][r - 1] * s.shell_size(i, r);
  }
  e.beta_bar = beta_sum / s.n;
  e.gamma_bar = gamma_sum / s.n;
  e.policy_effect = e.beta_bar + e.gamma_bar;
  return e;
}

double policy_effect_oracle(const OutcomeModel& m, const InterferenceStructure& s) {
  check_dimensions(m, s);
  const std::vector<double> base = eval_outcomes(m, s, Assignment::zeros(s.n));
  const double base_total = std::accumulate(base.begin(), base.end(), 0.0);
  double acc = 0.0;
  for (int k = 0; k < s.n; ++k) {
    const std::vector<double> y = eval_outcomes(m, s, Assignment::single_treated(s.n, k));
    acc += std::accumulate(y.begin(), y.end(), 0.0) - base_total;
  }
  return acc / s.n;
}

OutcomeModel random_model(const InterferenceStructure& s, double lo, double hi,
                          std::uint64_t seed) {
  if (!(lo <= hi)) throw std::invalid_argument("random_model: need lo <= hi");
  SplitMix64 rng(seed);
  OutcomeModel m;
  m.alpha.resize(static_cast<std::size_t>(s.n));
  m.beta.resize(static_cast<std::size_t>(s.n));
  m.gamma.assign(static_cast<std::size_t>(s.n), std::vector<double>(s.radius));
  for (int i = 0; i < s.n; ++i) {
    m.alpha[i] = rng.uniform(lo, hi);
    m.beta[i] = rng.uniform(lo, hi);
    for (int r = 0; r < s.radius; ++r) m.gamma[i][r] = rng.uniform(lo, hi);
  }
  return m;
}

void write_model(std::ostream& out, const OutcomeModel& m) {
  for (int i = 0; i < m.n(); ++i) {
    out << i << ' ' << g17(m.alpha[i]) << ' ' << g17(m.beta[i]);
    for (double g : m.gamma[i]) out << ' ' << g17(g);
    out << '\n';
  }
}

namespace {

double parse_double(const std::string& tok, int lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    if (!std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError("model line " + std::to_string(lineno) + ": bad coefficient '" + tok + "'");
  }
}

}  // namespace

OutcomeModel read_model(std::istream& in) {
  struct Row {
    int unit;
    double alpha, beta;
    std::vector<double> gamma;
  };
  std::vector<Row> rows;
  int radius = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    std::istringstream ls(hash == std::string::npos ? line : line.substr(0, hash));
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks.size() < 4)
      throw IoError("model line " + std::to_string(lineno) +
                    ": expected `i alpha beta gamma_1 ... gamma_R`");
    Row row;
    try {
      row.unit = std::stoi(toks[0]);
    } catch (const std::exception&) {
      throw IoError("model line " + std::to_string(lineno) + ": bad unit id");
    }
    row.alpha = parse_double(toks[1], lineno);
    row.beta = parse_double(toks[2], lineno);
    for (std::size_t k = 3; k < toks.size(); ++k)
      row.gamma.push_back(parse_double(toks[k], lineno));
    if (radius < 0)
      radius = static_cast<int>(row.gamma.size());
    else if (radius != static_cast<int>(row.gamma.size()))
      throw IoError("model line " + std::to_string(lineno) + ": inconsistent gamma count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("model file has no data lines");
  const int n = static_cast<int>(rows.size());
  OutcomeModel m;
  m.alpha.assign(static_cast<std::size_t>(n), 0.0);
  m.beta.assign(static_cast<std::size_t>(n), 0.0);
  m.gamma.assign(static_cast<std::size_t>(n), std::vector<double>(radius));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (auto& row : rows) {
    if (row.unit < 0 || row.unit >= n)
      throw IoError("model: unit ids must be dense 0.." + std::to_string(n - 1));
    if (seen[row.unit]) throw IoError("model: duplicate unit " + std::to_string(row.unit));
    seen[row.unit] = 1;
    m.alpha[row.unit] = row.alpha;
    m.beta[row.unit] = row.beta;
    m.gamma[row.unit] = std::move(row.gamma);
  }
  return m;
}

void write_model_file(const std::string& path, const OutcomeModel& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  write_model(out, m);
}

OutcomeModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  return read_model(in);
}

}  // namespace spillover
