#include "spillover/structure.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spillover/common.hpp"

namespace spillover {

InterferenceStructure::InterferenceStructure(int n_units, int max_radius)
    : n(n_units), radius(max_radius) {
  if (n_units <= 0) throw std::invalid_argument("structure: n must be positive");
  if (max_radius <= 0) throw std::invalid_argument("structure: radius must be positive");
  shells.resize(static_cast<std::size_t>(n_units) * max_radius);
}

std::string describe(const Violation& v) {
  std::ostringstream os;
  switch (v.kind) {
    case ViolationKind::self_inclusion:
      os << "unit " << v.unit << " appears in its own shell r=" << v.radius;
      break;
    case ViolationKind::shell_overlap:
      os << "unit " << v.unit << ": member " << v.member << " appears in shells r="
         << v.other_radius << " and r=" << v.radius;
      break;
    case ViolationKind::invalid_id:
      os << "unit " << v.unit << ", shell r=" << v.radius << ": member id " << v.member
         << " out of range";
      break;
    case ViolationKind::duplicate_member:
      os << "unit " << v.unit << ", shell r=" << v.radius << ": member " << v.member
         << " listed twice";
      break;
  }
  return os.str();
}

std::vector<Violation> validate(const InterferenceStructure& s) {
  std::vector<Violation> out;
  // first_seen[j] = shell where j already occurred for the current unit
  std::vector<int> first_seen(static_cast<std::size_t>(std::max(s.n, 0)), 0);
  for (int i = 0; i < s.n; ++i) {
    std::fill(first_seen.begin(), first_seen.end(), 0);
    for (int r = 1; r <= s.radius; ++r) {
      std::set<int> in_this_shell;
      for (int j : s.shell(i, r)) {
        if (j < 0 || j >= s.n) {
          out.push_back({ViolationKind::invalid_id, i, r, 0, j});
          continue;
        }
        if (j == i) {
          out.push_back({ViolationKind::self_inclusion, i, r, 0, j});
          continue;
        }
        if (!in_this_shell.insert(j).second) {
          out.push_back({ViolationKind::duplicate_member, i, r, 0, j});
          continue;
        }
        if (first_seen[j] != 0) {
          out.push_back({ViolationKind::shell_overlap, i, r, first_seen[j], j});
        } else {
          first_seen[j] = r;
        }
      }
    }
  }
  return out;
}

InterferenceStructure ring_structure(int n, int radius) {
  if (radius <= 0) throw std::invalid_argument("ring_structure: radius must be positive");
  if (n <= 2 * radius)
    throw std::invalid_argument("ring_structure: need n > 2*radius, shells would collide");
  InterferenceStructure s(n, radius);
  for (int i = 0; i < n; ++i) {
    for (int r = 1; r <= radius; ++r) {
      int lo = ((i - r) % n + n) % n;
      int hi = (i + r) % n;
      std::vector<int> members{lo, hi};
      std::sort(members.begin(), members.end());
      s.shell(i, r) = std::move(members);
    }
  }
  return s;
}

InterferenceStructure grid_structure(int width, int height, int radius, GridMetric metric) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("grid_structure: width and height must be >= 1");
  if (radius < 1) throw std::invalid_argument("grid_structure: radius must be >= 1");
  const int n = width * height;
  InterferenceStructure s(n, radius);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int i = y * width + x;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          const int dist = metric == GridMetric::manhattan ? std::abs(dx) + std::abs(dy)
                                                           : std::max(std::abs(dx), std::abs(dy));
          if (dist >= 1 && dist <= radius) s.shell(i, dist).push_back(ny * width + nx);
        }
      }
      for (int r = 1; r <= radius; ++r) std::sort(s.shell(i, r).begin(), s.shell(i, r).end());
    }
  }
  return s;
}

InterferenceStructure bfs_shells(int n, const std::vector<std::pair<int, int>>& edges,
                                 int radius) {
  if (n <= 0) throw std::invalid_argument("bfs_shells: n must be positive");
  if (radius < 1) throw std::invalid_argument("bfs_shells: radius must be >= 1");
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::invalid_argument("bfs_shells: edge id out of range");
    if (a == b) continue;  // self-loops ignored
    adj[a].insert(b);
    adj[b].insert(a);
  }
  InterferenceStructure s(n, radius);
  std::vector<int> dist(static_cast<std::size_t>(n));
  for (int src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (dist[u] == radius) continue;
      for (int v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int j = 0; j < n; ++j)
      if (dist[j] >= 1 && dist[j] <= radius) s.shell(src, dist[j]).push_back(j);
    // adjacency sets are ordered, BFS fills ascending per shell already; sort anyway
    for (int r = 1; r <= radius; ++r) std::sort(s.shell(src, r).begin(), s.shell(src, r).end());
  }
  return s;
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool is_decimal_integer(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(std::string("cannot parse ") + what + " from token '" + tok + "'");
  }
}

}  // namespace

EdgeListData read_edge_list(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(strip_comment(line));
    std::string a, b, extra;
    if (!(ls >> a)) continue;  // blank / comment-only line
    if (!(ls >> b) || (ls >> extra))
      throw IoError("edge list line " + std::to_string(lineno) +
                    ": expected exactly two ids");
    raw.emplace_back(std::move(a), std::move(b));
  }

  std::set<std::string> label_set;
  for (const auto& [a, b] : raw) {
    label_set.insert(a);
    label_set.insert(b);
  }
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  const bool all_numeric =
      std::all_of(labels.begin(), labels.end(), [](const std::string& l) {
        return is_decimal_integer(l);
      });
  if (all_numeric) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      const unsigned long long va = std::stoull(a), vb = std::stoull(b);
      return va != vb ? va < vb : a < b;
    });
  }
  std::map<std::string, int> id_of;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) id_of[labels[i]] = i;

  std::set<std::pair<int, int>> edge_set;
  for (const auto& [a, b] : raw) {
    const int ia = id_of[a], ib = id_of[b];
    if (ia == ib) continue;
    edge_set.emplace(std::min(ia, ib), std::max(ia, ib));
  }

  EdgeListData out;
  out.n = static_cast<int>(labels.size());
  out.edges.assign(edge_set.begin(), edge_set.end());
  out.relabeled = false;
  for (int i = 0; i < out.n; ++i)
    if (labels[i] != std::to_string(i)) out.relabeled = true;
  out.labels = std::move(labels);
  return out;
}

EdgeListData read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list file: " + path);
  return read_edge_list(in);
}

void write_structure(std::ostream& out, const InterferenceStructure& s) {
  for (int i = 0; i < s.n; ++i) {
    for (int r = 1; r <= s.radius; ++r) {
      out << i << ' ' << r;
      const auto& members = s.shell(i, r);
      for (std::size_t k = 0; k < members.size(); ++k)
        out << (k == 0 ? " " : ",") << members[k];
      out << '\n';
    }
  }
}

InterferenceStructure read_structure(std::istream& in) {
  struct Row {
    int unit, r;
    std::vector<int> members;
  };
  std::vector<Row> rows;
  int max_unit = -1, max_r = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(strip_comment(line));
    std::string utok, rtok, mtok;
    if (!(ls >> utok)) continue;
    if (!(ls >> rtok))
      throw IoError("structure line " + std::to_string(lineno) + ": expected `i r [ids]`");
    Row row;
    row.unit = parse_int(utok, "unit id");
    row.r = parse_int(rtok, "shell radius");
    if (row.unit < 0 || row.r < 1)
      throw IoError("structure line " + std::to_string(lineno) + ": bad unit or radius");
    if (ls >> mtok) {
      std::string extra;
      if (ls >> extra)
        throw IoError("structure line " + std::to_string(lineno) + ": trailing tokens");
      std::istringstream ms(mtok);
      std::string piece;
      while (std::getline(ms, piece, ','))
        row.members.push_back(parse_int(piece, "member id"));
    }
    max_unit = std::max(max_unit, row.unit);
    max_r = std::max(max_r, row.r);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("structure file has no data lines");
  InterferenceStructure s(max_unit + 1, max_r);
  for (auto& row : rows) {
    std::sort(row.members.begin(), row.members.end());
    s.shell(row.unit, row.r) = std::move(row.members);
  }
  return s;
}

void write_structure_file(const std::string& path, const InterferenceStructure& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write structure file: " + path);
  write_structure(out, s);
}

InterferenceStructure read_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open structure file: " + path);
  return read_structure(in);
}

}  // namespace spillover
