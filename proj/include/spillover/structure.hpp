#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spillover/common.hpp"

namespace spillover {

// Distance-shell interference structure. shell(i, r) lists the units at
// distance exactly r from unit i, for r = 1..radius, members sorted
// ascending. A shell never contains its own unit, shells of one unit are
// pairwise disjoint, and empty shells are allowed. Values are treated as
// immutable once built: generators and transforms return new structures.
struct InterferenceStructure {
  int n = 0;
  int radius = 0;
  std::vector<std::vector<int>> shells;  // indexed [i * radius + (r - 1)]

  InterferenceStructure() = default;
  InterferenceStructure(int n_units, int max_radius);

  const std::vector<int>& shell(int i, int r) const {
    return shells[static_cast<std::size_t>(i) * radius + (r - 1)];
  }
  std::vector<int>& shell(int i, int r) {
    return shells[static_cast<std::size_t>(i) * radius + (r - 1)];
  }
  int shell_size(int i, int r) const { return static_cast<int>(shell(i, r).size()); }

  bool operator==(const InterferenceStructure&) const = default;
};

enum class ViolationKind { self_inclusion, shell_overlap, invalid_id, duplicate_member };

struct Violation {
  ViolationKind kind{};
  int unit = 0;
  int radius = 0;        // shell where the problem sits
  int other_radius = 0;  // shell_overlap: the colliding shell
  int member = 0;        // offending unit id
};

std::string describe(const Violation& v);

// Lists every invariant violation; empty result means the structure is valid.
// Violations are data, not errors.
std::vector<Violation> validate(const InterferenceStructure& s);

// n-cycle with shell(i, r) = {(i - r) mod n, (i + r) mod n}; every shell has
// size 2. Requires n > 2 * radius, otherwise shells would collide.
InterferenceStructure ring_structure(int n, int radius);

enum class GridMetric { manhattan, chebyshev };

// width x height lattice with row-major unit ids (id = y * width + x);
// shell(i, r) holds the cells at exact lattice distance r under the chosen
// metric, no wraparound.
InterferenceStructure grid_structure(int width, int height, int radius, GridMetric metric);

// Shells at exact shortest-path distance r on an undirected graph over
// units 0..n-1. Self-loops and duplicate edges are ignored; an edge id >= n
// is an ingestion error.
InterferenceStructure bfs_shells(int n, const std::vector<std::pair<int, int>>& edges,
                                 int radius);

// ---- file formats (see README) ----

struct EdgeListData {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // relabeled to dense 0-based ids
  std::vector<std::string> labels;         // labels[id] = original label
  bool relabeled = false;                  // true when labels differ from "0".."n-1"
};

// One edge per line, two whitespace-separated labels, '#' starts a comment,
// undirected, duplicate edges collapsed, self-loops dropped. Labels are
// relabeled to dense 0-based ids: numeric order when every label parses as a
// decimal integer, lexicographic otherwise.
EdgeListData read_edge_list(std::istream& in);
EdgeListData read_edge_list_file(const std::string& path);

// Structure dump: one line per (i, r), `i r id1,id2,...`; the member list may
// be empty (line then has just the two indices). Lines starting with '#' are
// ignored. Round-trips losslessly.
void write_structure(std::ostream& out, const InterferenceStructure& s);
InterferenceStructure read_structure(std::istream& in);
void write_structure_file(const std::string& path, const InterferenceStructure& s);
InterferenceStructure read_structure_file(const std::string& path);

}  // namespace spillover
