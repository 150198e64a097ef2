#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cayley {

// Finite Cayley tree truncated at a given depth. Site 0 is the center;
// sites are indexed breadth-first by shell, children in increasing parent
// order, so the layout is deterministic across runs and platforms.
// Interior sites have exactly xi neighbors, boundary sites (shell == depth)
// have one.
struct TruncatedTree {
  int xi = 2;
  int depth = 0;
  std::vector<std::vector<int>> adjacency;
  std::vector<int> parent;    // parent[0] == -1
  std::vector<int> shell_of;  // graph distance from the center

  int sites() const { return static_cast<int>(adjacency.size()); }
  int degree(int i) const { return static_cast<int>(adjacency[i].size()); }
};

// Number of sites at distance a from the center: 1 for a = 0,
// xi*(xi-1)^(a-1) otherwise. Throws std::overflow_error if the count does
// not fit in 64 bits.
std::uint64_t shell_size(int xi, int a);

// Total sites of a depth-truncated tree (checked arithmetic).
std::uint64_t tree_site_count(int xi, int depth);

// Builds the tree. Throws std::invalid_argument for xi < 2 or depth < 0 and
// std::length_error when the site count exceeds max_sites.
TruncatedTree build_tree(int xi, int depth, std::uint64_t max_sites = 10'000'000);

// Graph distance between two sites, O(depth) via parent pointers.
int distance(const TruncatedTree& tree, int i, int j);

// Edge list as "site_a,site_b" lines, smaller index first.
void write_edge_list_csv(const TruncatedTree& tree, std::ostream& out);

}  // namespace cayley
