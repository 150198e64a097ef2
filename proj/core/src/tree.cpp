#include "cayley/tree.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace cayley {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("shell size overflows 64-bit integer");
  }
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("site count overflows 64-bit integer");
  }
  return r;
}

}  // namespace

std::uint64_t shell_size(int xi, int a) {
  if (xi < 2) throw std::invalid_argument("coordination number must be >= 2");
  if (a < 0) throw std::invalid_argument("shell index must be >= 0");
  if (a == 0) return 1;
  std::uint64_t n = static_cast<std::uint64_t>(xi);
  for (int k = 1; k < a; ++k) n = checked_mul(n, static_cast<std::uint64_t>(xi - 1));
  return n;
}

std::uint64_t tree_site_count(int xi, int depth) {
  if (xi < 2) throw std::invalid_argument("coordination number must be >= 2");
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  std::uint64_t total = 1;
  for (int a = 1; a <= depth; ++a) total = checked_add(total, shell_size(xi, a));
  return total;
}

TruncatedTree build_tree(int xi, int depth, std::uint64_t max_sites) {
  const std::uint64_t count = tree_site_count(xi, depth);
  if (count > max_sites) {
    throw std::length_error("tree with xi=" + std::to_string(xi) + " depth=" +
                            std::to_string(depth) + " has " + std::to_string(count) +
                            " sites, above the cap of " + std::to_string(max_sites));
  }

  TruncatedTree tree;
  tree.xi = xi;
  tree.depth = depth;
  tree.adjacency.resize(count);
  tree.parent.assign(count, -1);
  tree.shell_of.assign(count, 0);

  // Breadth-first by shell; children of earlier parents get smaller indices.
  int next = 1;
  int shell_begin = 0, shell_end = 1;
  for (int a = 1; a <= depth; ++a) {
    for (int p = shell_begin; p < shell_end; ++p) {
      const int children = (p == 0) ? xi : xi - 1;
      for (int c = 0; c < children; ++c) {
        const int child = next++;
        tree.parent[child] = p;
        tree.shell_of[child] = a;
        tree.adjacency[p].push_back(child);
        tree.adjacency[child].push_back(p);
      }
    }
    shell_begin = shell_end;
    shell_end = next;
  }
  return tree;
}

int distance(const TruncatedTree& tree, int i, int j) {
  if (i < 0 || j < 0 || i >= tree.sites() || j >= tree.sites()) {
    throw std::out_of_range("site index out of range");
  }
  int d = 0;
  while (tree.shell_of[i] > tree.shell_of[j]) {
    i = tree.parent[i];
    ++d;
  }
  while (tree.shell_of[j] > tree.shell_of[i]) {
    j = tree.parent[j];
    ++d;
  }
  while (i != j) {
    i = tree.parent[i];
    j = tree.parent[j];
    d += 2;
  }
  return d;
}

void write_edge_list_csv(const TruncatedTree& tree, std::ostream& out) {
  out << "site_a,site_b\n";
  for (int i = 0; i < tree.sites(); ++i) {
    for (int j : tree.adjacency[i]) {
      if (i < j) out << i << ',' << j << '\n';
    }
  }
}

}  // namespace cayley
