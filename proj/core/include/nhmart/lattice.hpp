#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nhmart/error.hpp"

namespace nhmart {

/// One node of a lattice description: `id` is a user-visible label, `parent`
/// refers to another id (absent for roots), `measure` is the interval length
/// |I|. `generation` defaults to tree depth when unset.
struct NodeSpec {
  long long id = 0;
  std::optional<long long> parent;
  double measure = 0.0;
  std::optional<int> generation;
};

struct Violation {
  ErrorKind rule;
  long long node_id;
  std::string detail;
};

/// Structural check of a lattice description. Returns every violated rule;
/// nothing is repaired. An empty result means build_lattice will succeed.
std::vector<Violation> validate(const std::vector<NodeSpec>& specs);

/// Measured forest of intervals. Children of a node partition its measure;
/// generations strictly increase downward. Immutable once built; node handles
/// are dense indices in a DFS order, so the leaves under any node form a
/// contiguous range.
class Lattice {
 public:
  static Lattice build(const std::vector<NodeSpec>& specs);

  int size() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }

  bool is_leaf(int node) const { return nodes_[check(node)].children.empty(); }
  bool is_root(int node) const { return nodes_[check(node)].parent < 0; }
  double measure(int node) const { return nodes_[check(node)].measure; }
  int generation(int node) const { return nodes_[check(node)].gen; }
  int depth(int node) const { return nodes_[check(node)].depth; }
  long long label(int node) const { return nodes_[check(node)].label; }

  /// -1 for roots.
  int parent(int node) const { return nodes_[check(node)].parent; }
  std::span<const int> children(int node) const {
    const Node& n = nodes_[check(node)];
    return {n.children.data(), n.children.size()};
  }

  std::span<const int> roots() const { return {roots_.data(), roots_.size()}; }
  /// Leaf slot -> node index, in DFS order.
  std::span<const int> leaves() const { return {leaves_.data(), leaves_.size()}; }

  /// Half-open range of leaf slots under `node`.
  std::pair<int, int> leaf_range(int node) const {
    const Node& n = nodes_[check(node)];
    return {n.leaf_begin, n.leaf_end};
  }
  /// Leaf slot of a leaf node.
  int leaf_slot(int node) const;
  double leaf_measure(int slot) const { return leaf_measures_[slot]; }
  std::span<const double> leaf_measures() const {
    return {leaf_measures_.data(), leaf_measures_.size()};
  }

  int node_of_label(long long label) const;
  int max_depth() const { return max_depth_; }
  double total_measure() const { return total_measure_; }

  /// Re-checks the built invariants (used on generator output).
  std::vector<Violation> check_invariants() const;

  std::vector<NodeSpec> to_specs() const;

  bool same_as(const Lattice& other) const { return this == &other; }

 private:
  struct Node {
    long long label;
    int parent;
    int gen;
    int depth;
    double measure;
    int leaf_begin;
    int leaf_end;
    std::vector<int> children;
  };

  int check(int node) const {
    if (node < 0 || node >= static_cast<int>(nodes_.size()))
      throw Error(ErrorKind::UnknownNode, "node index " + std::to_string(node));
    return node;
  }

  std::vector<Node> nodes_;
  std::vector<int> roots_;
  std::vector<int> leaves_;
  std::vector<double> leaf_measures_;
  int max_depth_ = 0;
  double total_measure_ = 0.0;
};

/// Full r-ary tree of the given depth with equal splits at every node.
Lattice uniform_radic(int r, int depth, double total);

}  // namespace nhmart
