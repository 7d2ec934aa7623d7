#include "nhmart/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace nhmart {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MeasureMismatch: return "MeasureMismatch";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorKind::GenerationOrder: return "GenerationOrder";
    case ErrorKind::SingleChild: return "SingleChild";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::UnknownParent: return "UnknownParent";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::LeafNode: return "LeafNode";
    case ErrorKind::LatticeMismatch: return "LatticeMismatch";
    case ErrorKind::ZeroMeanViolated: return "ZeroMeanViolated";
    case ErrorKind::NegativeInput: return "NegativeInput";
    case ErrorKind::NoParent: return "NoParent";
    case ErrorKind::NoBlock: return "NoBlock";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::BadArgument: return "BadArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

namespace {

constexpr double kMeasureRelTol = 1e-12;

struct RawForest {
  std::unordered_map<long long, int> index;   // label -> spec position
  std::vector<std::vector<int>> children;     // spec positions, file order
  std::vector<int> roots;                     // spec positions, file order
  bool acyclic = true;
};

RawForest link(const std::vector<NodeSpec>& specs, std::vector<Violation>* out) {
  RawForest raw;
  raw.children.resize(specs.size());
  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    auto [it, fresh] = raw.index.emplace(specs[i].id, i);
    if (!fresh && out)
      out->push_back({ErrorKind::DuplicateId, specs[i].id, "id appears twice"});
  }
  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    if (!specs[i].parent) {
      raw.roots.push_back(i);
      continue;
    }
    auto it = raw.index.find(*specs[i].parent);
    if (it == raw.index.end()) {
      if (out)
        out->push_back({ErrorKind::UnknownParent, specs[i].id,
                        "parent id " + std::to_string(*specs[i].parent)});
      raw.roots.push_back(i);  // keep traversal total
      continue;
    }
    raw.children[it->second].push_back(i);
  }
  // Reachability from the roots detects cycles (a cycle is unreachable).
  std::vector<char> seen(specs.size(), 0);
  std::vector<int> stack(raw.roots.rbegin(), raw.roots.rend());
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = 1;
    for (int c : raw.children[i]) stack.push_back(c);
  }
  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    if (!seen[i]) {
      raw.acyclic = false;
      if (out) out->push_back({ErrorKind::CycleDetected, specs[i].id, "unreachable from any root"});
    }
  }
  return raw;
}

}  // namespace

std::vector<Violation> validate(const std::vector<NodeSpec>& specs) {
  std::vector<Violation> out;
  RawForest raw = link(specs, &out);
  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    const NodeSpec& n = specs[i];
    if (!(n.measure > 0.0) || !std::isfinite(n.measure))
      out.push_back({ErrorKind::NonPositiveMeasure, n.id, "measure " + std::to_string(n.measure)});
    if (raw.children[i].size() == 1)
      out.push_back({ErrorKind::SingleChild, n.id, "exactly one child"});
    if (!raw.children[i].empty()) {
      double sum = 0.0;
      for (int c : raw.children[i]) sum += specs[c].measure;
      if (std::abs(sum - n.measure) > kMeasureRelTol * std::max(std::abs(n.measure), 1e-300))
        out.push_back({ErrorKind::MeasureMismatch, n.id,
                       "children sum " + std::to_string(sum) + " vs " + std::to_string(n.measure)});
    }
    if (n.generation && n.parent) {
      auto it = raw.index.find(*n.parent);
      if (it != raw.index.end()) {
        const NodeSpec& par = specs[it->second];
        // When the parent's generation is implicit we cannot compare here;
        // build() fills depths and re-checks.
        if (par.generation && *n.generation <= *par.generation)
          out.push_back({ErrorKind::GenerationOrder, n.id, "generation <= parent's"});
      }
    }
  }
  return out;
}

Lattice Lattice::build(const std::vector<NodeSpec>& specs) {
  std::vector<Violation> violations = validate(specs);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw Error(v.rule, "node " + std::to_string(v.node_id) + " (" + v.detail + ")" +
                            (violations.size() > 1
                                 ? " and " + std::to_string(violations.size() - 1) + " more"
                                 : ""));
  }
  RawForest raw = link(specs, nullptr);

  Lattice lat;
  lat.nodes_.reserve(specs.size());
  std::vector<int> order;  // spec position -> node index
  order.assign(specs.size(), -1);

  // DFS keeping children in file order; subtrees come out contiguous.
  for (int r : raw.roots) {
    std::vector<int> stack{r};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      order[i] = static_cast<int>(lat.nodes_.size());
      Node node;
      node.label = specs[i].id;
      node.measure = specs[i].measure;
      node.parent = specs[i].parent ? order[raw.index.at(*specs[i].parent)] : -1;
      node.depth = node.parent < 0 ? 0 : lat.nodes_[node.parent].depth + 1;
      node.gen = specs[i].generation.value_or(node.depth);
      node.leaf_begin = node.leaf_end = -1;
      lat.nodes_.push_back(std::move(node));
      for (auto it = raw.children[i].rbegin(); it != raw.children[i].rend(); ++it)
        stack.push_back(*it);
    }
  }
  // Children in file order, remapped to node indices.
  for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
    std::vector<int> mapped;
    mapped.reserve(raw.children[i].size());
    for (int c : raw.children[i]) mapped.push_back(order[c]);
    lat.nodes_[order[i]].children = std::move(mapped);
  }
  for (int r : raw.roots) lat.roots_.push_back(order[r]);

  // Leaf slots in DFS order; ranges bottom-up.
  for (int idx = 0; idx < lat.size(); ++idx) {
    Node& n = lat.nodes_[idx];
    if (n.children.empty()) {
      n.leaf_begin = static_cast<int>(lat.leaves_.size());
      n.leaf_end = n.leaf_begin + 1;
      lat.leaves_.push_back(idx);
      lat.leaf_measures_.push_back(n.measure);
    }
    lat.max_depth_ = std::max(lat.max_depth_, n.depth);
  }
  for (int idx = lat.size() - 1; idx >= 0; --idx) {
    Node& n = lat.nodes_[idx];
    if (!n.children.empty()) {
      n.leaf_begin = lat.nodes_[n.children.front()].leaf_begin;
      n.leaf_end = lat.nodes_[n.children.back()].leaf_end;
    }
    if (n.parent >= 0 && n.gen <= lat.nodes_[n.parent].gen)
      throw Error(ErrorKind::GenerationOrder,
                  "node " + std::to_string(n.label) + " generation <= parent's");
  }
  for (int r : lat.roots_) lat.total_measure_ += lat.nodes_[r].measure;
  return lat;
}

int Lattice::leaf_slot(int node) const {
  const Node& n = nodes_[check(node)];
  if (!n.children.empty()) throw Error(ErrorKind::BadArgument, "leaf_slot of internal node");
  return n.leaf_begin;
}

int Lattice::node_of_label(long long label) const {
  for (int i = 0; i < size(); ++i)
    if (nodes_[i].label == label) return i;
  throw Error(ErrorKind::UnknownNode, "label " + std::to_string(label));
}

std::vector<Violation> Lattice::check_invariants() const {
  return nhmart::validate(to_specs());
}

std::vector<NodeSpec> Lattice::to_specs() const {
  std::vector<NodeSpec> specs(size());
  for (int i = 0; i < size(); ++i) {
    specs[i].id = nodes_[i].label;
    if (nodes_[i].parent >= 0) specs[i].parent = nodes_[nodes_[i].parent].label;
    specs[i].measure = nodes_[i].measure;
    specs[i].generation = nodes_[i].gen;
  }
  return specs;
}

Lattice uniform_radic(int r, int depth, double total) {
  if (r < 2) throw Error(ErrorKind::BadArgument, "r-adic lattice needs r >= 2");
  if (depth < 0) throw Error(ErrorKind::BadArgument, "negative depth");
  if (!(total > 0.0)) throw Error(ErrorKind::NonPositiveMeasure, "total " + std::to_string(total));
  std::vector<NodeSpec> specs;
  specs.push_back({0, std::nullopt, total, std::nullopt});
  long long next = 1;
  // Breadth-first numbering; measures from the closed form total / r^level.
  std::vector<std::pair<long long, int>> frontier{{0, 0}};
  for (int level = 1; level <= depth; ++level) {
    double m = total;
    for (int i = 0; i < level; ++i) m /= r;
    std::vector<std::pair<long long, int>> fresh;
    for (auto [pid, pdepth] : frontier) {
      for (int c = 0; c < r; ++c) {
        specs.push_back({next, pid, m, std::nullopt});
        fresh.emplace_back(next, level);
        ++next;
      }
    }
    frontier = std::move(fresh);
  }
  return Lattice::build(specs);
}

}  // namespace nhmart
