#include "nhmart/counterexamples.hpp"

#include <cmath>

namespace nhmart {

AvgCounterexample gen_avg_counterexample(int n) {
  if (n < 2) throw Error(ErrorKind::BadArgument, "averaging counterexample needs n >= 2");
  double r = (n - 1.0) / n;
  double alpha = 1.0 / (n - 1.0);

  // I_0 = [0,1) normalized; I_k and its sibling J_k split I_{k-1} exactly.
  std::vector<NodeSpec> specs;
  specs.push_back({0, std::nullopt, 1.0, std::nullopt});  // I_0 labeled 0
  std::vector<double> mI(n + 1);
  mI[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    mI[k] = mI[k - 1] * r;
    specs.push_back({k, k - 1, mI[k], std::nullopt});                  // I_k
    specs.push_back({n + k, k - 1, mI[k - 1] - mI[k], std::nullopt});  // J_k
  }
  AvgCounterexample out;
  out.lattice = std::make_shared<Lattice>(Lattice::build(specs));
  out.n = n;
  out.alpha = alpha;
  const Lattice& lat = *out.lattice;
  out.decomp = MartDecomp::zero(lat);
  for (int k = 1; k <= n; ++k) {
    int parent = lat.node_of_label(k - 1);
    // children in file order: (I_k, J_k)
    out.decomp.diff[parent][0] = -alpha;
    out.decomp.diff[parent][1] = 1.0;
  }
  return out;
}

BasisCounterexample gen_basis_counterexample(int n, int levels, double p) {
  if (n < 2) throw Error(ErrorKind::BadArgument, "basis counterexample needs n >= 2");
  if (levels < 0) throw Error(ErrorKind::BadArgument, "levels must be >= 0");
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorKind::BadExponent, "p in [1, inf) required");

  double alpha = 1.0 / (n - 1.0);
  // beta solves ||Delta f||_p = ||Delta g||_p per node; both scale with the
  // node measure, so one value serves every level.
  double beta = std::pow(1.0 / n + (1.0 - 1.0 / n) * std::pow(alpha, p), 1.0 / p);

  std::vector<NodeSpec> specs;
  specs.push_back({0, std::nullopt, 1.0, std::nullopt});
  long long next_id = 1;
  // I-line nodes of the current level: (label, measure)
  std::vector<std::pair<long long, double>> iline{{0, 1.0}};
  std::vector<long long> split_nodes;
  for (int level = 1; level <= levels; ++level) {
    std::vector<std::pair<long long, double>> fresh;
    for (auto [id, m] : iline) {
      double mi = m * (n - 1.0) / n;  // the I part
      double mj = m - mi;             // the J part, exact complement
      long long im = next_id++, ip = next_id++, jm = next_id++, jp = next_id++;
      specs.push_back({im, id, mi / 2.0, std::nullopt});
      specs.push_back({ip, id, mi - mi / 2.0, std::nullopt});
      specs.push_back({jm, id, mj / 2.0, std::nullopt});
      specs.push_back({jp, id, mj - mj / 2.0, std::nullopt});
      split_nodes.push_back(id);
      if (level < levels) {
        fresh.emplace_back(im, mi / 2.0);
        fresh.emplace_back(ip, mi - mi / 2.0);
      }
    }
    iline = std::move(fresh);
  }

  BasisCounterexample out;
  out.lattice = std::make_shared<Lattice>(Lattice::build(specs));
  out.beta = beta;
  out.p = p;
  const Lattice& lat = *out.lattice;
  out.f = MartDecomp::zero(lat);
  out.g = MartDecomp::zero(lat);
  if (levels == 0) {
    out.f.root_avg[0] = 1.0;
    out.g.root_avg[0] = 1.0;
    return out;
  }
  for (long long id : split_nodes) {
    int node = lat.node_of_label(id);
    // children file order: (I-, I+, J-, J+); Delta f = h_J + alpha h_I,
    // Delta g = beta (h_J + h_I), h = 1_{right half} - 1_{left half}.
    out.f.diff[node] << -alpha, alpha, -1.0, 1.0;
    out.g.diff[node] << -beta, beta, -beta, beta;
  }
  return out;
}

namespace {

// Appends the 8-way division of a node: the small side (ratio delta) and the
// large side each split into four equal quarters.
std::vector<std::pair<long long, double>> split8(std::vector<NodeSpec>* specs,
                                                 long long* next_id, long long parent,
                                                 double measure, double delta) {
  double small = measure * (delta / (1.0 + delta));
  double big = measure - small;
  std::vector<std::pair<long long, double>> kids;
  for (int k = 0; k < 4; ++k) kids.emplace_back((*next_id)++, small / 4.0);
  for (int k = 0; k < 4; ++k) kids.emplace_back((*next_id)++, big / 4.0);
  // Quarter round-off: make the sums exact by adjusting the last quarter.
  double s0 = kids[0].second + kids[1].second + kids[2].second + kids[3].second;
  kids[3].second += small - s0;
  double s1 = kids[4].second + kids[5].second + kids[6].second + kids[7].second;
  kids[7].second += big - s1;
  for (auto& [id, m] : kids) specs->push_back({id, parent, m, std::nullopt});
  return kids;
}

}  // namespace

MixingCounterexample gen_mixing_counterexample(const std::vector<double>& deltas) {
  if (deltas.empty()) throw Error(ErrorKind::BadArgument, "need at least one delta");
  for (double d : deltas)
    if (!(d > 0.0) || !(d < 1.0))
      throw Error(ErrorKind::BadArgument, "delta must lie in (0, 1)");

  int K = static_cast<int>(deltas.size());
  std::vector<NodeSpec> specs;
  long long next_id = 0;
  // Chain nodes A_1..A_{K-1} with children (block_i, A_{i+1}); A_K is the
  // last block itself. Blocks carry measure 1.
  std::vector<long long> chain_ids, block_ids;
  for (int i = 0; i + 1 < K; ++i) chain_ids.push_back(next_id++);
  for (int i = 0; i < K; ++i) block_ids.push_back(next_id++);
  for (int i = 0; i + 1 < K; ++i) {
    std::optional<long long> parent =
        i == 0 ? std::optional<long long>{} : std::optional<long long>{chain_ids[i - 1]};
    specs.push_back({chain_ids[i], parent, static_cast<double>(K - i), std::nullopt});
  }
  for (int i = 0; i < K; ++i) {
    std::optional<long long> parent;
    if (K == 1)
      parent = std::nullopt;
    else if (i + 1 < K)
      parent = chain_ids[i];
    else
      parent = chain_ids[K - 2];
    specs.push_back({block_ids[i], parent, 1.0, std::nullopt});
  }

  // Two-level blocks: the 8-way node P and each of its children again split
  // 8 ways; swap blocks live at P and at every child, and b places
  // htilde = delta^{-1/2} 1_{small} - delta^{1/2} 1_{large} on every child.
  struct LeafPlan {
    long long id;
    double b_value;
  };
  std::vector<LeafPlan> leaf_plan;
  std::vector<long long> swap_ids;
  for (int i = 0; i < K; ++i) {
    double d = deltas[i];
    swap_ids.push_back(block_ids[i]);
    auto children = split8(&specs, &next_id, block_ids[i], 1.0, d);
    for (auto [cid, cm] : children) {
      swap_ids.push_back(cid);
      auto grand = split8(&specs, &next_id, cid, cm, d);
      for (int k = 0; k < 8; ++k) {
        double v = k < 4 ? 1.0 / std::sqrt(d) : -std::sqrt(d);
        leaf_plan.push_back({grand[k].first, v});
      }
    }
  }

  MixingCounterexample out;
  out.lattice = std::make_shared<Lattice>(Lattice::build(specs));
  out.deltas = deltas;
  const Lattice& lat = *out.lattice;
  out.b = StepFunction::zero(lat);
  for (const auto& lp : leaf_plan)
    out.b.values[lat.leaf_slot(lat.node_of_label(lp.id))] = lp.b_value;
  out.transform.lattice = &lat;
  for (long long id : swap_ids) {
    int node = lat.node_of_label(id);
    out.transform.blocks[node] = swap_block(lat, node);
  }
  for (long long id : block_ids) out.block_nodes.push_back(lat.node_of_label(id));
  return out;
}

BmoDivergent gen_bmo_divergent(int N) {
  if (N < 1) throw Error(ErrorKind::BadArgument, "N >= 1 required");
  std::vector<NodeSpec> specs;
  // I_k labeled k (k = N..0), H_k labeled N + k (k = N..1).
  specs.push_back({N, std::nullopt, std::ldexp(1.0, N), std::nullopt});
  for (int k = N; k >= 1; --k) {
    specs.push_back({k - 1, k, std::ldexp(1.0, k - 1), std::nullopt});
    specs.push_back({N + k, k, std::ldexp(1.0, k - 1), std::nullopt});
  }
  BmoDivergent out;
  out.N = N;
  out.lattice = std::make_shared<Lattice>(Lattice::build(specs));
  const Lattice& lat = *out.lattice;
  out.decomp = MartDecomp::zero(lat);
  for (int k = N; k >= 1; --k) {
    int node = lat.node_of_label(k);
    out.decomp.diff[node] << 1.0, -1.0;  // children order (I_{k-1}, H_k)
  }
  out.leftmost_leaf_slot = lat.leaf_slot(lat.node_of_label(0));
  return out;
}

}  // namespace nhmart
