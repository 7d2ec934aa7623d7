#pragma once

#include <memory>

#include "nhmart/paraproduct.hpp"

namespace nhmart {

/// The averaging counterexample: chain I_0 = [0,1) supset I_1 supset ... with
/// |I_k| = r^k, r = 1 - 1/n, J_k the sibling of I_k, and difference components
/// Delta_{I_{k-1}} f = 1_{J_k} - alpha 1_{I_k}, alpha = 1/(n-1).
struct AvgCounterexample {
  std::shared_ptr<Lattice> lattice;
  MartDecomp decomp;
  int n = 0;
  double alpha = 0.0;
};
AvgCounterexample gen_avg_counterexample(int n);

/// The basis counterexample: the 4-children recursion on the I-line with
/// Delta f = h_{J} + alpha h_{I} and Delta g = beta (h_J + h_I), beta solved
/// from ||Delta f||_p = ||Delta g||_p per node.
struct BasisCounterexample {
  std::shared_ptr<Lattice> lattice;
  MartDecomp f;
  MartDecomp g;
  double beta = 0.0;
  double p = 0.0;
};
BasisCounterexample gen_basis_counterexample(int n, int levels, double p);

/// One mixing block per delta: a node split 8 ways with small/large ratio
/// delta carrying the swap block, each child split the same way and carrying
/// its own swap block; b places htilde = delta^{-1/2} h on every child.
/// Several blocks are assembled under a common root chain.
struct MixingCounterexample {
  std::shared_ptr<Lattice> lattice;
  StepFunction b;
  TransformBlocks transform;
  std::vector<int> block_nodes;  // the 8-way nodes carrying swap blocks
  std::vector<double> deltas;
};
MixingCounterexample gen_mixing_counterexample(const std::vector<double>& deltas);

/// Divergent BMO series: the dyadic chain over [0, 2^N) with
/// Delta_{I_k} f = 1_{[0, 2^{k-1})} - 1_{[2^{k-1}, 2^k)}, k = 1..N.
struct BmoDivergent {
  std::shared_ptr<Lattice> lattice;
  MartDecomp decomp;
  int N = 0;
  int leftmost_leaf_slot = 0;
};
BmoDivergent gen_bmo_divergent(int N);

}  // namespace nhmart
