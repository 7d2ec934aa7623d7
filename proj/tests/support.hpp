#pragma once

// Shared test fixtures: deterministic random lattices and functions, plus
// independent oracles (dense SVD, brute-force averaging, closed-form
// certificate algebra) kept apart from the library code paths they check.

#include <Eigen/Dense>
#include <memory>
#include <random>

#include "nhmart/counterexamples.hpp"
#include "nhmart/martingale.hpp"
#include "nhmart/paraproduct.hpp"

namespace testsupport {

using nhmart::Lattice;
using nhmart::MartDecomp;
using nhmart::NodeSpec;
using nhmart::StepFunction;

using Rng = std::mt19937_64;

inline std::shared_ptr<Lattice> random_lattice(Rng& rng, int max_depth = 5,
                                               int max_children = 4) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<NodeSpec> specs;
  long long next = 0;
  struct Item {
    long long id;
    double measure;
    int depth;
  };
  std::vector<Item> frontier;
  int roots = unif(rng) < 0.3 ? 2 : 1;  // forests, not only trees
  for (int r = 0; r < roots; ++r) {
    double root_measure = 0.5 + 1.5 * unif(rng);
    specs.push_back({next, std::nullopt, root_measure, std::nullopt});
    frontier.push_back({next, root_measure, 0});
    ++next;
  }
  while (!frontier.empty()) {
    Item item = frontier.back();
    frontier.pop_back();
    if (item.depth >= max_depth) continue;
    double leaf_probability = item.depth == 0 ? 0.0 : 0.45;
    if (unif(rng) < leaf_probability) continue;
    std::uniform_int_distribution<int> nkids(2, max_children);
    int m = nkids(rng);
    // Random positive split; the last child takes the exact remainder.
    std::vector<double> weights(m);
    double total = 0.0;
    for (double& w : weights) {
      w = 0.1 + unif(rng);
      total += w;
    }
    double used = 0.0;
    for (int k = 0; k < m; ++k) {
      double mk = k + 1 == m ? item.measure - used : item.measure * weights[k] / total;
      used += mk;
      specs.push_back({next, item.id, mk, std::nullopt});
      frontier.push_back({next, mk, item.depth + 1});
      ++next;
    }
  }
  return std::make_shared<Lattice>(Lattice::build(specs));
}

inline StepFunction random_function(Rng& rng, const Lattice& lat, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::VectorXd v(lat.leaf_count());
  for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  return StepFunction(lat, v);
}

inline StepFunction random_nonneg_function(Rng& rng, const Lattice& lat) {
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  Eigen::VectorXd v(lat.leaf_count());
  for (int i = 0; i < v.size(); ++i) v[i] = unif(rng);
  return StepFunction(lat, v);
}

// L^2 inner product of leaf functions.
inline double inner(const StepFunction& f, const StepFunction& g) {
  double s = 0.0;
  for (int j = 0; j < f.lattice->leaf_count(); ++j)
    s += f.values[j] * g.values[j] * f.lattice->leaf_measure(j);
  return s;
}

// Independent oracle for the weighted spectral norm: dense SVD of the
// similarity-transformed matrix.
inline double svd_norm_oracle(const nhmart::LinearOp& op) {
  const Lattice& lat = *op.lattice;
  Eigen::VectorXd s(lat.leaf_count());
  for (int j = 0; j < lat.leaf_count(); ++j) s[j] = std::sqrt(lat.leaf_measure(j));
  Eigen::MatrixXd m = s.asDiagonal() * op.mat * s.cwiseInverse().asDiagonal();
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

// Closed-form oracle for the uncapped p = 2 certificate: reduce to the
// null-space of the two constraints and solve the quadratic maximization
// there (a different algebraic route from the library's projection).
inline double cert_l2_oracle(const Lattice& lat, const Eigen::MatrixXd& block, int parent,
                             int node) {
  auto kids = lat.children(parent);
  int m = static_cast<int>(kids.size());
  int slot = -1;
  Eigen::VectorXd w(m);
  for (int k = 0; k < m; ++k) {
    w[k] = lat.measure(kids[k]);
    if (kids[k] == node) slot = k;
  }
  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(2, m);
  constraints(0, slot) = 1.0;
  constraints.row(1) = w.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraints);
  lu.setThreshold(1e-13);
  Eigen::MatrixXd z = lu.kernel();  // c = Z y parameterizes the feasible subspace
  if (z.cols() == 0) return 0.0;
  Eigen::VectorXd f = z.transpose() * block.row(slot).transpose();
  Eigen::MatrixXd gram = z.transpose() * w.asDiagonal() * z;
  double value2 = f.dot(gram.ldlt().solve(f));
  return std::sqrt(std::max(value2, 0.0)) * std::sqrt(lat.measure(node));
}

// Random zero-mean-preserving block on the children of `parent`.
inline Eigen::MatrixXd random_block(Rng& rng, const Lattice& lat, int parent) {
  auto kids = lat.children(parent);
  int m = static_cast<int>(kids.size());
  Eigen::VectorXd w(m);
  for (int k = 0; k < m; ++k) w[k] = lat.measure(kids[k]);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd raw(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) raw(r, c) = gauss(rng);
  // Project the output side onto the weighted zero-mean subspace.
  Eigen::MatrixXd p0 =
      Eigen::MatrixXd::Identity(m, m) - (Eigen::VectorXd::Ones(m) * w.transpose()) / w.sum();
  return p0 * raw;
}

inline nhmart::TransformBlocks random_transform(Rng& rng, const Lattice& lat) {
  nhmart::TransformBlocks t;
  t.lattice = &lat;
  for (int i = 0; i < lat.size(); ++i)
    if (!lat.is_leaf(i)) t.blocks[i] = random_block(rng, lat, i);
  return t;
}

inline nhmart::TransformBlocks random_multiplier(Rng& rng, const Lattice& lat) {
  std::map<int, double> signs;
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < lat.size(); ++i)
    if (!lat.is_leaf(i)) signs[i] = coin(rng) ? 1.0 : -1.0;
  return nhmart::multiplier_transform(lat, signs);
}

}  // namespace testsupport
