#include "nhmart/stopping.hpp"

#include <cmath>
#include <limits>

namespace nhmart {

namespace {

constexpr int kNoRank = std::numeric_limits<int>::min();

// min over the leaves below each node of Mf (membership of I in E_k needs
// Mf > 2^k on all of I).
Eigen::VectorXd min_maximal(const Lattice& lat, const StepFunction& mf) {
  Eigen::VectorXd out(lat.size());
  for (int i = lat.size() - 1; i >= 0; --i) {
    if (lat.is_leaf(i)) {
      out[i] = mf.values[lat.leaf_slot(i)];
    } else {
      double m = std::numeric_limits<double>::infinity();
      for (int c : lat.children(i)) m = std::min(m, out[c]);
      out[i] = m;
    }
  }
  return out;
}

// Largest k with 2^k < m (so I subset E_k exactly for k <= rank).
int rank_of(double m) {
  if (!(m > 0.0)) return kNoRank;
  int e;
  double mant = std::frexp(m, &e);  // m = mant * 2^e, mant in [0.5, 1)
  return mant == 0.5 ? e - 2 : e - 1;
}

void require_nonneg(const StepFunction& f) {
  if (f.values.size() && f.values.minCoeff() < 0.0)
    throw Error(ErrorKind::NegativeInput, "stopping construction needs f >= 0");
}

}  // namespace

std::vector<LevelSet> level_sets(const StepFunction& f, int k_lo, int k_hi) {
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd minm = min_maximal(lat, maximal_function(f));
  std::vector<LevelSet> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    LevelSet ls;
    ls.k = k;
    double threshold = std::ldexp(1.0, k);
    for (int i = 0; i < lat.size(); ++i) {
      if (minm[i] > threshold) {
        ls.nodes.push_back(i);
        int par = lat.parent(i);
        if (par < 0 || !(minm[par] > threshold)) ls.maximal.push_back(i);
      }
    }
    out.push_back(std::move(ls));
  }
  return out;
}

StoppingForest stopping_generations(const StepFunction& f, int k0) {
  require_nonneg(f);
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd minm = min_maximal(lat, maximal_function(f));

  StoppingForest forest;
  forest.k0 = k0;

  auto maximal_below = [&](int top, double threshold, bool strict_subtree,
                           std::vector<int>* out) {
    // Maximal nodes I subset subtree(top) with min Mf > threshold; skip `top`
    // itself when strict_subtree.
    std::vector<int> stack;
    if (strict_subtree) {
      for (int c : lat.children(top)) stack.push_back(c);
    } else {
      stack.push_back(top);
    }
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      if (minm[n] > threshold) {
        out->push_back(n);
      } else {
        for (int c : lat.children(n)) stack.push_back(c);
      }
    }
  };

  std::vector<int> current;
  double t0 = std::ldexp(1.0, k0);
  for (int r : lat.roots()) maximal_below(r, t0, false, &current);
  while (!current.empty()) {
    forest.generations.push_back(current);
    std::vector<int> next;
    for (int j : current) {
      int r = rank_of(minm[j]);
      forest.rank[j] = r;
      if (r == kNoRank) continue;
      maximal_below(j, std::ldexp(1.0, r + 2), true, &next);
    }
    current = std::move(next);
  }
  return forest;
}

std::vector<StoppingViolation> verify_lemma(const StepFunction& f,
                                            const StoppingForest& forest) {
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd avg = node_averages(f);
  Eigen::VectorXd minm = min_maximal(lat, maximal_function(f));
  std::vector<StoppingViolation> out;
  constexpr double kTol = 1e-12;

  int gens = static_cast<int>(forest.generations.size());
  // Union mass of the next generation inside each J, and membership marks.
  for (int g = 0; g < gens; ++g) {
    std::vector<char> in_next(lat.size(), 0);
    if (g + 1 < gens)
      for (int i : forest.generations[g + 1]) in_next[i] = 1;

    for (int j : forest.generations[g]) {
      auto it = forest.rank.find(j);
      int r = it != forest.rank.end() ? it->second : rank_of(minm[j]);
      if (r == kNoRank) {
        out.push_back({g + 1, j, 0, "interval carries no rank"});
        continue;
      }
      double up = std::ldexp(1.0, r + 1);
      double lo = std::ldexp(1.0, r);
      double cap3 = std::ldexp(1.0, r + 2);
      if (avg[j] > up * (1.0 + kTol))
        out.push_back({g + 1, j, 1, "<f>_J exceeds 2^{r+1}"});
      if (avg[j] < lo * (1.0 - kTol))
        out.push_back({g + 1, j, 2, "<f>_J below 2^{r}"});

      // Walk subtree(J): nodes outside G_{k+1} obey the 2^{r+2} bound;
      // next-generation intervals are counted for property (4).
      double next_mass = 0.0;
      std::vector<int> stack{j};
      while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        if (in_next[n]) {
          next_mass += lat.measure(n);
          continue;  // inside G_{k+1}; exempt from (3)
        }
        if (avg[n] > cap3 * (1.0 + kTol))
          out.push_back({g + 1, n, 3, "<f>_I exceeds 2^{r(J)+2} outside G_{k+1}"});
        for (int c : lat.children(n)) stack.push_back(c);
      }
      if (next_mass > 0.5 * lat.measure(j) * (1.0 + kTol))
        out.push_back({g + 1, j, 4, "|J intersect G_{k+1}| > |J|/2"});
    }
  }
  return out;
}

double carleson_mass_ratio(const Lattice& lat, const StoppingForest& forest) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(lat.size());
  for (const auto& gen : forest.generations)
    for (int j : gen) mass[j] += lat.measure(j);
  // Accumulate subtree sums; children carry larger indices.
  Eigen::VectorXd subtree = mass;
  for (int i = lat.size() - 1; i >= 0; --i) {
    int par = lat.parent(i);
    if (par >= 0) subtree[par] += subtree[i];
  }
  double worst = 0.0;
  for (int i = 0; i < lat.size(); ++i)
    worst = std::max(worst, subtree[i] / lat.measure(i));
  return worst;
}

}  // namespace nhmart
