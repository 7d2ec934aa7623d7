#pragma once

#include <map>
#include <string>
#include <vector>

#include "nhmart/martingale.hpp"

namespace nhmart {

/// E_k = {x : Mf(x) > 2^k} realized on the lattice: the nodes contained in
/// E_k and the maximal ones among them.
struct LevelSet {
  int k;
  std::vector<int> nodes;    // all I with I subset E_k
  std::vector<int> maximal;  // maximal by inclusion
};

std::vector<LevelSet> level_sets(const StepFunction& f, int k_lo, int k_hi);

/// Stopping generations G*_1, G*_2, ... of the embedding-theorem proof:
/// G*_1 = maximal intervals of E_{k0}; a J in G*_k with rank r spawns the
/// maximal intervals contained in J and in E_{r+2}.
struct StoppingForest {
  int k0 = 0;
  std::vector<std::vector<int>> generations;
  /// rank r(J) = max{k : J subset E_k} for every node appearing in the forest.
  std::map<int, int> rank;
};

StoppingForest stopping_generations(const StepFunction& f, int k0);

struct StoppingViolation {
  int generation;  // 1-based
  int node;
  int property;    // 1..4 per the stopping lemma, 0 = structural
  std::string detail;
};

/// Checks the four stopping-lemma properties for every forest interval:
///   (1) <f>_J <= 2^{r(J)+1}        (2) <f>_J >= 2^{r(J)}
///   (3) <f>_I <= 2^{r(J)+2} for I subset J, I in G_k \ G_{k+1}
///   (4) |J intersect G_{k+1}| <= |J| / 2
std::vector<StoppingViolation> verify_lemma(const StepFunction& f,
                                            const StoppingForest& forest);

/// sum over forest intervals J subset I of |J|, for each node I (Carleson mass).
double carleson_mass_ratio(const Lattice& lat, const StoppingForest& forest);

}  // namespace nhmart
