#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>

#include "nhmart/martingale.hpp"

namespace nhmart {

/// Node-indexed scalar sequence {s_I}; absent entries are zero.
struct CoefSequence {
  const Lattice* lattice = nullptr;
  std::map<int, double> entries;

  double at(int node) const {
    auto it = entries.find(node);
    return it == entries.end() ? 0.0 : it->second;
  }
};

/// Remark-style flattening: each difference component contributes its value on
/// child J as the entry x_J; root averages become x_root. Exact zeros are dropped.
CoefSequence flatten(const MartDecomp& d);

/// || (sum_I |s_I|^q 1_I)^{1/q} ||_{L^p}, p, q in [1, inf).
double gpq_norm(const CoefSequence& s, double p, double q);

/// sup_J ( (1/|J|) int_J (sum_{I subset J} |s_I|^q 1_I)^{r/q} )^{1/r}.
/// The inner sum includes I = J itself.
double ginf_norm(const CoefSequence& s, double q, double r);

/// Kernel shared by ginf_norm, bmoq_norm and the testing constants:
/// sup_J ((1/|J|) int_J (accumulated mass)^{r/q})^{1/r}, where a point below J
/// accumulates incl_mass[n] at every node n with x in n subset J and
/// strict_mass[n] at every such n except n = J itself.
double sup_local_aggregate(const Lattice& lat, const Eigen::VectorXd& strict_mass,
                           const Eigen::VectorXd& incl_mass, double q, double r);

CoefSequence coordinate_projection(const CoefSequence& s,
                                   const std::function<bool(int)>& keep);

/// sum_I s_I t_I |I|.
double pairing(const CoefSequence& s, const CoefSequence& t);

/// BMO_q data of a decomposition at parameters (q, r): first the local norm
///   sup_I ( (1/|I|) int_I (sum_{J subset I} |Delta_J f|^q)^{r/q} )^{1/r}
/// taken over all lattice nodes I (the sum runs over difference components
/// J subset I), second sup_I ||Delta_I f||_inf. Callers combine by max.
std::pair<double, double> bmoq_norm(const MartDecomp& d, double q, double r);

/// Linear map from step functions into node-supported scalar families:
/// entry e has a support node and value row_e . f. Several entries may share a
/// support node (nested paraproduct families); the L^p(l^q) norm aggregates
/// all entries containing a point.
struct FamilyOp {
  struct Entry {
    int support;
    Eigen::RowVectorXd row;
  };
  const Lattice* lattice = nullptr;
  std::vector<Entry> entries;

  Eigen::VectorXd apply(const StepFunction& f) const;
  /// L^p(l^q) norm of the applied family.
  double output_norm(const Eigen::VectorXd& values, double p, double q) const;
};

/// (A_alpha f)_I = alpha_I <f>_I as a FamilyOp (one entry per nonzero alpha_I).
FamilyOp carleson_operator(const CoefSequence& alpha);
/// Same map with the result materialized as a sequence.
CoefSequence carleson_apply(const CoefSequence& alpha, const StepFunction& f);

struct EmbedReport {
  double K = 0.0;               // ginf_norm(alpha, q, q), the Carleson constant
  double indicator_lower = 0.0; // max over nodes of ||A 1_I|| / ||1_I||_p
  double lower_bound = 0.0;     // certified by the witness
  double estimate = 0.0;        // best found operator norm
  double ratio = 0.0;           // estimate / K (0 when K = 0)
  StepFunction witness;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Measures the embedding operator A_alpha : L^p -> g_p^q. Exact (spectral) at
/// p = q = 2, seeded multi-restart search otherwise.
EmbedReport embedding_test(const CoefSequence& alpha, double p, double q, int trials,
                           std::uint64_t seed);

}  // namespace nhmart
