#pragma once

#include <optional>

#include "nhmart/operator_norm.hpp"

namespace nhmart {

/// Non-degeneracy certificate of an interval I (with parent I') for a
/// transform block: the best test function h in D_{I'} with h = 0 on I,
/// ||h||_p = 1, maximizing the mass |1_I T_{I'} h| |I|^{1/p}; the capped
/// variant adds ||h||_inf <= K |I'|^{-1/p} whenever |I| < |I'| / K.
struct MixingCert {
  int node = -1;
  int parent = -1;
  double epsilon_nocap = 0.0;
  double epsilon_cap = 0.0;
  bool cap_applies = false;  // |I| < |I'| / K
  bool feasible = true;      // capped constraint set contains a unit vector
  StepFunction witness_nocap;
  StepFunction witness_cap;
};

MixingCert nondegeneracy_cert(const TransformBlocks& t, int node, double p,
                              std::optional<double> K);

struct IntervalVerdict {
  int node = -1;
  double eps_forward = 0.0;   // cert for T at exponent p
  double eps_adjoint = 0.0;   // cert for T* at exponent p'
  bool forward_pass = false;
  bool adjoint_pass = false;
};

struct Classification {
  bool strong = false;  // every interval non-degenerate for T
  bool weak = false;    // every interval non-degenerate for T at p or T* at p'
  std::vector<IntervalVerdict> verdicts;
  std::vector<int> failing_strong;
  std::vector<int> failing_weak;
};

/// Classifies T per the mixing definition at (p, eps, K): verdicts for every
/// interval with a parent.
Classification classify(const TransformBlocks& t, double p, double eps, double K);

}  // namespace nhmart
