#pragma once

#include <cstdint>

#include "nhmart/paraproduct.hpp"

namespace nhmart {

struct NormReport {
  double lower_bound = 0.0;  // reproduced by evaluating the witness
  double estimate = 0.0;     // best value found; >= lower_bound
  StepFunction witness;
  int restarts_used = 0;
  std::uint64_t seed = 0;
};

/// Weighted spectral norm: largest singular value of D^{1/2} A D^{-1/2},
/// D = diag(leaf measures). Iterated power method, Rayleigh tolerance 1e-12.
double norm_2(const LinearOp& a);

/// Induced weighted L^p -> L^p norm estimate by dual-sign power iteration with
/// seeded restarts; indicator functions and the p = 2 maximizer are warm
/// starts. p in (1, inf).
NormReport norm_p(const LinearOp& a, double p, int restarts, std::uint64_t seed);

/// max over nodes I of ||A 1_I||_p / ||1_I||_p.
double indicator_lower(const LinearOp& a, double p);

/// Exact L^2 -> l^2-family norm of a FamilyOp (largest singular value of the
/// weighted Gram form).
double family_norm_2(const FamilyOp& a);

/// L^p -> L^p(l^q) norm estimate of a FamilyOp; same restart scheme.
NormReport family_norm_p(const FamilyOp& a, double p, double q, int restarts,
                         std::uint64_t seed);

/// max over nodes I of ||A 1_I||_{L^p(l^q)} / ||1_I||_p.
double family_indicator_lower(const FamilyOp& a, double p, double q);

}  // namespace nhmart
