#pragma once

#include <Eigen/Dense>
#include <map>

#include "nhmart/sequence.hpp"

namespace nhmart {

/// Dense operator on leaf-value vectors; norms are always taken in the
/// lattice-weighted L^p chosen at evaluation time.
struct LinearOp {
  const Lattice* lattice = nullptr;
  Eigen::MatrixXd mat;

  StepFunction apply(const StepFunction& f) const;
};

enum class OperatorKind {
  mult,        // M_b f = b f
  pi,          // sum_I (Delta_I b)(E_I f)
  pi_star,     // sum_I E_I((Delta_I b)(Delta_I f))
  pi_extstar,  // sum_I (Delta_I b)(Delta_I f)
  lambda,      // sum_I Delta_I(b Delta_I f)
  lambda0,     // sum_I (E_I b)(Delta_I f)
  lambda1,     // sum_I Delta_I[(Delta_I b)(Delta_I f)]
  remainder,   // sum_roots (E_I b)(E_I f)
};

LinearOp assemble(OperatorKind kind, const StepFunction& b, const Lattice& lat);

/// Per-node blocks acting on the difference spaces D_I, stored in
/// child-indicator coordinates (an m x m matrix for a node with m children).
/// Blocks must map weighted-zero-mean vectors to weighted-zero-mean vectors;
/// absent block = zero.
struct TransformBlocks {
  const Lattice* lattice = nullptr;
  std::map<int, Eigen::MatrixXd> blocks;

  /// Zero-mean preservation check; throws ZeroMeanViolated beyond 1e-10.
  void validate() const;
  bool has_block(int node) const { return blocks.count(node) > 0; }
  /// Weighted adjoint transform (blockwise adjoint on each D_I).
  TransformBlocks adjoint() const;
};

/// Multiplier transform: every block a scalar multiple of the identity.
TransformBlocks multiplier_transform(const Lattice& lat,
                                     const std::map<int, double>& signs);

/// The 8-child swap block: T h^1 = h^2, T h^2 = h^1, T h^3 = h^4, T h^4 = h^3,
/// zero on the orthogonal complement, h^k = 1_{I_{2k}} - 1_{I_{2k-1}}.
Eigen::MatrixXd swap_block(const Lattice& lat, int node);

/// f -> sum_I T_I(Delta_I f); root averages are annihilated.
LinearOp transform_operator(const TransformBlocks& t);

LinearOp commutator(const LinearOp& a, const LinearOp& b);

/// Largest entrywise residual over the three multiplication-operator
/// decomposition identities:
///   M_b - R_b = pi^(*)_b + Lambda^0_b + pi_b
///   M_b - R_b = pi*_b + Lambda_b + pi_b
///   Lambda_b  = Lambda^0_b + Lambda^1_b
double verify_decomposition(const StepFunction& b, const Lattice& lat);

/// K = sup_I ( (1/|I|) int_I (sum_{J subset I} |Delta_J b|^q)^{p/q} )^{1/p}.
double testing_constant(const StepFunction& b, double p, double q);

/// Per-node family: for node I, the constant values of b^I on the children of
/// I (size-1 vector = constant value on a leaf node). Zero mean not required.
using ParaproductFamily = std::map<int, Eigen::VectorXd>;

/// Family version of the testing constant (|b^J| in place of |Delta_J b|).
double testing_constant(const ParaproductFamily& family, const Lattice& lat,
                        double p, double q);

/// f -> { <f>_I b^I }, materialized entrywise for gpq-style codomain norms.
FamilyOp generalized_paraproduct(const ParaproductFamily& family, const Lattice& lat);

/// pi_b as a FamilyOp (codomain H^p_q without root entries): the family
/// b^I = Delta_I b.
FamilyOp paraproduct_family(const StepFunction& b);

}  // namespace nhmart
