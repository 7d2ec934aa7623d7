#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nhmart/step_function.hpp"

namespace nhmart {

/// Martingale difference decomposition: the difference component at each
/// internal node I (its constant values on the children of I, weighted mean
/// zero) plus the plain average on each root.
struct MartDecomp {
  const Lattice* lattice = nullptr;
  /// Indexed by node; empty vector for leaves, size = #children for internal
  /// nodes. diff[I][k] is the value of the I-component on children(I)[k].
  std::vector<Eigen::VectorXd> diff;
  /// Aligned with lattice->roots().
  std::vector<double> root_avg;

  static MartDecomp zero(const Lattice& lat);
  /// Largest zero-mean residual |sum_J v_J |J|| / sum_J |v_J| |J| over components.
  double zero_mean_residual() const;
};

/// <f>_I
double average(const StepFunction& f, int node);
/// Averages at every node (indexed by node).
Eigen::VectorXd node_averages(const StepFunction& f);

/// E_I f = <f>_I 1_I
StepFunction expectation(const StepFunction& f, int node);

/// Delta_I f = (sum_{J in child(I)} E_J - E_I) f. Rejects leaves.
StepFunction difference(const StepFunction& f, int node);

MartDecomp decompose(const StepFunction& f);
StepFunction reconstruct(const MartDecomp& d);

/// The I-difference component as a leaf function (zero outside I).
StepFunction component_function(const MartDecomp& d, int node);

/// Weighted L^p norm; p = infinity means max |f|.
double lp_norm(const StepFunction& f, double p);

/// Pointwise (sum_I |Delta_I f|^2 [+ sum_roots |E_root f|^2])^{1/2}.
StepFunction square_function(const MartDecomp& d, bool extended);

/// Mf(x) = sup over nodes I containing x (including the leaf itself) of |<f>_I|.
StepFunction maximal_function(const StepFunction& f);

/// L^p norm of the pointwise l^q aggregate of the differences (and root
/// averages when extended). p in [1, inf), q in (1, inf).
double hpq_norm(const MartDecomp& d, double p, double q, bool extended);

/// A_1 majorant of f >= 0: ftilde = sum_k gamma^k M^k f with
/// gamma = 1 / (2 B_p), B_p an upper bound on ||M||_{p->p}. Guarantees
/// ftilde >= f, ||ftilde||_p <= 2 ||f||_p and M ftilde <= ftilde / gamma.
StepFunction a1_majorant(const StepFunction& f, double p);

/// The admissible bound B_p used for the majorant's gamma.
double maximal_operator_bound(const Lattice& lat, double p);

}  // namespace nhmart
