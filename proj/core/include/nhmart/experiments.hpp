#pragma once

#include <iosfwd>

#include "nhmart/counterexamples.hpp"
#include "nhmart/mixing.hpp"

namespace nhmart {

/// One row of the averaging experiment: both sides of the averaged-square vs
/// square-function comparison, by direct evaluation on the chain lattice.
struct AvgRow {
  int n;
  double p;
  double lhs;   // || (sum (E_I |Delta_I f|^p)^{2/p})^{1/2} ||_p
  double rhs;   // || (sum |Delta_I f|^2)^{1/2} ||_p
  double ratio; // lhs / rhs
};

/// p = 2 is rejected (both sides coincide identically there).
std::vector<AvgRow> run_avg_experiment(double p, const std::vector<int>& ns);

/// (sum_I (E_I |Delta_I f|^p)^{2/p})^{1/2} as a leaf function (the averaged
/// aggregate compared against the square function).
StepFunction averaged_square_aggregate(const MartDecomp& d, double p);

struct CommutatorRow {
  double delta;
  double p;
  double commutator_norm;   // exact at p = 2, estimate otherwise
  double sup_diff_b_inf;    // sup_I ||Delta_I b||_inf = delta^{-1/2}
  double eps_nocap;         // min over the block's intervals
  double eps_cap;           // capped at K
  double K;
};

std::vector<CommutatorRow> run_commutator_experiment(const std::vector<double>& deltas,
                                                     double p, double K = 10.0);

void write_csv(std::ostream& os, const std::vector<AvgRow>& rows);
void write_csv(std::ostream& os, const std::vector<CommutatorRow>& rows);

}  // namespace nhmart
