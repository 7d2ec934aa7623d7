#include "nhmart/experiments.hpp"

#include <cmath>
#include <ostream>

namespace nhmart {

StepFunction averaged_square_aggregate(const MartDecomp& d, double p) {
  const Lattice& lat = *d.lattice;
  StepFunction out = StepFunction::zero(lat);
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    double mean_power = 0.0;
    bool nonzero = false;
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      mean_power += std::pow(std::abs(d.diff[i][k]), p) * lat.measure(kids[k]);
      nonzero = nonzero || d.diff[i][k] != 0.0;
    }
    if (!nonzero) continue;
    mean_power /= lat.measure(i);
    auto [b, e] = lat.leaf_range(i);
    out.values.segment(b, e - b).array() += std::pow(mean_power, 2.0 / p);
  }
  out.values = out.values.cwiseSqrt();
  return out;
}

std::vector<AvgRow> run_avg_experiment(double p, const std::vector<int>& ns) {
  if (!(p >= 1.0) || std::isinf(p))
    throw Error(ErrorKind::BadExponent, "p in [1, inf) required");
  if (std::abs(p - 2.0) < 1e-9)
    throw Error(ErrorKind::BadExponent,
                "p = 2 rejected: both sides of the comparison coincide there");
  std::vector<AvgRow> rows;
  for (int n : ns) {
    AvgCounterexample ce = gen_avg_counterexample(n);
    double lhs = lp_norm(averaged_square_aggregate(ce.decomp, p), p);
    double rhs = lp_norm(square_function(ce.decomp, false), p);
    rows.push_back({n, p, lhs, rhs, lhs / rhs});
  }
  return rows;
}

std::vector<CommutatorRow> run_commutator_experiment(const std::vector<double>& deltas,
                                                     double p, double K) {
  if (!(p > 1.0) || std::isinf(p))
    throw Error(ErrorKind::BadExponent, "p in (1, inf) required");
  std::vector<CommutatorRow> rows;
  for (double delta : deltas) {
    MixingCounterexample ce = gen_mixing_counterexample({delta});
    const Lattice& lat = *ce.lattice;
    LinearOp mb = assemble(OperatorKind::mult, ce.b, lat);
    LinearOp t = transform_operator(ce.transform);
    LinearOp comm = commutator(mb, t);
    double norm = p == 2.0 ? norm_2(comm) : norm_p(comm, p, 16, 991).estimate;

    MartDecomp db = decompose(ce.b);
    double sup_inf = 0.0;
    for (int i = 0; i < lat.size(); ++i)
      if (db.diff[i].size() != 0)
        sup_inf = std::max(sup_inf, db.diff[i].cwiseAbs().maxCoeff());

    double eps_nocap = std::numeric_limits<double>::infinity();
    double eps_cap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < lat.size(); ++i) {
      int parent = lat.parent(i);
      if (parent < 0 || !ce.transform.has_block(parent)) continue;
      MixingCert cert = nondegeneracy_cert(ce.transform, i, p, K);
      eps_nocap = std::min(eps_nocap, cert.epsilon_nocap);
      eps_cap = std::min(eps_cap, cert.epsilon_cap);
    }
    rows.push_back({delta, p, norm, sup_inf, eps_nocap, eps_cap, K});
  }
  return rows;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<AvgRow>& rows) {
  os << "n,p,lhs,rhs,ratio\n";
  for (const auto& r : rows) {
    os << r.n << ",";
    put(os, r.p);
    os << ",";
    put(os, r.lhs);
    os << ",";
    put(os, r.rhs);
    os << ",";
    put(os, r.ratio);
    os << "\n";
  }
}

void write_csv(std::ostream& os, const std::vector<CommutatorRow>& rows) {
  os << "delta,p,commutator_norm,sup_diff_b_inf,eps_nocap,eps_cap,K\n";
  for (const auto& r : rows) {
    put(os, r.delta);
    os << ",";
    put(os, r.p);
    os << ",";
    put(os, r.commutator_norm);
    os << ",";
    put(os, r.sup_diff_b_inf);
    os << ",";
    put(os, r.eps_nocap);
    os << ",";
    put(os, r.eps_cap);
    os << ",";
    put(os, r.K);
    os << "\n";
  }
}

}  // namespace nhmart
