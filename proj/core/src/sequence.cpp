#include "nhmart/sequence.hpp"

#include <cmath>

#include "nhmart/operator_norm.hpp"

namespace nhmart {

namespace {

void require_same(const Lattice* a, const Lattice* b) {
  if (a == nullptr || b == nullptr || a != b)
    throw Error(ErrorKind::LatticeMismatch, "operands live on different lattices");
}

void require_range(double v, double lo, const char* name) {
  if (!(v >= lo) || std::isnan(v) || std::isinf(v))
    throw Error(ErrorKind::BadExponent, std::string(name) + " = " + std::to_string(v));
}

}  // namespace

// One kernel backs ginf_norm, the BMO local norm and the testing constants,
// which differ only in where masses sit.
double sup_local_aggregate(const Lattice& lat, const Eigen::VectorXd& strict_mass,
                           const Eigen::VectorXd& incl_mass, double q, double r) {
  Eigen::VectorXd path = Eigen::VectorXd::Zero(lat.leaf_count());
  double best = 0.0;
  // path[leaf] caches the accumulated mass from the current test node J down.
  // DFS from every J; subtree ranges are contiguous so segments suffice.
  std::vector<int> stack;
  for (int J = 0; J < lat.size(); ++J) {
    auto [jb, je] = lat.leaf_range(J);
    path.segment(jb, je - jb).setConstant(incl_mass[J]);
    stack.push_back(J);
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      for (int c : lat.children(n)) {
        auto [b, e] = lat.leaf_range(c);
        path.segment(b, e - b).array() += strict_mass[c] + incl_mass[c];
        stack.push_back(c);
      }
    }
    double integral = 0.0;
    for (int s = jb; s < je; ++s)
      integral += std::pow(path[s], r / q) * lat.leaf_measure(s);
    best = std::max(best, std::pow(integral / lat.measure(J), 1.0 / r));
  }
  return best;
}

CoefSequence flatten(const MartDecomp& d) {
  const Lattice& lat = *d.lattice;
  CoefSequence s;
  s.lattice = &lat;
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      if (d.diff[i][k] != 0.0) s.entries[kids[k]] = d.diff[i][k];
  }
  auto roots = lat.roots();
  for (int r = 0; r < static_cast<int>(roots.size()); ++r)
    if (d.root_avg[r] != 0.0) s.entries[roots[r]] = d.root_avg[r];
  return s;
}

double gpq_norm(const CoefSequence& s, double p, double q) {
  require_range(p, 1.0, "p");
  require_range(q, 1.0, "q");
  const Lattice& lat = *s.lattice;
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(lat.leaf_count());
  for (auto [node, value] : s.entries) {
    auto [b, e] = lat.leaf_range(node);
    agg.segment(b, e - b).array() += std::pow(std::abs(value), q);
  }
  double sum = 0.0;
  for (int j = 0; j < lat.leaf_count(); ++j)
    sum += std::pow(agg[j], p / q) * lat.leaf_measure(j);
  return std::pow(sum, 1.0 / p);
}

double ginf_norm(const CoefSequence& s, double q, double r) {
  require_range(q, 1.0, "q");
  require_range(r, 1.0, "r");
  const Lattice& lat = *s.lattice;
  Eigen::VectorXd incl = Eigen::VectorXd::Zero(lat.size());
  for (auto [node, value] : s.entries) incl[node] = std::pow(std::abs(value), q);
  return sup_local_aggregate(lat, Eigen::VectorXd::Zero(lat.size()), incl, q, r);
}

CoefSequence coordinate_projection(const CoefSequence& s,
                                   const std::function<bool(int)>& keep) {
  CoefSequence out;
  out.lattice = s.lattice;
  for (auto [node, value] : s.entries)
    if (keep(node)) out.entries[node] = value;
  return out;
}

double pairing(const CoefSequence& s, const CoefSequence& t) {
  require_same(s.lattice, t.lattice);
  const Lattice& lat = *s.lattice;
  double sum = 0.0;
  for (auto [node, value] : s.entries) {
    auto it = t.entries.find(node);
    if (it != t.entries.end()) sum += value * it->second * lat.measure(node);
  }
  return sum;
}

std::pair<double, double> bmoq_norm(const MartDecomp& d, double q, double r) {
  require_range(q, 1.0, "q");
  require_range(r, 1.0, "r");
  const Lattice& lat = *d.lattice;
  // A difference component at I deposits |its value on child C|^q at C, so
  // "sum over Delta_J with J subset I" = strict masses below I.
  Eigen::VectorXd strict = Eigen::VectorXd::Zero(lat.size());
  double sup_inf = 0.0;
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      strict[kids[k]] += std::pow(std::abs(d.diff[i][k]), q);
      sup_inf = std::max(sup_inf, std::abs(d.diff[i][k]));
    }
  }
  double local = sup_local_aggregate(lat, strict, Eigen::VectorXd::Zero(lat.size()), q, r);
  return {local, sup_inf};
}

Eigen::VectorXd FamilyOp::apply(const StepFunction& f) const {
  require_same(lattice, f.lattice);
  Eigen::VectorXd out(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) out[i] = entries[i].row.dot(f.values);
  return out;
}

double FamilyOp::output_norm(const Eigen::VectorXd& values, double p, double q) const {
  const Lattice& lat = *lattice;
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(lat.leaf_count());
  for (size_t i = 0; i < entries.size(); ++i) {
    auto [b, e] = lat.leaf_range(entries[i].support);
    agg.segment(b, e - b).array() += std::pow(std::abs(values[i]), q);
  }
  double sum = 0.0;
  for (int j = 0; j < lat.leaf_count(); ++j)
    sum += std::pow(agg[j], p / q) * lat.leaf_measure(j);
  return std::pow(sum, 1.0 / p);
}

namespace {

Eigen::RowVectorXd averaging_row(const Lattice& lat, int node) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(lat.leaf_count());
  auto [b, e] = lat.leaf_range(node);
  for (int j = b; j < e; ++j) row[j] = lat.leaf_measure(j) / lat.measure(node);
  return row;
}

}  // namespace

FamilyOp carleson_operator(const CoefSequence& alpha) {
  const Lattice& lat = *alpha.lattice;
  FamilyOp op;
  op.lattice = &lat;
  for (auto [node, value] : alpha.entries) {
    if (value == 0.0) continue;
    op.entries.push_back({node, value * averaging_row(lat, node)});
  }
  return op;
}

CoefSequence carleson_apply(const CoefSequence& alpha, const StepFunction& f) {
  require_same(alpha.lattice, f.lattice);
  CoefSequence out;
  out.lattice = alpha.lattice;
  for (auto [node, value] : alpha.entries) {
    double v = value * average(f, node);
    if (v != 0.0) out.entries[node] = v;
  }
  return out;
}

EmbedReport embedding_test(const CoefSequence& alpha, double p, double q, int trials,
                           std::uint64_t seed) {
  require_range(p, 1.0, "p");
  require_range(q, 1.0, "q");
  EmbedReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.K = ginf_norm(alpha, q, q);
  FamilyOp op = carleson_operator(alpha);
  rep.indicator_lower = family_indicator_lower(op, p, q);
  if (p == 2.0 && q == 2.0) {
    rep.estimate = family_norm_2(op);
    rep.lower_bound = std::max(rep.indicator_lower, rep.estimate);
    rep.witness = StepFunction::zero(*alpha.lattice);
  } else {
    NormReport nr = family_norm_p(op, p, q, trials, seed);
    rep.estimate = std::max(nr.estimate, rep.indicator_lower);
    rep.lower_bound = std::max(nr.lower_bound, rep.indicator_lower);
    rep.witness = nr.witness;
  }
  rep.ratio = rep.K > 0.0 ? rep.estimate / rep.K : 0.0;
  return rep;
}

}  // namespace nhmart
