#include "nhmart/martingale.hpp"

#include <algorithm>
#include <cmath>

namespace nhmart {

namespace {

void require_p(double p, double lo) {
  if (!(p >= lo) || std::isnan(p))
    throw Error(ErrorKind::BadExponent, "p = " + std::to_string(p));
}

}  // namespace

StepFunction StepFunction::indicator(const Lattice& lat, int node) {
  StepFunction f = StepFunction::zero(lat);
  auto [b, e] = lat.leaf_range(node);
  f.values.segment(b, e - b).setOnes();
  return f;
}

MartDecomp MartDecomp::zero(const Lattice& lat) {
  MartDecomp d;
  d.lattice = &lat;
  d.diff.resize(lat.size());
  for (int i = 0; i < lat.size(); ++i)
    if (!lat.is_leaf(i)) d.diff[i] = Eigen::VectorXd::Zero(lat.children(i).size());
  d.root_avg.assign(lat.roots().size(), 0.0);
  return d;
}

double MartDecomp::zero_mean_residual() const {
  double worst = 0.0;
  for (int i = 0; i < lattice->size(); ++i) {
    if (diff[i].size() == 0) continue;
    auto kids = lattice->children(i);
    double dot = 0.0, mass = 0.0;
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      dot += diff[i][k] * lattice->measure(kids[k]);
      mass += std::abs(diff[i][k]) * lattice->measure(kids[k]);
    }
    if (mass > 0.0) worst = std::max(worst, std::abs(dot) / mass);
  }
  return worst;
}

Eigen::VectorXd node_averages(const StepFunction& f) {
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd avg(lat.size());
  // Children carry larger indices, so a reverse sweep sees them first.
  for (int i = lat.size() - 1; i >= 0; --i) {
    if (lat.is_leaf(i)) {
      avg[i] = f.values[lat.leaf_slot(i)];
    } else {
      double s = 0.0;
      for (int c : lat.children(i)) s += avg[c] * lat.measure(c);
      avg[i] = s / lat.measure(i);
    }
  }
  return avg;
}

double average(const StepFunction& f, int node) {
  const Lattice& lat = *f.lattice;
  auto [b, e] = lat.leaf_range(node);
  double s = 0.0;
  for (int j = b; j < e; ++j) s += f.values[j] * lat.leaf_measure(j);
  return s / lat.measure(node);
}

StepFunction expectation(const StepFunction& f, int node) {
  const Lattice& lat = *f.lattice;
  StepFunction out = StepFunction::zero(lat);
  auto [b, e] = lat.leaf_range(node);
  out.values.segment(b, e - b).setConstant(average(f, node));
  return out;
}

StepFunction difference(const StepFunction& f, int node) {
  const Lattice& lat = *f.lattice;
  if (lat.is_leaf(node)) throw Error(ErrorKind::LeafNode, "difference at a leaf");
  StepFunction out = StepFunction::zero(lat);
  double a = average(f, node);
  for (int c : lat.children(node)) {
    auto [b, e] = lat.leaf_range(c);
    out.values.segment(b, e - b).setConstant(average(f, c) - a);
  }
  return out;
}

MartDecomp decompose(const StepFunction& f) {
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd avg = node_averages(f);
  MartDecomp d = MartDecomp::zero(lat);
  for (int i = 0; i < lat.size(); ++i) {
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      d.diff[i][k] = avg[kids[k]] - avg[i];
  }
  auto roots = lat.roots();
  for (int r = 0; r < static_cast<int>(roots.size()); ++r) d.root_avg[r] = avg[roots[r]];
  return d;
}

StepFunction reconstruct(const MartDecomp& d) {
  const Lattice& lat = *d.lattice;
  if (d.zero_mean_residual() > 1e-10)
    throw Error(ErrorKind::ZeroMeanViolated,
                "difference component mean residual " + std::to_string(d.zero_mean_residual()));
  // Push partial sums down the tree: value at node = parent's value + its
  // difference component there.
  Eigen::VectorXd acc(lat.size());
  auto roots = lat.roots();
  for (int r = 0; r < static_cast<int>(roots.size()); ++r) acc[roots[r]] = d.root_avg[r];
  for (int i = 0; i < lat.size(); ++i) {
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      double delta = d.diff[i].size() ? d.diff[i][k] : 0.0;
      acc[kids[k]] = acc[i] + delta;
    }
  }
  StepFunction f = StepFunction::zero(lat);
  auto leaves = lat.leaves();
  for (int s = 0; s < lat.leaf_count(); ++s) f.values[s] = acc[leaves[s]];
  return f;
}

StepFunction component_function(const MartDecomp& d, int node) {
  const Lattice& lat = *d.lattice;
  StepFunction out = StepFunction::zero(lat);
  if (d.diff[node].size() == 0) return out;
  auto kids = lat.children(node);
  for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
    auto [b, e] = lat.leaf_range(kids[k]);
    out.values.segment(b, e - b).setConstant(d.diff[node][k]);
  }
  return out;
}

double lp_norm(const StepFunction& f, double p) {
  require_p(p, 1.0);
  if (std::isinf(p)) return f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  const Lattice& lat = *f.lattice;
  double s = 0.0;
  for (int j = 0; j < lat.leaf_count(); ++j)
    s += std::pow(std::abs(f.values[j]), p) * lat.leaf_measure(j);
  return std::pow(s, 1.0 / p);
}

StepFunction square_function(const MartDecomp& d, bool extended) {
  const Lattice& lat = *d.lattice;
  StepFunction out = StepFunction::zero(lat);
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      auto [b, e] = lat.leaf_range(kids[k]);
      double v = d.diff[i][k];
      out.values.segment(b, e - b).array() += v * v;
    }
  }
  if (extended) {
    auto roots = lat.roots();
    for (int r = 0; r < static_cast<int>(roots.size()); ++r) {
      auto [b, e] = lat.leaf_range(roots[r]);
      out.values.segment(b, e - b).array() += d.root_avg[r] * d.root_avg[r];
    }
  }
  out.values = out.values.cwiseSqrt();
  return out;
}

StepFunction maximal_function(const StepFunction& f) {
  const Lattice& lat = *f.lattice;
  Eigen::VectorXd avg = node_averages(f);
  Eigen::VectorXd best(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    double here = std::abs(avg[i]);
    int par = lat.parent(i);
    best[i] = par < 0 ? here : std::max(here, best[par]);
  }
  StepFunction out = StepFunction::zero(lat);
  auto leaves = lat.leaves();
  for (int s = 0; s < lat.leaf_count(); ++s) out.values[s] = best[leaves[s]];
  return out;
}

double hpq_norm(const MartDecomp& d, double p, double q, bool extended) {
  require_p(p, 1.0);
  if (std::isinf(p)) throw Error(ErrorKind::BadExponent, "p must be finite");
  if (!(q >= 1.0) || std::isinf(q)) throw Error(ErrorKind::BadExponent, "q = " + std::to_string(q));
  const Lattice& lat = *d.lattice;
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(lat.leaf_count());
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
      auto [b, e] = lat.leaf_range(kids[k]);
      agg.segment(b, e - b).array() += std::pow(std::abs(d.diff[i][k]), q);
    }
  }
  if (extended) {
    auto roots = lat.roots();
    for (int r = 0; r < static_cast<int>(roots.size()); ++r) {
      auto [b, e] = lat.leaf_range(roots[r]);
      agg.segment(b, e - b).array() += std::pow(std::abs(d.root_avg[r]), q);
    }
  }
  double s = 0.0;
  for (int j = 0; j < lat.leaf_count(); ++j)
    s += std::pow(agg[j], p / q) * lat.leaf_measure(j);
  return std::pow(s, 1.0 / p);
}

double maximal_operator_bound(const Lattice& lat, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorKind::BadExponent, "p in (1, inf) required");
  // Doob: ||Mf||_p <= p' ||f||_p; on a finite lattice also
  // ||Mf||_p <= (depth+1)^{1/p} ||f||_p by crude stacking of the levels.
  double doob = p / (p - 1.0);
  double stack = std::pow(lat.max_depth() + 1.0, 1.0 / p);
  return std::min(doob, stack);
}

StepFunction a1_majorant(const StepFunction& f, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorKind::BadExponent, "p in (1, inf) required");
  if (f.values.size() && f.values.minCoeff() < 0.0)
    throw Error(ErrorKind::NegativeInput, "a1_majorant needs f >= 0");
  const Lattice& lat = *f.lattice;
  double gamma = 1.0 / (2.0 * maximal_operator_bound(lat, p));
  StepFunction total = f;
  StepFunction term = f;
  double scale = 1.0;
  for (int k = 0; k < 400; ++k) {
    term = maximal_function(term);
    scale *= gamma;
    Eigen::VectorXd inc = scale * term.values;
    total.values += inc;
    if (inc.size() == 0 || inc.maxCoeff() < 1e-12) break;
  }
  return total;
}

}  // namespace nhmart
