#include "nhmart/mixing.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace nhmart {

namespace {

double pnorm(const Eigen::VectorXd& y, double p) {
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]), p);
  return std::pow(s, 1.0 / p);
}

// The certificate problem in scaled coordinates y_k = c_k w_k^{1/p}:
// maximize obj . y subject to y_t = 0, a . y = 0 (zero weighted mean),
// ||y||_p <= 1 and optionally |y_k| <= box_k.
struct CertProblem {
  Eigen::VectorXd obj;   // objective
  Eigen::VectorXd a;     // mean constraint (positive entries)
  int t;                 // pinned coordinate
  double p;
  Eigen::VectorXd box;   // empty when uncapped
  bool capped() const { return box.size() > 0; }

  // Euclidean projection onto the affine constraints {y_t = 0, a.y = 0}.
  Eigen::VectorXd project_subspace(Eigen::VectorXd y) const {
    y[t] = 0.0;
    Eigen::VectorXd ahat = a;
    ahat[t] = 0.0;
    double n = ahat.norm();
    if (n > 0.0) {
      ahat /= n;
      y -= y.dot(ahat) * ahat;
      y[t] = 0.0;
    }
    return y;
  }

  double feasibility_excess(const Eigen::VectorXd& y) const {
    double n = pnorm(y, p);
    if (capped())
      for (int i = 0; i < y.size(); ++i)
        if (box[i] > 0.0) n = std::max(n, std::abs(y[i]) / box[i]);
    return n;
  }
};

// Exact solution for p = 2 without a cap: norm of the projected objective.
Eigen::VectorXd closed_form_l2(const CertProblem& prob) {
  Eigen::VectorXd g = prob.project_subspace(prob.obj);
  double n = g.norm();
  return n > 0.0 ? Eigen::VectorXd(g / n) : Eigen::VectorXd::Zero(prob.obj.size());
}

// Dykstra's alternating projections onto subspace, l^2 ball and box
// (all convex, projections exact), then projected ascent. Used for the
// capped p = 2 problem, where it converges to the global optimum.
Eigen::VectorXd projected_ascent_l2(const CertProblem& prob) {
  int m = static_cast<int>(prob.obj.size());
  auto dykstra = [&](Eigen::VectorXd y) {
    Eigen::VectorXd inc1 = Eigen::VectorXd::Zero(m), inc2 = Eigen::VectorXd::Zero(m),
                    inc3 = Eigen::VectorXd::Zero(m);
    for (int sweep = 0; sweep < 80; ++sweep) {
      Eigen::VectorXd z = prob.project_subspace(y + inc1);
      inc1 = y + inc1 - z;
      y = z;
      z = y + inc2;
      double n = z.norm();
      if (n > 1.0) z /= n;
      inc2 = y + inc2 - z;
      y = z;
      if (prob.capped()) {
        z = (y + inc3).cwiseMin(prob.box).cwiseMax(-prob.box);
        inc3 = y + inc3 - z;
        y = z;
      }
    }
    return y;
  };
  Eigen::VectorXd y = dykstra(closed_form_l2(prob));
  double step = 0.5 / std::max(prob.obj.norm(), 1e-30);
  double best = prob.obj.dot(y);
  Eigen::VectorXd besty = y;
  for (int it = 0; it < 1500; ++it) {
    y = dykstra(y + step * prob.obj);
    double v = prob.obj.dot(y);
    if (v > best) {
      best = v;
      besty = y;
    }
  }
  return besty;
}

// Normalized-ratio ascent for general p (and box): maximize obj.y / N(y)
// over the subspace, N the max of the p-norm and the box gauge.
Eigen::VectorXd ratio_ascent(const CertProblem& prob, std::uint64_t seed,
                             const std::vector<Eigen::VectorXd>& extra_starts = {}) {
  int m = static_cast<int>(prob.obj.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Eigen::VectorXd> starts = extra_starts;
  starts.push_back(prob.project_subspace(prob.obj));
  {
    CertProblem l2 = prob;
    l2.p = 2.0;
    starts.push_back(prob.capped() ? projected_ascent_l2(l2) : closed_form_l2(l2));
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[i] = 1.0;
    starts.push_back(prob.project_subspace(e));
  }
  for (int s = 0; s < 16; ++s) {
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = gauss(rng);
    starts.push_back(prob.project_subspace(y));
  }

  double best = 0.0;
  Eigen::VectorXd besty = Eigen::VectorXd::Zero(m);
  for (Eigen::VectorXd y : starts) {
    double ex = prob.feasibility_excess(y);
    if (ex == 0.0) continue;
    y /= ex;
    double val = prob.obj.dot(y);
    double step = 0.25;
    for (int it = 0; it < 600; ++it) {
      Eigen::VectorXd cand = prob.project_subspace(y + step * prob.obj / std::max(prob.obj.norm(), 1e-30));
      double cex = prob.feasibility_excess(cand);
      if (cex > 0.0) {
        cand /= cex;
        double cval = prob.obj.dot(cand);
        if (cval > val) {
          y = cand;
          val = cval;
          continue;
        }
      }
      step *= 0.7;
      if (step < 1e-12) break;
    }
    if (val > best) {
      best = val;
      besty = y;
    }
  }
  return besty;
}

// Pads the witness toward ||y||_p = 1 along objective-neutral feasible
// directions so the certificate meets the definition's unit normalization.
Eigen::VectorXd pad_to_unit(const CertProblem& prob, Eigen::VectorXd y) {
  int m = static_cast<int>(prob.obj.size());
  if (pnorm(y, prob.p) >= 1.0 - 1e-12) return y;
  Eigen::MatrixXd constraints(3, m);
  constraints.setZero();
  constraints(0, prob.t) = 1.0;
  constraints.row(1) = prob.a.transpose();
  constraints.row(2) = prob.obj.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraints);
  lu.setThreshold(1e-12);
  Eigen::MatrixXd null = lu.kernel();
  for (int col = 0; col < null.cols(); ++col) {
    Eigen::VectorXd d = null.col(col);
    if (d.norm() == 0.0) continue;
    d.normalize();
    // largest s with the box respected
    double smax = std::numeric_limits<double>::infinity();
    if (prob.capped()) {
      for (int i = 0; i < m; ++i) {
        if (std::abs(d[i]) < 1e-15) continue;
        double room_pos = (prob.box[i] - y[i]) / d[i];
        double room_neg = (-prob.box[i] - y[i]) / d[i];
        smax = std::min(smax, std::max(room_pos, room_neg));
      }
    } else {
      smax = 1e6;
    }
    if (!(smax > 0.0)) continue;
    // bisection on ||y + s d||_p = 1
    double lo = 0.0, hi = smax;
    if (pnorm(y + hi * d, prob.p) < 1.0) {
      y += hi * d;
      continue;  // box filled before the norm; try another direction
    }
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (pnorm(y + mid * d, prob.p) < 1.0 ? lo : hi) = mid;
    }
    return y + hi * d;
  }
  return y;
}

}  // namespace

MixingCert nondegeneracy_cert(const TransformBlocks& t, int node, double p,
                              std::optional<double> K) {
  if (!(p > 1.0) || std::isinf(p))
    throw Error(ErrorKind::BadExponent, "p in (1, inf) required");
  const Lattice& lat = *t.lattice;
  int parent = lat.parent(node);
  if (parent < 0) throw Error(ErrorKind::NoParent, "node " + std::to_string(node));
  auto it = t.blocks.find(parent);
  if (it == t.blocks.end())
    throw Error(ErrorKind::NoBlock, "no block at parent " + std::to_string(parent));
  const Eigen::MatrixXd& block = it->second;

  auto kids = lat.children(parent);
  int m = static_cast<int>(kids.size());
  int slot = -1;
  Eigen::VectorXd w(m);
  for (int k = 0; k < m; ++k) {
    w[k] = lat.measure(kids[k]);
    if (kids[k] == node) slot = k;
  }
  if (slot < 0) throw Error(ErrorKind::UnknownNode, "node is not a child of its parent?");

  CertProblem prob;
  prob.t = slot;
  prob.p = p;
  prob.a = Eigen::VectorXd(m);
  prob.obj = Eigen::VectorXd(m);
  for (int k = 0; k < m; ++k) {
    prob.a[k] = std::pow(w[k], 1.0 - 1.0 / p);
    prob.obj[k] = block(slot, k) * std::pow(w[k], -1.0 / p);
  }

  MixingCert cert;
  cert.node = node;
  cert.parent = parent;

  auto finish = [&](const CertProblem& pr, Eigen::VectorXd y) {
    y = pad_to_unit(pr, std::move(y));
    double value = std::abs(pr.obj.dot(y));
    // Scale down if rounding pushed the norm above 1 (keeps the box valid).
    double n = pr.feasibility_excess(y);
    if (n > 1.0) {
      y /= n;
      value = std::abs(pr.obj.dot(y));
    }
    StepFunction h = StepFunction::zero(lat);
    for (int k = 0; k < m; ++k) {
      auto [b, e] = lat.leaf_range(kids[k]);
      h.values.segment(b, e - b).setConstant(y[k] * std::pow(w[k], -1.0 / p));
    }
    return std::pair<double, StepFunction>(std::pow(lat.measure(node), 1.0 / p) * value,
                                           std::move(h));
  };

  Eigen::VectorXd y_nocap =
      (p == 2.0) ? closed_form_l2(prob) : ratio_ascent(prob, 20240801ULL);
  {
    auto [eps, h] = finish(prob, y_nocap);
    cert.epsilon_nocap = eps;
    cert.witness_nocap = std::move(h);
  }

  if (K) {
    cert.cap_applies = lat.measure(node) < lat.measure(parent) / *K;
    if (!cert.cap_applies) {
      cert.epsilon_cap = cert.epsilon_nocap;
      cert.witness_cap = cert.witness_nocap;
    } else {
      CertProblem capped = prob;
      double bound = *K * std::pow(lat.measure(parent), -1.0 / p);
      capped.box = Eigen::VectorXd(m);
      for (int k = 0; k < m; ++k) capped.box[k] = bound * std::pow(w[k], 1.0 / p);
      Eigen::VectorXd y = (p == 2.0) ? projected_ascent_l2(capped)
                                     : ratio_ascent(capped, 20240802ULL, {y_nocap});
      auto [eps, h] = finish(capped, y);
      cert.epsilon_cap = eps;
      cert.witness_cap = std::move(h);
      cert.feasible = pnorm(y, p) >= 1.0 - 1e-9 || eps == 0.0;
      // A capped witness is feasible without the cap, so it also certifies
      // the uncapped bound; keep the better of the two there.
      if (cert.epsilon_cap > cert.epsilon_nocap) {
        cert.epsilon_nocap = cert.epsilon_cap;
        cert.witness_nocap = cert.witness_cap;
      }
    }
  } else {
    cert.epsilon_cap = cert.epsilon_nocap;
    cert.witness_cap = cert.witness_nocap;
  }
  return cert;
}

Classification classify(const TransformBlocks& t, double p, double eps, double K) {
  const Lattice& lat = *t.lattice;
  TransformBlocks adj = t.adjoint();
  double pprime = p / (p - 1.0);
  Classification result;
  result.strong = true;
  result.weak = true;
  for (int i = 0; i < lat.size(); ++i) {
    int parent = lat.parent(i);
    if (parent < 0) continue;
    IntervalVerdict v;
    v.node = i;
    if (t.has_block(parent)) {
      MixingCert c = nondegeneracy_cert(t, i, p, K);
      v.eps_forward = c.epsilon_cap;
    }
    if (adj.has_block(parent)) {
      MixingCert c = nondegeneracy_cert(adj, i, pprime, K);
      v.eps_adjoint = c.epsilon_cap;
    }
    v.forward_pass = v.eps_forward >= eps - 1e-12;
    v.adjoint_pass = v.eps_adjoint >= eps - 1e-12;
    if (!v.forward_pass) {
      result.strong = false;
      result.failing_strong.push_back(i);
    }
    if (!v.forward_pass && !v.adjoint_pass) {
      result.weak = false;
      result.failing_weak.push_back(i);
    }
    result.verdicts.push_back(std::move(v));
  }
  return result;
}

}  // namespace nhmart
