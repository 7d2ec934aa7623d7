#include "nhmart/operator_norm.hpp"

#include <cmath>
#include <random>

namespace nhmart {

namespace {

void require_p_open(double p) {
  if (!(p > 1.0) || std::isinf(p) || std::isnan(p))
    throw Error(ErrorKind::BadExponent, "p in (1, inf) required, got " + std::to_string(p));
}

double weighted_lp(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double p) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p) * w[i];
  return std::pow(s, 1.0 / p);
}

// psi_p(y) = |y|^{p-1} sign(y), entrywise.
Eigen::VectorXd sign_map(const Eigen::VectorXd& y, double p) {
  Eigen::VectorXd z(y.size());
  for (int i = 0; i < y.size(); ++i) {
    double a = std::abs(y[i]);
    z[i] = a == 0.0 ? 0.0 : std::pow(a, p - 1.0) * (y[i] > 0 ? 1.0 : -1.0);
  }
  return z;
}

Eigen::VectorXd leaf_weights(const Lattice& lat) {
  Eigen::VectorXd w(lat.leaf_count());
  for (int j = 0; j < lat.leaf_count(); ++j) w[j] = lat.leaf_measure(j);
  return w;
}

// Power iteration for the largest eigenvalue of the PSD matrix C (symmetric
// up to rounding). Rayleigh-quotient convergence below tol.
double power_largest(const Eigen::MatrixXd& c, std::uint64_t seed, double tol) {
  int n = static_cast<int>(c.rows());
  if (n == 0) return 0.0;
  double best = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::VectorXd v(n);
    if (attempt == 0) {
      v.setOnes();
    } else if (attempt == 1) {
      for (int i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
    } else {
      std::mt19937_64 rng(seed + 17);
      std::normal_distribution<double> gauss;
      for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    }
    if (v.norm() == 0.0) continue;
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
      Eigen::VectorXd cv = c * v;
      double next = v.dot(cv);
      double nn = cv.norm();
      if (nn == 0.0) { lambda = 0.0; break; }
      v = cv / nn;
      if (it > 2 && std::abs(next - lambda) <= tol * std::max(std::abs(next), 1.0)) {
        lambda = next;
        break;
      }
      lambda = next;
    }
    best = std::max(best, lambda);
  }
  return std::max(best, 0.0);
}

}  // namespace

double norm_2(const LinearOp& a) {
  const Lattice& lat = *a.lattice;
  Eigen::VectorXd w = leaf_weights(lat);
  Eigen::VectorXd s = w.cwiseSqrt();
  Eigen::MatrixXd m = s.asDiagonal() * a.mat * s.cwiseInverse().asDiagonal();
  Eigen::MatrixXd c = m.transpose() * m;
  double lambda = power_largest(c, 1234567, 1e-12);
  return std::sqrt(lambda);
}

namespace {

struct PNormProblem {
  // Evaluate ||A x|| in the codomain norm; fill gradient of ||A x||^p with
  // respect to x (Euclidean gradient divided by p).
  virtual double value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const = 0;
  virtual ~PNormProblem() = default;
};

// L^p -> L^p for a dense LinearOp.
struct PlainP final : PNormProblem {
  const Eigen::MatrixXd* mat;
  Eigen::VectorXd w;
  double p;
  double value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const override {
    Eigen::VectorXd y = (*mat) * x;
    double v = weighted_lp(y, w, p);
    if (grad) *grad = mat->transpose() * (sign_map(y, p).cwiseProduct(w));
    return v;
  }
};

// L^p -> L^p(l^q) for a FamilyOp.
struct FamilyP final : PNormProblem {
  const FamilyOp* op;
  Eigen::VectorXd w;
  double p, q;
  double value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const override {
    const Lattice& lat = *op->lattice;
    int L = lat.leaf_count();
    Eigen::VectorXd t(op->entries.size());
    for (size_t i = 0; i < op->entries.size(); ++i) t[i] = op->entries[i].row.dot(x);
    Eigen::VectorXd aggq = Eigen::VectorXd::Zero(L);
    for (size_t i = 0; i < op->entries.size(); ++i) {
      auto [b, e] = lat.leaf_range(op->entries[i].support);
      aggq.segment(b, e - b).array() += std::pow(std::abs(t[i]), q);
    }
    double sum = 0.0;
    for (int j = 0; j < L; ++j) sum += std::pow(aggq[j], p / q) * w[j];
    double v = std::pow(sum, 1.0 / p);
    if (grad) {
      // d/dt_i of (1/p) sum_l (G_l^q)^{p/q} w_l = |t_i|^{q-1} sgn(t_i)
      //   * sum_{l in supp_i} G_l^{p-q} w_l, with G_l the l^q aggregate.
      grad->setZero(x.size());
      Eigen::VectorXd gl(L);
      for (int j = 0; j < L; ++j)
        gl[j] = aggq[j] == 0.0 ? 0.0 : std::pow(aggq[j], p / q - 1.0) * w[j];
      for (size_t i = 0; i < op->entries.size(); ++i) {
        double ti = t[i];
        if (ti == 0.0) continue;
        auto [b, e] = lat.leaf_range(op->entries[i].support);
        double factor = std::pow(std::abs(ti), q - 1.0) * (ti > 0 ? 1.0 : -1.0) *
                        gl.segment(b, e - b).sum();
        *grad += factor * op->entries[i].row.transpose();
      }
    }
    return v;
  }
};

NormReport run_boyd(const PNormProblem& problem, const Lattice& lat, double p,
                    int restarts, std::uint64_t seed,
                    const std::vector<Eigen::VectorXd>& warm_starts) {
  Eigen::VectorXd w = leaf_weights(lat);
  double pprime = p / (p - 1.0);
  int L = lat.leaf_count();

  std::vector<Eigen::VectorXd> starts = warm_starts;
  for (int i = 0; i < lat.size(); ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(L);
    auto [b, e] = lat.leaf_range(i);
    v.segment(b, e - b).setOnes();
    starts.push_back(v);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < restarts; ++t) {
    Eigen::VectorXd v(L);
    for (int i = 0; i < L; ++i) v[i] = gauss(rng);
    starts.push_back(v);
  }

  NormReport rep;
  rep.seed = seed;
  rep.restarts_used = static_cast<int>(starts.size());
  Eigen::VectorXd best_x;
  double best = -1.0;
  for (Eigen::VectorXd x : starts) {
    double nx = weighted_lp(x, w, p);
    if (nx == 0.0) continue;
    x /= nx;
    double prev = -1.0;
    int stagnant = 0;
    for (int it = 0; it < 400; ++it) {
      Eigen::VectorXd grad;
      double v = problem.value(x, &grad);
      if (v > best) {
        best = v;
        best_x = x;
      }
      if (prev >= 0.0 && std::abs(v - prev) < 1e-10 * std::max(1.0, v)) {
        if (++stagnant >= 5) break;
      } else {
        stagnant = 0;
      }
      prev = v;
      Eigen::VectorXd z = sign_map(grad.cwiseQuotient(w), pprime);
      double nz = weighted_lp(z, w, p);
      if (nz == 0.0) break;
      x = z / nz;
    }
  }
  if (best <= 0.0) {
    best = 0.0;
    best_x = Eigen::VectorXd::Zero(L);  // degenerate operator: zero witness
  }
  rep.estimate = best;
  rep.witness = StepFunction(lat, best_x);
  // Certify: the reported lower bound is the value at the stored witness.
  double nx = weighted_lp(best_x, w, p);
  rep.lower_bound = nx > 0.0 ? problem.value(best_x / nx, nullptr) : 0.0;
  rep.estimate = std::max(rep.estimate, rep.lower_bound);
  return rep;
}

}  // namespace

NormReport norm_p(const LinearOp& a, double p, int restarts, std::uint64_t seed) {
  require_p_open(p);
  PlainP problem;
  problem.mat = &a.mat;
  problem.w = leaf_weights(*a.lattice);
  problem.p = p;
  // The weighted L^2 maximizer is a strong warm start across p.
  const Lattice& lat = *a.lattice;
  Eigen::VectorXd s = problem.w.cwiseSqrt();
  Eigen::MatrixXd m = s.asDiagonal() * a.mat * s.cwiseInverse().asDiagonal();
  Eigen::MatrixXd c = m.transpose() * m;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(lat.leaf_count());
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd cv = c * v;
    if (cv.norm() == 0.0) break;
    v = cv / cv.norm();
  }
  std::vector<Eigen::VectorXd> warm{s.cwiseInverse().asDiagonal() * v};
  return run_boyd(problem, lat, p, restarts, seed, warm);
}

double indicator_lower(const LinearOp& a, double p) {
  const Lattice& lat = *a.lattice;
  Eigen::VectorXd w = leaf_weights(lat);
  double best = 0.0;
  for (int i = 0; i < lat.size(); ++i) {
    StepFunction ind = StepFunction::indicator(lat, i);
    double denom = std::isinf(p) ? 1.0 : weighted_lp(ind.values, w, p);
    double num = std::isinf(p) ? (a.mat * ind.values).cwiseAbs().maxCoeff()
                               : weighted_lp(a.mat * ind.values, w, p);
    best = std::max(best, num / denom);
  }
  return best;
}

double family_norm_2(const FamilyOp& a) {
  const Lattice& lat = *a.lattice;
  int L = lat.leaf_count();
  // Gram form: <A f, A g> = f^T Q g with Q = sum_e |supp_e| row_e^T row_e;
  // the squared norm is the largest eigenvalue of D^{-1} Q in weighted L^2.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(L, L);
  for (const auto& e : a.entries)
    q += lat.measure(e.support) * e.row.transpose() * e.row;
  Eigen::VectorXd w = leaf_weights(lat);
  Eigen::VectorXd sinv = w.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd c = sinv.asDiagonal() * q * sinv.asDiagonal();
  return std::sqrt(power_largest(c, 7654321, 1e-12));
}

NormReport family_norm_p(const FamilyOp& a, double p, double q, int restarts,
                         std::uint64_t seed) {
  require_p_open(p);
  if (!(q > 1.0)) throw Error(ErrorKind::BadExponent, "q in (1, inf) required");
  FamilyP problem;
  problem.op = &a;
  problem.w = leaf_weights(*a.lattice);
  problem.p = p;
  problem.q = q;
  return run_boyd(problem, *a.lattice, p, restarts, seed, {});
}

double family_indicator_lower(const FamilyOp& a, double p, double q) {
  const Lattice& lat = *a.lattice;
  Eigen::VectorXd w = leaf_weights(lat);
  double best = 0.0;
  for (int i = 0; i < lat.size(); ++i) {
    StepFunction ind = StepFunction::indicator(lat, i);
    Eigen::VectorXd vals = a.apply(ind);
    double num = a.output_norm(vals, p, q);
    double denom = weighted_lp(ind.values, w, p);
    best = std::max(best, num / denom);
  }
  return best;
}

}  // namespace nhmart
