#include "nhmart/paraproduct.hpp"

#include <cmath>

namespace nhmart {

namespace {

void require_same(const Lattice* a, const Lattice* b) {
  if (a == nullptr || b == nullptr || a != b)
    throw Error(ErrorKind::LatticeMismatch, "operands live on different lattices");
}

}  // namespace

StepFunction LinearOp::apply(const StepFunction& f) const {
  require_same(lattice, f.lattice);
  return StepFunction(*lattice, mat * f.values);
}

namespace {

// Segment helpers: everything below a node occupies a contiguous leaf range.
Eigen::RowVectorXd averaging_segment(const Lattice& lat, int node, int base, int len) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(len);
  auto [b, e] = lat.leaf_range(node);
  for (int j = b; j < e; ++j) row[j - base] = lat.leaf_measure(j) / lat.measure(node);
  return row;
}

// Local matrix of E_I on the leaf range of I.
Eigen::MatrixXd expectation_local(const Lattice& lat, int node) {
  auto [b, e] = lat.leaf_range(node);
  int len = e - b;
  Eigen::RowVectorXd avg = averaging_segment(lat, node, b, len);
  return Eigen::VectorXd::Ones(len) * avg;
}

// Local matrix of Delta_I on the leaf range of I.
Eigen::MatrixXd difference_local(const Lattice& lat, int node) {
  auto [b, e] = lat.leaf_range(node);
  int len = e - b;
  Eigen::MatrixXd out = -expectation_local(lat, node);
  for (int c : lat.children(node)) {
    auto [cb, ce] = lat.leaf_range(c);
    Eigen::RowVectorXd avg = averaging_segment(lat, c, b, len);
    for (int rrow = cb; rrow < ce; ++rrow) out.row(rrow - b) += avg;
  }
  return out;
}

// Delta_I b broadcast to the leaf range of I.
Eigen::VectorXd diff_broadcast(const Lattice& lat, const MartDecomp& db, int node) {
  auto [b, e] = lat.leaf_range(node);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(e - b);
  auto kids = lat.children(node);
  for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
    auto [cb, ce] = lat.leaf_range(kids[k]);
    u.segment(cb - b, ce - cb).setConstant(db.diff[node][k]);
  }
  return u;
}

}  // namespace

LinearOp assemble(OperatorKind kind, const StepFunction& b, const Lattice& lat) {
  require_same(b.lattice, &lat);
  int L = lat.leaf_count();
  LinearOp op;
  op.lattice = &lat;
  op.mat = Eigen::MatrixXd::Zero(L, L);

  if (kind == OperatorKind::mult) {
    op.mat = b.values.asDiagonal();
    return op;
  }
  if (kind == OperatorKind::remainder) {
    Eigen::VectorXd avg = node_averages(b);
    for (int r : lat.roots()) {
      auto [rb, re] = lat.leaf_range(r);
      op.mat.block(rb, rb, re - rb, re - rb) += avg[r] * expectation_local(lat, r);
    }
    return op;
  }

  MartDecomp db = decompose(b);
  Eigen::VectorXd avg = node_averages(b);
  for (int i = 0; i < lat.size(); ++i) {
    if (lat.is_leaf(i)) continue;
    auto [ib, ie] = lat.leaf_range(i);
    int len = ie - ib;
    auto block = op.mat.block(ib, ib, len, len);
    switch (kind) {
      case OperatorKind::pi: {
        Eigen::VectorXd u = diff_broadcast(lat, db, i);
        block += u.asDiagonal() * expectation_local(lat, i);
        break;
      }
      case OperatorKind::pi_star: {
        Eigen::VectorXd u = diff_broadcast(lat, db, i);
        block += expectation_local(lat, i) * u.asDiagonal() * difference_local(lat, i);
        break;
      }
      case OperatorKind::pi_extstar: {
        Eigen::VectorXd u = diff_broadcast(lat, db, i);
        block += u.asDiagonal() * difference_local(lat, i);
        break;
      }
      case OperatorKind::lambda: {
        Eigen::MatrixXd d = difference_local(lat, i);
        block += d * b.values.segment(ib, len).asDiagonal() * d;
        break;
      }
      case OperatorKind::lambda0: {
        block += avg[i] * difference_local(lat, i);
        break;
      }
      case OperatorKind::lambda1: {
        Eigen::VectorXd u = diff_broadcast(lat, db, i);
        Eigen::MatrixXd d = difference_local(lat, i);
        block += d * u.asDiagonal() * d;
        break;
      }
      default:
        throw Error(ErrorKind::BadArgument, "unhandled operator kind");
    }
  }
  return op;
}

void TransformBlocks::validate() const {
  const Lattice& lat = *lattice;
  for (const auto& [node, blockmat] : blocks) {
    auto kids = lat.children(node);
    int m = static_cast<int>(kids.size());
    if (m == 0) throw Error(ErrorKind::LeafNode, "block on a leaf");
    if (blockmat.rows() != m || blockmat.cols() != m)
      throw Error(ErrorKind::BadArgument, "block dimension != child count");
    Eigen::VectorXd w(m);
    for (int k = 0; k < m; ++k) w[k] = lat.measure(kids[k]);
    for (int k = 0; k + 1 < m; ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      v[k] = 1.0;
      v[m - 1] = -w[k] / w[m - 1];
      Eigen::VectorXd bv = blockmat * v;
      double resid = std::abs(w.dot(bv));
      double scale = w.norm() * bv.norm();
      if (resid > 1e-10 * std::max(scale, 1.0))
        throw Error(ErrorKind::ZeroMeanViolated,
                    "block at node " + std::to_string(node) + " leaves the difference space");
    }
  }
}

TransformBlocks TransformBlocks::adjoint() const {
  const Lattice& lat = *lattice;
  TransformBlocks out;
  out.lattice = lattice;
  for (const auto& [node, blockmat] : blocks) {
    auto kids = lat.children(node);
    int m = static_cast<int>(kids.size());
    Eigen::VectorXd w(m);
    for (int k = 0; k < m; ++k) w[k] = lat.measure(kids[k]);
    Eigen::MatrixXd adj = w.cwiseInverse().asDiagonal() * blockmat.transpose() * w.asDiagonal();
    // Weighted projection back onto the zero-mean subspace.
    Eigen::MatrixXd p0 =
        Eigen::MatrixXd::Identity(m, m) -
        (Eigen::VectorXd::Ones(m) * w.transpose()) / w.sum();
    out.blocks[node] = p0 * adj;
  }
  return out;
}

TransformBlocks multiplier_transform(const Lattice& lat, const std::map<int, double>& signs) {
  TransformBlocks t;
  t.lattice = &lat;
  for (auto [node, sign] : signs) {
    int m = static_cast<int>(lat.children(node).size());
    if (m == 0) throw Error(ErrorKind::LeafNode, "multiplier block on a leaf");
    t.blocks[node] = sign * Eigen::MatrixXd::Identity(m, m);
  }
  return t;
}

Eigen::MatrixXd swap_block(const Lattice& lat, int node) {
  auto kids = lat.children(node);
  if (kids.size() != 8)
    throw Error(ErrorKind::BadArgument, "swap block needs exactly 8 children");
  Eigen::VectorXd w(8);
  for (int k = 0; k < 8; ++k) w[k] = lat.measure(kids[k]);
  auto haar = [&](int k) {  // h^k = 1_{I_{2k}} - 1_{I_{2k-1}}, 1-indexed children
    Eigen::VectorXd h = Eigen::VectorXd::Zero(8);
    h[2 * k + 1] = 1.0;
    h[2 * k] = -1.0;
    return h;
  };
  const int swap[4] = {1, 0, 3, 2};
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(8, 8);
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd hk = haar(k);
    double nk = hk.cwiseAbs2().dot(w);
    t += haar(swap[k]) * (hk.cwiseProduct(w)).transpose() / nk;
  }
  return t;
}

LinearOp transform_operator(const TransformBlocks& t) {
  t.validate();
  const Lattice& lat = *t.lattice;
  int L = lat.leaf_count();
  LinearOp op;
  op.lattice = &lat;
  op.mat = Eigen::MatrixXd::Zero(L, L);
  for (const auto& [node, blockmat] : t.blocks) {
    auto kids = lat.children(node);
    int m = static_cast<int>(kids.size());
    auto [ib, ie] = lat.leaf_range(node);
    int len = ie - ib;
    // Child coordinates of Delta_I f, block applied, broadcast back.
    Eigen::MatrixXd coords(m, len);
    Eigen::RowVectorXd node_avg = averaging_segment(lat, node, ib, len);
    for (int k = 0; k < m; ++k)
      coords.row(k) = averaging_segment(lat, kids[k], ib, len) - node_avg;
    Eigen::MatrixXd bcast = Eigen::MatrixXd::Zero(len, m);
    for (int k = 0; k < m; ++k) {
      auto [cb, ce] = lat.leaf_range(kids[k]);
      bcast.block(cb - ib, k, ce - cb, 1).setOnes();
    }
    op.mat.block(ib, ib, len, len) += bcast * blockmat * coords;
  }
  return op;
}

LinearOp commutator(const LinearOp& a, const LinearOp& b) {
  require_same(a.lattice, b.lattice);
  LinearOp out;
  out.lattice = a.lattice;
  out.mat = a.mat * b.mat - b.mat * a.mat;
  return out;
}

double verify_decomposition(const StepFunction& b, const Lattice& lat) {
  LinearOp m = assemble(OperatorKind::mult, b, lat);
  LinearOp r = assemble(OperatorKind::remainder, b, lat);
  LinearOp pi = assemble(OperatorKind::pi, b, lat);
  LinearOp pis = assemble(OperatorKind::pi_star, b, lat);
  LinearOp pie = assemble(OperatorKind::pi_extstar, b, lat);
  LinearOp la = assemble(OperatorKind::lambda, b, lat);
  LinearOp la0 = assemble(OperatorKind::lambda0, b, lat);
  LinearOp la1 = assemble(OperatorKind::lambda1, b, lat);
  double r1 = (m.mat - r.mat - (pie.mat + la0.mat + pi.mat)).cwiseAbs().maxCoeff();
  double r2 = (m.mat - r.mat - (pis.mat + la.mat + pi.mat)).cwiseAbs().maxCoeff();
  double r3 = (la.mat - la0.mat - la1.mat).cwiseAbs().maxCoeff();
  return std::max({r1, r2, r3});
}

double testing_constant(const StepFunction& b, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0))
    throw Error(ErrorKind::BadExponent, "testing constant needs p, q >= 1");
  const Lattice& lat = *b.lattice;
  MartDecomp db = decompose(b);
  Eigen::VectorXd strict = Eigen::VectorXd::Zero(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    if (db.diff[i].size() == 0) continue;
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      strict[kids[k]] += std::pow(std::abs(db.diff[i][k]), q);
  }
  return sup_local_aggregate(lat, strict, Eigen::VectorXd::Zero(lat.size()), q, p);
}

double testing_constant(const ParaproductFamily& family, const Lattice& lat, double p,
                        double q) {
  if (!(p >= 1.0) || !(q >= 1.0))
    throw Error(ErrorKind::BadExponent, "testing constant needs p, q >= 1");
  Eigen::VectorXd strict = Eigen::VectorXd::Zero(lat.size());
  Eigen::VectorXd incl = Eigen::VectorXd::Zero(lat.size());
  for (const auto& [node, vals] : family) {
    auto kids = lat.children(node);
    if (kids.empty()) {
      if (vals.size() != 1) throw Error(ErrorKind::BadArgument, "leaf family value size != 1");
      incl[node] += std::pow(std::abs(vals[0]), q);
      continue;
    }
    if (vals.size() != static_cast<int>(kids.size()))
      throw Error(ErrorKind::BadArgument, "family value size != child count");
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      strict[kids[k]] += std::pow(std::abs(vals[k]), q);
  }
  return sup_local_aggregate(lat, strict, incl, q, p);
}

namespace {

Eigen::RowVectorXd full_avg_row(const Lattice& lat, int node) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(lat.leaf_count());
  auto [b, e] = lat.leaf_range(node);
  for (int j = b; j < e; ++j) row[j] = lat.leaf_measure(j) / lat.measure(node);
  return row;
}

}  // namespace

FamilyOp generalized_paraproduct(const ParaproductFamily& family, const Lattice& lat) {
  FamilyOp op;
  op.lattice = &lat;
  for (const auto& [node, vals] : family) {
    auto kids = lat.children(node);
    Eigen::RowVectorXd avg = full_avg_row(lat, node);
    if (kids.empty()) {
      if (vals.size() != 1) throw Error(ErrorKind::BadArgument, "leaf family value size != 1");
      if (vals[0] != 0.0) op.entries.push_back({node, vals[0] * avg});
      continue;
    }
    if (vals.size() != static_cast<int>(kids.size()))
      throw Error(ErrorKind::BadArgument, "family value size != child count");
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      if (vals[k] != 0.0) op.entries.push_back({kids[k], vals[k] * avg});
  }
  return op;
}

FamilyOp paraproduct_family(const StepFunction& b) {
  const Lattice& lat = *b.lattice;
  MartDecomp db = decompose(b);
  ParaproductFamily family;
  for (int i = 0; i < lat.size(); ++i)
    if (db.diff[i].size() != 0) family[i] = db.diff[i];
  return generalized_paraproduct(family, lat);
}

}  // namespace nhmart
