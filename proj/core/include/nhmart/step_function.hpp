#pragma once

#include <Eigen/Dense>

#include "nhmart/lattice.hpp"

namespace nhmart {

/// Leaf-constant function on a lattice: one value per leaf slot.
struct StepFunction {
  const Lattice* lattice = nullptr;
  Eigen::VectorXd values;

  StepFunction() = default;
  StepFunction(const Lattice& lat, Eigen::VectorXd v) : lattice(&lat), values(std::move(v)) {
    if (values.size() != lat.leaf_count())
      throw Error(ErrorKind::BadArgument, "value count != leaf count");
  }

  static StepFunction zero(const Lattice& lat) {
    return StepFunction(lat, Eigen::VectorXd::Zero(lat.leaf_count()));
  }
  static StepFunction constant(const Lattice& lat, double c) {
    return StepFunction(lat, Eigen::VectorXd::Constant(lat.leaf_count(), c));
  }
  /// Indicator 1_I of a node.
  static StepFunction indicator(const Lattice& lat, int node);
};

}  // namespace nhmart
