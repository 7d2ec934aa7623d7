#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "nhmart/paraproduct.hpp"

namespace nhmart {

// Lattice interchange: {"nodes":[{"id":..,"parent":..|null,"measure":..,
// "generation":..?}, ...]}; children order = file order.
std::shared_ptr<Lattice> load_lattice(const std::string& path);
std::shared_ptr<Lattice> parse_lattice(const std::string& json_text);
std::string lattice_to_json(const Lattice& lat);
void save_lattice(const Lattice& lat, const std::string& path);

// Function file: {"lattice": path, "leaf_values": [...]}. The lattice path is
// resolved relative to the function file.
struct LoadedFunction {
  std::shared_ptr<Lattice> lattice;
  StepFunction f;
};
LoadedFunction load_function(const std::string& path);
std::string function_to_json(const StepFunction& f, const std::string& lattice_path);
void save_function(const StepFunction& f, const std::string& lattice_path,
                   const std::string& path);

// Sequence file: {"lattice": path, "entries": {"id": value, ...}} keyed by
// node labels.
struct LoadedSequence {
  std::shared_ptr<Lattice> lattice;
  CoefSequence s;
};
LoadedSequence load_sequence(const std::string& path);
std::string sequence_to_json(const CoefSequence& s, const std::string& lattice_path);

// Transform file: {"lattice": path, "blocks": {"id": [[...], ...], ...}} in
// child-indicator coordinates.
struct LoadedTransform {
  std::shared_ptr<Lattice> lattice;
  TransformBlocks t;
};
LoadedTransform load_transform(const std::string& path);
std::string transform_to_json(const TransformBlocks& t, const std::string& lattice_path);

// Dense operator dump (one CSV row per leaf).
void save_operator_csv(const LinearOp& op, const std::string& path);
LinearOp load_operator_csv(const Lattice& lat, const std::string& path);

std::string decomp_to_json(const MartDecomp& d);

}  // namespace nhmart
