#include "nhmart/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nhmart {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::IoError, path + ": " + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << text;
}

std::string sibling_path(const std::string& anchor, const std::string& relative) {
  std::filesystem::path p(relative);
  if (p.is_absolute()) return relative;
  return (std::filesystem::path(anchor).parent_path() / p).string();
}

std::shared_ptr<Lattice> lattice_from_json(const json& j) {
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw Error(ErrorKind::IoError, "lattice file needs a \"nodes\" array");
  std::vector<NodeSpec> specs;
  for (const auto& node : j["nodes"]) {
    NodeSpec spec;
    spec.id = node.at("id").get<long long>();
    if (node.contains("parent") && !node["parent"].is_null())
      spec.parent = node["parent"].get<long long>();
    spec.measure = node.at("measure").get<double>();
    if (node.contains("generation") && !node["generation"].is_null())
      spec.generation = node["generation"].get<int>();
    specs.push_back(spec);
  }
  return std::make_shared<Lattice>(Lattice::build(specs));
}

}  // namespace

std::shared_ptr<Lattice> load_lattice(const std::string& path) {
  return lattice_from_json(read_json_file(path));
}

std::shared_ptr<Lattice> parse_lattice(const std::string& json_text) {
  return lattice_from_json(json::parse(json_text));
}

std::string lattice_to_json(const Lattice& lat) {
  json nodes = json::array();
  for (const NodeSpec& spec : lat.to_specs()) {
    json node;
    node["id"] = spec.id;
    node["parent"] = spec.parent ? json(*spec.parent) : json(nullptr);
    node["measure"] = spec.measure;
    if (spec.generation) node["generation"] = *spec.generation;
    nodes.push_back(node);
  }
  return json{{"nodes", nodes}}.dump(2);
}

void save_lattice(const Lattice& lat, const std::string& path) {
  write_file(path, lattice_to_json(lat));
}

LoadedFunction load_function(const std::string& path) {
  json j = read_json_file(path);
  LoadedFunction out;
  out.lattice = load_lattice(sibling_path(path, j.at("lattice").get<std::string>()));
  std::vector<double> vals = j.at("leaf_values").get<std::vector<double>>();
  if (static_cast<int>(vals.size()) != out.lattice->leaf_count())
    throw Error(ErrorKind::IoError, "leaf_values length != leaf count");
  out.f = StepFunction(*out.lattice,
                       Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size()));
  return out;
}

std::string function_to_json(const StepFunction& f, const std::string& lattice_path) {
  json j;
  j["lattice"] = lattice_path;
  j["leaf_values"] = std::vector<double>(f.values.data(), f.values.data() + f.values.size());
  return j.dump(2);
}

void save_function(const StepFunction& f, const std::string& lattice_path,
                   const std::string& path) {
  write_file(path, function_to_json(f, lattice_path));
}

LoadedSequence load_sequence(const std::string& path) {
  json j = read_json_file(path);
  LoadedSequence out;
  out.lattice = load_lattice(sibling_path(path, j.at("lattice").get<std::string>()));
  out.s.lattice = out.lattice.get();
  for (auto& [key, value] : j.at("entries").items()) {
    long long label = std::stoll(key);
    out.s.entries[out.lattice->node_of_label(label)] = value.get<double>();
  }
  return out;
}

std::string sequence_to_json(const CoefSequence& s, const std::string& lattice_path) {
  json entries = json::object();
  for (auto [node, value] : s.entries)
    entries[std::to_string(s.lattice->label(node))] = value;
  return json{{"lattice", lattice_path}, {"entries", entries}}.dump(2);
}

LoadedTransform load_transform(const std::string& path) {
  json j = read_json_file(path);
  LoadedTransform out;
  out.lattice = load_lattice(sibling_path(path, j.at("lattice").get<std::string>()));
  out.t.lattice = out.lattice.get();
  for (auto& [key, rows] : j.at("blocks").items()) {
    int node = out.lattice->node_of_label(std::stoll(key));
    int m = static_cast<int>(out.lattice->children(node).size());
    Eigen::MatrixXd block(m, m);
    if (static_cast<int>(rows.size()) != m)
      throw Error(ErrorKind::IoError, "block row count != child count");
    for (int r = 0; r < m; ++r) {
      auto row = rows[r].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != m)
        throw Error(ErrorKind::IoError, "block is not square");
      for (int c = 0; c < m; ++c) block(r, c) = row[c];
    }
    out.t.blocks[node] = block;
  }
  out.t.validate();
  return out;
}

std::string transform_to_json(const TransformBlocks& t, const std::string& lattice_path) {
  json blocks = json::object();
  for (const auto& [node, mat] : t.blocks) {
    json rows = json::array();
    for (int r = 0; r < mat.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
      rows.push_back(row);
    }
    blocks[std::to_string(t.lattice->label(node))] = rows;
  }
  return json{{"lattice", lattice_path}, {"blocks", blocks}}.dump(2);
}

void save_operator_csv(const LinearOp& op, const std::string& path) {
  std::ostringstream os;
  os.precision(17);
  for (int r = 0; r < op.mat.rows(); ++r) {
    for (int c = 0; c < op.mat.cols(); ++c) {
      if (c) os << ",";
      os << op.mat(r, c);
    }
    os << "\n";
  }
  write_file(path, os.str());
}

LinearOp load_operator_csv(const Lattice& lat, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  int L = lat.leaf_count();
  LinearOp op;
  op.lattice = &lat;
  op.mat = Eigen::MatrixXd::Zero(L, L);
  std::string line;
  int r = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (r >= L) throw Error(ErrorKind::IoError, "more rows than leaves");
    std::istringstream ls(line);
    std::string cell;
    int c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= L) throw Error(ErrorKind::IoError, "more columns than leaves");
      op.mat(r, c) = std::stod(cell);
      ++c;
    }
    if (c != L) throw Error(ErrorKind::IoError, "short row in operator file");
    ++r;
  }
  if (r != L) throw Error(ErrorKind::IoError, "operator row count != leaf count");
  return op;
}

std::string decomp_to_json(const MartDecomp& d) {
  const Lattice& lat = *d.lattice;
  json diffs = json::object();
  for (int i = 0; i < lat.size(); ++i) {
    if (d.diff[i].size() == 0) continue;
    json per_child = json::object();
    auto kids = lat.children(i);
    for (int k = 0; k < static_cast<int>(kids.size()); ++k)
      per_child[std::to_string(lat.label(kids[k]))] = d.diff[i][k];
    diffs[std::to_string(lat.label(i))] = per_child;
  }
  json roots = json::object();
  auto rootspan = lat.roots();
  for (int r = 0; r < static_cast<int>(rootspan.size()); ++r)
    roots[std::to_string(lat.label(rootspan[r]))] = d.root_avg[r];
  return json{{"differences", diffs}, {"root_averages", roots}}.dump(2);
}

}  // namespace nhmart
