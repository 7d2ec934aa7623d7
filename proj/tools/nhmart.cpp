// nhmart: non-homogeneous martingale toolkit CLI.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nhmart/experiments.hpp"
#include "nhmart/io.hpp"
#include "nhmart/mixing.hpp"
#include "nhmart/operator_norm.hpp"
#include "nhmart/stopping.hpp"

using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream out(out_path);
    out << text;
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_validate(const std::string& path) {
  json j;
  {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open " << path << "\n";
      return 2;
    }
    in >> j;
  }
  std::vector<nhmart::NodeSpec> specs;
  for (const auto& node : j.at("nodes")) {
    nhmart::NodeSpec spec;
    spec.id = node.at("id").get<long long>();
    if (node.contains("parent") && !node["parent"].is_null())
      spec.parent = node["parent"].get<long long>();
    spec.measure = node.at("measure").get<double>();
    if (node.contains("generation") && !node["generation"].is_null())
      spec.generation = node["generation"].get<int>();
    specs.push_back(spec);
  }
  auto violations = nhmart::validate(specs);
  for (const auto& v : violations)
    std::cout << nhmart::to_string(v.rule) << " at node " << v.node_id << ": " << v.detail
              << "\n";
  if (violations.empty()) {
    std::cout << "OK: " << specs.size() << " nodes\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-homogeneous martingale toolkit"};
  app.require_subcommand(1);

  // validate
  std::string lattice_path;
  auto* validate = app.add_subcommand("validate", "check a lattice interchange file");
  validate->add_option("file", lattice_path, "lattice JSON")->required();

  // decompose
  std::string func_path, out_path;
  auto* decompose_cmd = app.add_subcommand("decompose", "martingale difference decomposition");
  decompose_cmd->add_option("file", func_path, "function JSON")->required();
  decompose_cmd->add_option("--out", out_path, "output path (default stdout)");

  // norm
  double p = 2.0, q = 2.0;
  bool extended = false;
  auto* norm_cmd = app.add_subcommand("norm", "H^p_q norm of a function's decomposition");
  norm_cmd->add_option("file", func_path, "function JSON")->required();
  norm_cmd->add_option("--p", p, "outer exponent")->required();
  norm_cmd->add_option("--q", q, "inner exponent (default 2)");
  norm_cmd->add_flag("--extended", extended, "include root averages");

  // embed-test
  std::string seq_path;
  int trials = 32;
  std::uint64_t seed = 1;
  auto* embed = app.add_subcommand("embed-test", "Carleson embedding test for a sequence");
  embed->add_option("file", seq_path, "sequence JSON")->required();
  embed->add_option("--p", p, "exponent p")->required();
  embed->add_option("--q", q, "exponent q")->required();
  embed->add_option("--trials", trials, "random restarts (default 32)");
  embed->add_option("--seed", seed, "RNG seed (default 1)");

  // para-norm
  std::string kind = "pi", dump_path;
  int restarts = 32;
  auto* para = app.add_subcommand("para-norm", "assemble a paraproduct-family operator and "
                                               "estimate its norm");
  para->add_option("file", func_path, "symbol b as a function JSON")->required();
  para->add_option("--kind", kind,
                   "mult|pi|pi_star|pi_extstar|lambda|lambda0|lambda1|remainder")
      ->required();
  para->add_option("--p", p, "exponent p")->required();
  para->add_option("--q", q, "codomain aggregate exponent for kind=pi (default 2)");
  para->add_option("--restarts", restarts, "restarts (default 32)");
  para->add_option("--seed", seed, "RNG seed");
  para->add_option("--dump", dump_path, "write the dense matrix as CSV");

  // opnorm
  std::string op_path;
  auto* opnorm_cmd = app.add_subcommand("opnorm", "induced p-norm of a dumped operator");
  opnorm_cmd->add_option("file", op_path, "operator CSV")->required();
  opnorm_cmd->add_option("--lattice", lattice_path, "lattice JSON")->required();
  opnorm_cmd->add_option("--p", p, "exponent p")->required();
  opnorm_cmd->add_option("--restarts", restarts, "restarts (default 32)");
  opnorm_cmd->add_option("--seed", seed, "RNG seed");

  // stopping
  int k0 = 0;
  auto* stopping_cmd = app.add_subcommand("stopping", "stopping generations of a function");
  stopping_cmd->add_option("file", func_path, "function JSON")->required();
  stopping_cmd->add_option("--k0", k0, "starting level")->required();
  stopping_cmd->add_option("--out", out_path, "output path (default stdout)");

  // mixing-cert
  std::string transform_path;
  double cap_K = 0.0, eps = 0.0;
  bool have_K = false, have_eps = false;
  auto* mixing_cmd = app.add_subcommand("mixing-cert", "per-interval non-degeneracy certificates");
  mixing_cmd->add_option("file", transform_path, "transform JSON")->required();
  mixing_cmd->add_option("--p", p, "exponent p")->required();
  auto* kopt = mixing_cmd->add_option("--K", cap_K, "anti-concentration constant");
  auto* eopt = mixing_cmd->add_option("--eps", eps, "threshold for classification");

  // counterexample
  auto* ce = app.add_subcommand("counterexample", "generators for the explicit constructions");
  ce->require_subcommand(1);
  int n = 8, levels = 4, bigN = 10;
  std::vector<int> ns;
  std::vector<double> deltas;
  std::string format = "csv";
  auto* ce_avg = ce->add_subcommand("avg", "averaging counterexample experiment");
  ce_avg->add_option("--n", ns, "chain lengths (repeatable)")->required();
  ce_avg->add_option("--p", p, "exponent p != 2 (csv mode)");
  ce_avg->add_option("--out", out_path, "output path");
  ce_avg->add_option("--format", format, "csv (experiment rows) | json (generator dump)");
  auto* ce_basis = ce->add_subcommand("basis", "strong-unconditional-basis counterexample");
  ce_basis->add_option("--n", n, "split ratio parameter")->required();
  ce_basis->add_option("--levels", levels, "recursion depth")->required();
  ce_basis->add_option("--p", p, "norm-matching exponent")->required();
  ce_basis->add_option("--out", out_path, "output path");
  auto* ce_mixing = ce->add_subcommand("mixing", "mixing transform counterexample");
  ce_mixing->add_option("--delta", deltas, "block ratios (repeatable)")->required();
  ce_mixing->add_option("--out", out_path, "output path");
  auto* ce_bmo = ce->add_subcommand("bmo-div", "divergent BMO series");
  ce_bmo->add_option("--N", bigN, "number of levels")->required();
  ce_bmo->add_option("--q", q, "BMO exponent (default 2)");
  ce_bmo->add_option("--out", out_path, "output path");
  ce_bmo->add_option("--format", format, "json (default) | csv (summary row)");

  // commutator-exp
  auto* comm = app.add_subcommand("commutator-exp", "commutator norms across block ratios");
  comm->add_option("--deltas", deltas, "block ratios (repeatable)")->required();
  comm->add_option("--p", p, "exponent p")->required();
  comm->add_option("--K", cap_K, "cap constant for the certificates (default 10)");
  comm->add_option("--out", out_path, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(lattice_path);

    if (decompose_cmd->parsed()) {
      auto lf = nhmart::load_function(func_path);
      emit(nhmart::decomp_to_json(nhmart::decompose(lf.f)), out_path);
      return 0;
    }

    if (norm_cmd->parsed()) {
      auto lf = nhmart::load_function(func_path);
      std::cout << fmt(nhmart::hpq_norm(nhmart::decompose(lf.f), p, q, extended)) << "\n";
      return 0;
    }

    if (embed->parsed()) {
      auto ls = nhmart::load_sequence(seq_path);
      nhmart::EmbedReport rep = nhmart::embedding_test(ls.s, p, q, trials, seed);
      json j{{"K", rep.K},
             {"indicator_lower", rep.indicator_lower},
             {"lower_bound", rep.lower_bound},
             {"estimate", rep.estimate},
             {"ratio", rep.ratio},
             {"trials", rep.trials},
             {"seed", rep.seed}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (para->parsed()) {
      auto lf = nhmart::load_function(func_path);
      static const std::map<std::string, nhmart::OperatorKind> kinds{
          {"mult", nhmart::OperatorKind::mult},
          {"pi", nhmart::OperatorKind::pi},
          {"pi_star", nhmart::OperatorKind::pi_star},
          {"pi_extstar", nhmart::OperatorKind::pi_extstar},
          {"lambda", nhmart::OperatorKind::lambda},
          {"lambda0", nhmart::OperatorKind::lambda0},
          {"lambda1", nhmart::OperatorKind::lambda1},
          {"remainder", nhmart::OperatorKind::remainder}};
      auto it = kinds.find(kind);
      if (it == kinds.end()) {
        std::cerr << "unknown kind " << kind << "\n";
        return 2;
      }
      nhmart::LinearOp op = nhmart::assemble(it->second, lf.f, *lf.lattice);
      if (!dump_path.empty()) nhmart::save_operator_csv(op, dump_path);
      json j;
      j["kind"] = kind;
      j["p"] = p;
      if (p == 2.0) {
        j["norm"] = nhmart::norm_2(op);
      } else {
        nhmart::NormReport rep = nhmart::norm_p(op, p, restarts, seed);
        j["norm_estimate"] = rep.estimate;
        j["lower_bound"] = rep.lower_bound;
      }
      if (kind == "pi") {
        double K = nhmart::testing_constant(lf.f, p, q);
        j["testing_constant"] = K;
        nhmart::FamilyOp fam = nhmart::paraproduct_family(lf.f);
        double est = (p == 2.0 && q == 2.0)
                         ? nhmart::family_norm_2(fam)
                         : nhmart::family_norm_p(fam, p, q, restarts, seed).estimate;
        double lower = nhmart::family_indicator_lower(fam, p, q);
        j["family_norm_estimate"] = std::max(est, lower);
        j["family_indicator_lower"] = lower;
        if (K > 0.0) j["ratio_to_K"] = std::max(est, lower) / K;
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (opnorm_cmd->parsed()) {
      auto lat = nhmart::load_lattice(lattice_path);
      nhmart::LinearOp op = nhmart::load_operator_csv(*lat, op_path);
      json j;
      j["p"] = p;
      if (p == 2.0) {
        j["norm"] = nhmart::norm_2(op);
      } else {
        nhmart::NormReport rep = nhmart::norm_p(op, p, restarts, seed);
        j["estimate"] = rep.estimate;
        j["lower_bound"] = rep.lower_bound;
        j["restarts_used"] = rep.restarts_used;
        j["seed"] = rep.seed;
      }
      j["indicator_lower"] = nhmart::indicator_lower(op, p);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (stopping_cmd->parsed()) {
      auto lf = nhmart::load_function(func_path);
      nhmart::StoppingForest forest = nhmart::stopping_generations(lf.f, k0);
      json gens = json::array();
      for (const auto& gen : forest.generations) {
        json g = json::array();
        for (int node : gen) g.push_back(lf.lattice->label(node));
        gens.push_back(g);
      }
      json ranks = json::object();
      for (auto [node, r] : forest.rank) ranks[std::to_string(lf.lattice->label(node))] = r;
      auto violations = nhmart::verify_lemma(lf.f, forest);
      json j{{"k0", forest.k0},
             {"generations", gens},
             {"ranks", ranks},
             {"lemma_violations", violations.size()}};
      emit(j.dump(2), out_path);
      return violations.empty() ? 0 : 1;
    }

    if (mixing_cmd->parsed()) {
      auto lt = nhmart::load_transform(transform_path);
      have_K = kopt->count() > 0;
      have_eps = eopt->count() > 0;
      const nhmart::Lattice& lat = *lt.lattice;
      std::cout << "node,parent,eps_nocap,eps_cap,cap_applies,feasible\n";
      for (int i = 0; i < lat.size(); ++i) {
        int parent = lat.parent(i);
        if (parent < 0 || !lt.t.has_block(parent)) continue;
        nhmart::MixingCert cert = nhmart::nondegeneracy_cert(
            lt.t, i, p, have_K ? std::optional<double>(cap_K) : std::nullopt);
        std::cout << lat.label(i) << "," << lat.label(parent) << ","
                  << fmt(cert.epsilon_nocap) << "," << fmt(cert.epsilon_cap) << ","
                  << (cert.cap_applies ? 1 : 0) << "," << (cert.feasible ? 1 : 0) << "\n";
      }
      if (have_eps) {
        nhmart::Classification cls =
            nhmart::classify(lt.t, p, eps, have_K ? cap_K : 1e300);
        std::cout << "# classification: "
                  << (cls.strong ? "strong" : (cls.weak ? "weak" : "neither")) << "\n";
        if (!cls.failing_strong.empty()) {
          std::cout << "# failing strong:";
          for (int node : cls.failing_strong) std::cout << " " << lat.label(node);
          std::cout << "\n";
        }
      }
      return 0;
    }

    if (ce_avg->parsed()) {
      if (format == "json") {
        json all = json::array();
        for (int chain : ns) {
          nhmart::AvgCounterexample avce = nhmart::gen_avg_counterexample(chain);
          json j;
          j["n"] = avce.n;
          j["alpha"] = avce.alpha;
          j["lattice"] = json::parse(nhmart::lattice_to_json(*avce.lattice));
          j["decomposition"] = json::parse(nhmart::decomp_to_json(avce.decomp));
          all.push_back(j);
        }
        emit(all.dump(2), out_path);
        return 0;
      }
      std::ostringstream os;
      nhmart::write_csv(os, nhmart::run_avg_experiment(p, ns));
      emit(os.str(), out_path);
      return 0;
    }

    if (ce_basis->parsed()) {
      nhmart::BasisCounterexample bc = nhmart::gen_basis_counterexample(n, levels, p);
      json j;
      j["beta"] = bc.beta;
      j["p"] = bc.p;
      j["lattice"] = json::parse(nhmart::lattice_to_json(*bc.lattice));
      j["f"] = json::parse(nhmart::decomp_to_json(bc.f));
      j["g"] = json::parse(nhmart::decomp_to_json(bc.g));
      j["extended_square_norm_f"] = nhmart::hpq_norm(bc.f, p, 2.0, true);
      j["extended_square_norm_g"] = nhmart::hpq_norm(bc.g, p, 2.0, true);
      emit(j.dump(2), out_path);
      return 0;
    }

    if (ce_mixing->parsed()) {
      nhmart::MixingCounterexample mc = nhmart::gen_mixing_counterexample(deltas);
      json j;
      j["deltas"] = mc.deltas;
      j["lattice"] = json::parse(nhmart::lattice_to_json(*mc.lattice));
      j["b_leaf_values"] = std::vector<double>(mc.b.values.data(),
                                               mc.b.values.data() + mc.b.values.size());
      j["transform"] = json::parse(nhmart::transform_to_json(mc.transform, "(inline)"));
      emit(j.dump(2), out_path);
      return 0;
    }

    if (ce_bmo->parsed()) {
      nhmart::BmoDivergent bd = nhmart::gen_bmo_divergent(bigN);
      auto [local_norm, sup_inf] = nhmart::bmoq_norm(bd.decomp, q, q);
      nhmart::StepFunction f = nhmart::reconstruct(bd.decomp);
      if (format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "N,q,bmo_local,bmo_sup_inf,leftmost_partial_sum\n"
           << bd.N << "," << q << "," << local_norm << "," << sup_inf << ","
           << f.values[bd.leftmost_leaf_slot] << "\n";
        emit(os.str(), out_path);
        return 0;
      }
      json j;
      j["N"] = bd.N;
      j["bmo_local"] = local_norm;
      j["bmo_sup_inf"] = sup_inf;
      j["leftmost_partial_sum"] = f.values[bd.leftmost_leaf_slot];
      j["lattice"] = json::parse(nhmart::lattice_to_json(*bd.lattice));
      j["decomposition"] = json::parse(nhmart::decomp_to_json(bd.decomp));
      emit(j.dump(2), out_path);
      return 0;
    }

    if (comm->parsed()) {
      double capc = cap_K > 0.0 ? cap_K : 10.0;
      std::ostringstream os;
      nhmart::write_csv(os, nhmart::run_commutator_experiment(deltas, p, capc));
      emit(os.str(), out_path);
      return 0;
    }
  } catch (const nhmart::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
