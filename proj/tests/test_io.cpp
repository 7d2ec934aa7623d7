#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nhmart/io.hpp"
#include "support.hpp"

using namespace nhmart;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "nhmart_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("lattice round trip is the identity") {
  testsupport::Rng rng(701);
  for (int trial = 0; trial < 25; ++trial) {
    auto lat = testsupport::random_lattice(rng);
    auto back = parse_lattice(lattice_to_json(*lat));
    REQUIRE(back->size() == lat->size());
    REQUIRE(back->leaf_count() == lat->leaf_count());
    for (int i = 0; i < lat->size(); ++i) {
      int j = back->node_of_label(lat->label(i));
      CHECK(back->measure(j) == lat->measure(i));  // bit-exact through decimal
      CHECK(back->generation(j) == lat->generation(i));
      if (lat->parent(i) >= 0)
        CHECK(back->label(back->parent(j)) == lat->label(lat->parent(i)));
      else
        CHECK(back->parent(j) < 0);
    }
  }
}

TEST_CASE("function file round trip") {
  auto dir = scratch_dir();
  Lattice lat = uniform_radic(3, 2, 2.0);
  save_lattice(lat, (dir / "lat.json").string());
  testsupport::Rng rng(702);
  StepFunction f = testsupport::random_function(rng, lat);
  save_function(f, "lat.json", (dir / "f.json").string());
  LoadedFunction lf = load_function((dir / "f.json").string());
  REQUIRE(lf.f.values.size() == f.values.size());
  CHECK((lf.f.values - f.values).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("sequence file round trip") {
  auto dir = scratch_dir();
  Lattice lat = uniform_radic(2, 2, 1.0);
  save_lattice(lat, (dir / "lat2.json").string());
  CoefSequence s;
  s.lattice = &lat;
  s.entries[0] = 1.25;
  s.entries[3] = -0.5;
  {
    std::ofstream out(dir / "s.json");
    out << sequence_to_json(s, "lat2.json");
  }
  LoadedSequence ls = load_sequence((dir / "s.json").string());
  CHECK(ls.s.entries.size() == 2);
  CHECK(ls.s.at(ls.lattice->node_of_label(lat.label(0))) == doctest::Approx(1.25));
}

TEST_CASE("transform file round trip validates blocks") {
  auto dir = scratch_dir();
  MixingCounterexample mc = gen_mixing_counterexample({0.25});
  save_lattice(*mc.lattice, (dir / "mlat.json").string());
  {
    std::ofstream out(dir / "t.json");
    out << transform_to_json(mc.transform, "mlat.json");
  }
  LoadedTransform lt = load_transform((dir / "t.json").string());
  CHECK(lt.t.blocks.size() == mc.transform.blocks.size());
  // a corrupted block fails validation on load
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"lattice":"mlat.json","blocks":{")" << mc.lattice->label(mc.block_nodes[0])
        << R"(":[[1,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0],[0,0,1,0,0,0,0,0],[0,0,0,1,0,0,0,0],
             [0,0,0,0,1,0,0,0],[0,0,0,0,0,1,0,0],[0,0,0,0,0,0,1,0],[1,1,1,1,1,1,1,1]]}})";
  }
  CHECK_THROWS_AS(load_transform((dir / "bad.json").string()), Error);
}

TEST_CASE("operator CSV round trip") {
  auto dir = scratch_dir();
  Lattice lat = uniform_radic(2, 2, 1.0);
  testsupport::Rng rng(703);
  StepFunction b = testsupport::random_function(rng, lat);
  LinearOp op = assemble(OperatorKind::pi, b, lat);
  save_operator_csv(op, (dir / "op.csv").string());
  LinearOp back = load_operator_csv(lat, (dir / "op.csv").string());
  CHECK((back.mat - op.mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("malformed files raise IoError") {
  auto dir = scratch_dir();
  {
    std::ofstream out(dir / "broken.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_lattice((dir / "broken.json").string()), Error);
  CHECK_THROWS_AS(load_lattice((dir / "missing.json").string()), Error);
}
