#include <doctest.h>

#include "nhmart/lattice.hpp"
#include "support.hpp"

using namespace nhmart;

TEST_CASE("single root builds a one-node forest") {
  Lattice lat = Lattice::build({{7, std::nullopt, 1.0, std::nullopt}});
  CHECK(lat.size() == 1);
  CHECK(lat.leaf_count() == 1);
  CHECK(lat.roots().size() == 1);
  CHECK(lat.is_leaf(0));
  CHECK(lat.label(0) == 7);
}

TEST_CASE("dyadic depth two by hand") {
  std::vector<NodeSpec> specs{
      {0, std::nullopt, 1.0, {}}, {1, 0, 0.5, {}}, {2, 0, 0.5, {}},
      {3, 1, 0.25, {}},           {4, 1, 0.25, {}}, {5, 2, 0.25, {}},
      {6, 2, 0.25, {}}};
  Lattice lat = Lattice::build(specs);
  CHECK(lat.size() == 7);
  CHECK(lat.leaf_count() == 4);
  CHECK(lat.max_depth() == 2);
  // children keep file order
  int root = lat.node_of_label(0);
  CHECK(lat.label(lat.children(root)[0]) == 1);
  CHECK(lat.label(lat.children(root)[1]) == 2);
}

TEST_CASE("measure mismatch rejected") {
  std::vector<NodeSpec> specs{{0, std::nullopt, 1.0, {}}, {1, 0, 0.5, {}}, {2, 0, 0.4, {}}};
  CHECK_THROWS_WITH_AS(Lattice::build(specs), doctest::Contains("MeasureMismatch"), Error);
}

TEST_CASE("uniform r-adic lattices") {
  Lattice d1 = uniform_radic(2, 1, 1.0);
  CHECK(d1.size() == 3);
  CHECK(d1.leaf_measure(0) == doctest::Approx(0.5));
  CHECK(d1.leaf_measure(1) == doctest::Approx(0.5));

  CHECK(uniform_radic(2, 10, 1.0).size() == 2047);

  Lattice t = uniform_radic(3, 2, 9.0);
  CHECK(t.size() == 13);
  for (int s = 0; s < t.leaf_count(); ++s) CHECK(t.leaf_measure(s) == doctest::Approx(1.0));

  CHECK_THROWS_AS(uniform_radic(1, 3, 1.0), Error);
}

TEST_CASE("validate reports rule violations without repairing") {
  CHECK(validate(uniform_radic(2, 3, 1.0).to_specs()).empty());

  std::vector<NodeSpec> bad{{0, std::nullopt, -1.0, {}}};
  auto v = validate(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == ErrorKind::NonPositiveMeasure);
  CHECK(v[0].node_id == 0);

  std::vector<NodeSpec> gen{{0, std::nullopt, 1.0, 3}, {1, 0, 0.5, 3}, {2, 0, 0.5, 4}};
  auto gv = validate(gen);
  REQUIRE(gv.size() == 1);
  CHECK(gv[0].rule == ErrorKind::GenerationOrder);
  CHECK(gv[0].node_id == 1);

  std::vector<NodeSpec> single{{0, std::nullopt, 1.0, {}}, {1, 0, 1.0, {}}};
  auto sv = validate(single);
  REQUIRE(sv.size() == 1);
  CHECK(sv[0].rule == ErrorKind::SingleChild);

  std::vector<NodeSpec> cyc{{0, std::nullopt, 2.0, {}}, {1, 2, 1.0, {}}, {2, 1, 1.0, {}}};
  auto cv = validate(cyc);
  bool has_cycle = false;
  for (const auto& violation : cv) has_cycle |= violation.rule == ErrorKind::CycleDetected;
  CHECK(has_cycle);
}

TEST_CASE("explicit generations with gaps are accepted") {
  std::vector<NodeSpec> specs{{0, std::nullopt, 1.0, -3}, {1, 0, 0.5, 0}, {2, 0, 0.5, 2}};
  Lattice lat = Lattice::build(specs);
  CHECK(lat.generation(lat.node_of_label(0)) == -3);
  CHECK(lat.generation(lat.node_of_label(2)) == 2);
}

TEST_CASE("random lattices satisfy the measure partition invariants") {
  testsupport::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto lat = testsupport::random_lattice(rng);
    CHECK(lat->check_invariants().empty());
    for (int i = 0; i < lat->size(); ++i) {
      if (lat->is_leaf(i)) continue;
      double sum = 0.0;
      for (int c : lat->children(i)) sum += lat->measure(c);
      CHECK(std::abs(sum - lat->measure(i)) <= 1e-12 * lat->measure(i));
    }
    double leaf_total = 0.0;
    for (int s = 0; s < lat->leaf_count(); ++s) leaf_total += lat->leaf_measure(s);
    CHECK(leaf_total == doctest::Approx(lat->total_measure()).epsilon(1e-12));
  }
}

TEST_CASE("leaf ranges are contiguous and nested") {
  testsupport::Rng rng(12);
  auto lat = testsupport::random_lattice(rng);
  for (int i = 0; i < lat->size(); ++i) {
    auto [b, e] = lat->leaf_range(i);
    CHECK(b < e);
    for (int c : lat->children(i)) {
      auto [cb, ce] = lat->leaf_range(c);
      CHECK(b <= cb);
      CHECK(ce <= e);
    }
  }
}
