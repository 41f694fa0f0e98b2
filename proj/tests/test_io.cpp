#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "naesat/io.hpp"

using namespace naesat;

TEST_CASE("instance round trip") {
  const Instance inst = generate(make_params(4, 6, 10), 11);
  const Json j = instance_to_json(inst);
  CHECK(j["k"] == 4);
  CHECK(j["m"] == 15);
  const Instance back = instance_from_json(Json::parse(j.dump()));
  REQUIRE(back.edges.size() == inst.edges.size());
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    CHECK(back.edges[i].var == inst.edges[i].var);
    CHECK(back.edges[i].clause == inst.edges[i].clause);
    CHECK(back.edges[i].lit == inst.edges[i].lit);
  }
  CHECK(instance_to_json(back).dump() == j.dump());
}

TEST_CASE("malformed instances") {
  Json j = instance_to_json(generate(make_params(3, 3, 3), 1));
  Json bad_m = j;
  bad_m["m"] = 4;
  CHECK_THROWS_AS(instance_from_json(bad_m), InvalidInput);
  Json no_k = j;
  no_k.erase("k");
  CHECK_THROWS_AS(instance_from_json(no_k), InvalidInput);
  Json short_edges = j;
  short_edges["edges"].erase(0);
  CHECK_THROWS_AS(instance_from_json(short_edges), InvalidInput);
  Json bad_edge = j;
  bad_edge["edges"][0] = "x";
  CHECK_THROWS_AS(instance_from_json(bad_edge), InvalidInput);
}

TEST_CASE("tree round trip") {
  Xoshiro256 rng(9);
  for (int t = 0; t < 20; ++t) {
    const BoundaryTree tree = random_tree(rng, 3, 20);
    const BoundaryTree back = tree_from_json(Json::parse(tree_to_json(tree).dump()));
    CHECK(back.n_vars == tree.n_vars);
    CHECK(back.n_clauses == tree.n_clauses);
    CHECK(back.boundary == tree.boundary);
    CHECK(tree_energy_formula(back) == tree_energy_formula(tree));
  }
  Json j = tree_to_json(random_tree(rng, 3, 12));
  j["boundary"][0][1] = "f";
  CHECK_THROWS_AS(tree_from_json(j), InvalidInput);
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "naesat_io_test.json";
  write_text_file(path.string(), "{\"a\": [1, 2]}");
  CHECK(read_json_file(path.string())["a"][1] == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_text_file(path.string()), InvalidInput);
  write_text_file(path.string(), "{not json");
  CHECK_THROWS_AS(read_json_file(path.string()), InvalidInput);
  std::filesystem::remove(path);
}
