#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polycsp/classify.hpp"
#include "polycsp/consistency.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"

using namespace polycsp;
namespace fx = polycsp::fixtures;

TEST_CASE("Siggers outcomes on the fixture table") {
  for (const char* name : {"k3", "nae", "3sat"}) {
    CAPTURE(name);
    CHECK(classify_template(fx::by_name(name), name).tractable == Answer::No);
  }
  for (const char* name : {"2sat", "horn", "f2_3", "c3", "k2"}) {
    CAPTURE(name);
    auto v = classify_template(fx::by_name(name), name);
    CHECK(v.tractable == Answer::Yes);
    REQUIRE(v.siggers);
  }
}

TEST_CASE("the transcribed triad retracts to a short path") {
  auto v = classify_template(fx::special_triad(), "triad");
  CHECK(v.core_elements.size() == 5);
  CHECK(v.tractable == Answer::Yes);
}

TEST_CASE("K3 carries the intractability label") {
  auto v = classify_template(fx::complete_graph(3), "k3");
  CHECK(v.tractable == Answer::No);
  CHECK(v.labels.front().starts_with("intractable"));
  REQUIRE(v.graph);
  CHECK_FALSE(v.graph->bipartite);
}

TEST_CASE("boolean buckets") {
  CHECK(classify_boolean(fx::horn()).bucket == BooleanBucket::TotallySymmetric);
  CHECK(classify_boolean(fx::horn()).operation == "and");
  CHECK(classify_boolean(fx::two_sat()).bucket == BooleanBucket::TwoSatConstructible);
  CHECK(classify_boolean(fx::nae()).bucket == BooleanBucket::Intractable);
  CHECK(classify_boolean(fx::f2_3()).bucket == BooleanBucket::Affine);
  CHECK_THROWS_AS(classify_boolean(fx::complete_graph(3)), InvalidInput);
}

TEST_CASE("boolean buckets agree with the Siggers search") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = oracle::random_structure(2, {2, 3}, 0.5, rng);
    if (s.tables[0].empty() || s.tables[1].empty()) continue;
    auto b = classify_boolean(s);
    if (b.witness) CHECK(preserves(*b.witness, s));
    auto core = find_core(s);
    bool siggers = check_siggers(fx::with_singletons(core.core)).has_value();
    CHECK((b.bucket == BooleanBucket::Intractable) == !siggers);
  }
}

TEST_CASE("width 1") {
  auto horn = is_width1(fx::horn());
  CHECK(horn.answer == Answer::Yes);
  CHECK(horn.arity == 6);
  REQUIRE(horn.extractor);
  CHECK(set_function_preserves(horn.extractor->set_function, fx::horn()));
  for (const char* name : {"2sat", "k2", "k3"}) {
    CAPTURE(name);
    CHECK(is_width1(fx::by_name(name)).answer == Answer::No);
  }
}

TEST_CASE("width-1 solving on random Horn instances") {
  auto s = fx::horn();
  auto ts = is_width1(s).extractor->set_function;
  std::mt19937_64 rng(17);
  int solvable = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto x = oracle::random_instance(s, 3 + trial % 10, 2 + trial % 14, rng);
    auto f = width1_solve(x, s, ts);
    bool expect = oracle::solvable(x, s);
    REQUIRE(f.has_value() == expect);
    if (f) {
      ++solvable;
      CHECK(oracle::is_hom(*f, x, s));
    }
  }
  CHECK(solvable > 10);
  CHECK(solvable < 75);
}

TEST_CASE("graph classification") {
  auto even = classify_graph(fx::cycle_graph(6));
  CHECK(even.bipartite);
  CHECK(even.siggers);
  auto k3 = classify_graph(fx::complete_graph(3));
  CHECK_FALSE(k3.bipartite);
  auto edge = classify_graph(fx::path_graph(2));
  CHECK(edge.core_size == 2);
  CHECK_THROWS_AS(classify_graph(fx::directed_3cycle()), InvalidInput);

  auto c5 = fx::cycle_graph(5);
  auto walk = classify_graph(c5).odd_cycle;
  REQUIRE(walk.size() >= 4);
  CHECK(walk.front() == walk.back());
  CHECK((walk.size() - 1) % 2 == 1);
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) CHECK(c5.holds(0, {walk[i], walk[i + 1]}));
}

TEST_CASE("bipartite iff Siggers on random graphs") {
  std::mt19937_64 rng(23);
  int bip = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto g = fx::random_graph(3 + trial % 6, 0.4, rng);
    auto v = classify_graph(g);  // throws when the two tests disagree
    CHECK(v.bipartite == oracle::bipartite(g));
    bip += v.bipartite;
  }
  CHECK(bip > 0);
  CHECK(bip < 20);
}

TEST_CASE("smooth digraphs") {
  auto c3 = classify_smooth_digraph(fx::directed_3cycle());
  CHECK(c3.tractable);
  CHECK(c3.siggers == Answer::Yes);

  auto c2c3 = fx::digraph_from_arcs(5, {{0, 1}, {1, 0}, {2, 3}, {3, 4}, {4, 2}});
  auto v = classify_smooth_digraph(c2c3);
  CHECK(v.tractable);
  CHECK(v.cycle_union);

  // A 3-cycle plus the reverse of one arc: smooth, and its core is not a union of cycles.
  auto chord = fx::digraph_from_arcs(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}});
  auto w = classify_smooth_digraph(chord);
  CHECK_FALSE(w.tractable);
  CHECK(w.siggers == Answer::No);

  CHECK_THROWS_AS(classify_smooth_digraph(fx::digraph_from_arcs(2, {{0, 1}})), InvalidInput);
}

TEST_CASE("dual discriminator solver agrees with search") {
  std::vector<Structure> templates = {fx::two_sat(), fx::directed_3cycle(), fx::complete_graph(2)};
  Structure mixed(3, {});
  mixed.add_relation("perm", 2, {{0, 1}, {1, 2}, {2, 0}});
  mixed.add_relation("or02", 2, {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}});
  mixed.add_relation("u01", 1, {{0}, {1}});
  templates.push_back(mixed);
  std::mt19937_64 rng(31);
  for (const auto& s : templates) {
    REQUIRE(check_dual_discriminator(s));
    int solvable = 0;
    for (int trial = 0; trial < 60; ++trial) {
      auto x = oracle::random_instance(s, 2 + trial % 7, 1 + trial % 9, rng);
      auto f = dual_discriminator_solve(x, s);
      REQUIRE(f.has_value() == oracle::solvable(x, s));
      if (f) {
        ++solvable;
        CHECK(oracle::is_hom(*f, x, s));
      }
    }
    CHECK(solvable > 0);
  }
  CHECK_THROWS_AS(dual_discriminator_solve(Instance(1, fx::complete_graph(3).signature),
                                           fx::complete_graph(3)),
                  InvalidInput);
}

TEST_CASE("rock-paper-scissors solver agrees with search") {
  auto s = fx::rps();
  std::mt19937_64 rng(41);
  int solvable = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto x = oracle::random_instance(s, 2 + trial % 7, 1 + trial % 6, rng);
    auto f = rps_solve(x, s);
    REQUIRE(f.has_value() == oracle::solvable(x, s));
    if (f) {
      ++solvable;
      CHECK(oracle::is_hom(*f, x, s));
    }
  }
  CHECK(solvable > 20);
  CHECK(solvable < 290);
}

TEST_CASE("solver dispatch") {
  std::mt19937_64 rng(7);
  struct Case {
    const char* name;
    const char* method;
  };
  for (auto [name, method] : {Case{"horn", "width1"}, Case{"2sat", "dual-discriminator"},
                              Case{"k3", "search"}, Case{"rps", "rps"}}) {
    CAPTURE(name);
    auto s = fx::by_name(name);
    for (int trial = 0; trial < 10; ++trial) {
      auto x = oracle::random_instance(s, 4, 3, rng);
      auto r = solve(x, s);
      CHECK(r.method == method);
      CHECK(r.solution.has_value() == oracle::solvable(x, s));
    }
  }
}
