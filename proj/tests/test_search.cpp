#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"
#include "polycsp/search.hpp"

using namespace polycsp;

namespace {

Instance as_instance(const Structure& g, const Structure& tmpl) {
  Instance x(g.domain_size, tmpl.signature);
  x.tables = g.tables;
  return x;
}

}  // namespace

TEST_CASE("is_homomorphism") {
  auto k3 = fixtures::complete_graph(3);
  CHECK(is_homomorphism({0, 1, 2}, k3, k3));
  auto k2 = fixtures::complete_graph(2);
  CHECK_FALSE(is_homomorphism({0, 0}, fixtures::path_graph(2), k2));
  CHECK(is_homomorphism({0, 1, 0, 1}, fixtures::cycle_graph(4), k2));
  Structure other(2, {});
  other.add_relation("F", 1);
  CHECK_THROWS_AS(is_homomorphism({0, 0}, other, k2), SignatureMismatch);
}

TEST_CASE("find_homomorphism on cycles") {
  auto c5 = fixtures::cycle_graph(5);
  CHECK_FALSE(find_homomorphism(c5, fixtures::complete_graph(2)));
  auto f = find_homomorphism(c5, fixtures::complete_graph(3));
  REQUIRE(f);
  CHECK(oracle::is_hom(*f, c5, fixtures::complete_graph(3)));

  Instance one(1, fixtures::complete_graph(3).signature);
  auto g = find_homomorphism(one, fixtures::complete_graph(3));
  REQUIRE(g);
  CHECK(g->size() == 1);
}

TEST_CASE("seeds are respected and validated") {
  auto k3 = fixtures::complete_graph(3);
  auto p = fixtures::path_graph(3);
  auto f = find_homomorphism(p, k3, {2, std::nullopt, 2});
  REQUIRE(f);
  CHECK((*f)[0] == 2);
  CHECK((*f)[2] == 2);
  CHECK_FALSE(find_homomorphism(p, k3, {1, 1}));
  CHECK_THROWS_AS(find_homomorphism(p, k3, {7}), InvalidInput);
}

TEST_CASE("find_homomorphism agrees with exhaustive enumeration") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    int d = 2 + iter % 2;
    auto s = oracle::random_structure(d, {1, 2, 3}, 0.55, rng);
    int n = 2 + iter % 9;
    auto x = oracle::random_instance(s, n, 1 + iter % 12, rng);
    bool expect = oracle::solvable(x, s);
    auto got = find_homomorphism(x, s);
    REQUIRE(bool(got) == expect);
    if (got) CHECK(oracle::is_hom(*got, x, s));
    auto lex = find_homomorphism(x, s, {}, SearchOptions{Caps{}, VarOrder::Lex});
    CHECK(bool(lex) == expect);
  }
}

TEST_CASE("repeated variables inside one tuple") {
  Structure s(2, {});
  s.add_relation("R", 3, {{0, 1, 0}, {1, 1, 0}});
  Instance x(2, s.signature);
  x.tables[0] = {{0, 0, 1}};  // needs (a,a,b) in R: only (1,1,0)
  auto f = find_homomorphism(x, s);
  REQUIRE(f);
  CHECK(*f == Assignment{1, 0});
  x.tables[0] = {{0, 1, 0}};  // needs (a,b,a): only (0,1,0)
  f = find_homomorphism(x, s);
  REQUIRE(f);
  CHECK(*f == Assignment{0, 1});
  x.tables[0] = {{0, 0, 0}};
  CHECK_FALSE(find_homomorphism(x, s));
}

TEST_CASE("empty relation tables make constraints unsatisfiable") {
  Structure s(2, {});
  s.add_relation("Z", 2);
  Instance x(2, s.signature);
  CHECK(find_homomorphism(x, s));
  x.tables[0] = {{0, 1}};
  CHECK_FALSE(find_homomorphism(x, s));
}

TEST_CASE("project_solutions") {
  auto k2 = fixtures::complete_graph(2);
  auto p = fixtures::path_graph(2);
  CHECK(project_solutions(p, k2, {0, 1}) == std::set<Tuple>{{0, 1}, {1, 0}});
  CHECK(project_solutions(fixtures::cycle_graph(3), k2, {0}).empty());

  // Horn-style forcing: U1(x0), x0 -> x1, x1 -> x2 has the unique solution 111.
  auto h = fixtures::horn();
  Instance x(3, h.signature);
  x.table("U1") = {{0}};
  x.table("imp") = {{0, 1}, {1, 2}};
  CHECK(project_solutions(x, h, {0, 1, 2}) == std::set<Tuple>{{1, 1, 1}});

  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 60; ++iter) {
    auto s = oracle::random_structure(2 + iter % 2, {2, 3}, 0.5, rng);
    auto y = oracle::random_instance(s, 5, 4, rng);
    std::set<Tuple> expect;
    for (const auto& a : oracle::all_solutions(y, s)) expect.insert(a);
    CHECK(project_solutions(y, s, {0, 1, 2, 3, 4}) == expect);
    std::set<Tuple> pair;
    for (const auto& a : expect) pair.insert({a[3], a[1]});
    CHECK(project_solutions(y, s, {3, 1}) == pair);
  }
}

TEST_CASE("find_core") {
  auto path = fixtures::path_graph(3);
  auto c = find_core(path);
  CHECK(c.core == fixtures::complete_graph(2));
  auto k3 = find_core(fixtures::complete_graph(3));
  CHECK(k3.core.domain_size == 3);

  // Looped vertex 0 with pendant edges to 1, 2, 3.
  auto loop = fixtures::graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  loop.tables[0].push_back({0, 0});
  loop.canonicalize();
  auto lc = find_core(loop);
  CHECK(lc.core.domain_size == 1);
  CHECK(lc.core.tables[0] == Table{{0, 0}});
  CHECK(lc.retraction == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("find_core properties on random graphs") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 25; ++iter) {
    auto g = fixtures::random_graph(6, 0.45, rng);
    auto c = find_core(g);
    CHECK(hom_equivalent(g, c.core));
    // Retraction fixes the core pointwise.
    for (std::size_t i = 0; i < c.elements.size(); ++i)
      CHECK(c.retraction[c.elements[i]] == static_cast<int>(i));
    // Every endomorphism of the core is injective.
    if (c.core.domain_size <= 6) {
      for (const auto& e : oracle::all_solutions(c.core, c.core)) {
        std::set<int> img(e.begin(), e.end());
        CHECK(img.size() == e.size());
      }
    }
    auto again = find_core(c.core);
    CHECK(again.core.domain_size == c.core.domain_size);
  }
}

TEST_CASE("hom_equivalent") {
  auto k2 = fixtures::complete_graph(2);
  CHECK(hom_equivalent(k2, fixtures::path_graph(3)));
  CHECK_FALSE(hom_equivalent(k2, fixtures::complete_graph(3)));
  CHECK(hom_equivalent(k2, k2));
}

TEST_CASE("search node cap") {
  Caps caps;
  caps.search_nodes = 5;
  // K5 into K4 needs exhaustive refutation.
  CHECK_THROWS_AS(find_homomorphism(fixtures::complete_graph(5), fixtures::complete_graph(4), {},
                                    SearchOptions{caps, VarOrder::Mrv}),
                  CapExceeded);
  (void)as_instance;
}
