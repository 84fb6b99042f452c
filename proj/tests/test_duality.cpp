#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polycsp/duality.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"

using namespace polycsp;

namespace {

Structure k2_with_units() {
  auto s = fixtures::complete_graph(2);
  s.add_relation("U0", 1, {{0}});
  s.add_relation("U1", 1, {{1}});
  return s;
}

ClosedPath cycle_path(const Instance& x, const std::vector<int>& vars) {
  ClosedPath p;
  p.vars = vars;
  for (std::size_t i = 0; i + 1 < vars.size(); ++i)
    p.steps.push_back({0, {vars[i], vars[i + 1]}, 0, 1});
  CHECK(is_path(x, p));
  return p;
}

}  // namespace

TEST_CASE("verify_lift") {
  auto c4 = fixtures::cycle_graph(4);
  auto id = identity_lift(c4);
  CHECK(verify_lift(id, c4));
  CHECK_FALSE(id.claimed_acyclic);

  Lift bad;
  bad.instance = fixtures::path_graph(2);
  bad.lift_map = {0, 2};  // 0 and 2 are not adjacent in C4
  CHECK_FALSE(verify_lift(bad, c4));
  bad.lift_map = {0, 1};
  CHECK(verify_lift(bad, c4) == is_acyclic(bad.instance));
}

TEST_CASE("unsolvable_acyclic_lift examples") {
  auto s = k2_with_units();
  Instance ok(2, s.signature);
  ok.table("E") = {{0, 1}};
  ok.table("U0") = {{0}};
  CHECK_FALSE(unsolvable_acyclic_lift(ok, s));

  Instance bad(3, s.signature);
  bad.table("E") = {{0, 1}, {1, 2}};
  bad.table("U0") = {{0}, {2}};
  bad.table("U1") = {{2}};
  auto l = unsolvable_acyclic_lift(bad, s);
  REQUIRE(l);
  CHECK(verify_lift(*l, bad));
  CHECK(is_acyclic(l->instance));
  CHECK_FALSE(oracle::solvable(l->instance, s));

  // Triangle over K2 is arc-consistent though unsolvable.
  CHECK_FALSE(unsolvable_acyclic_lift(fixtures::cycle_graph(3), fixtures::complete_graph(2)));
}

TEST_CASE("root values of every intermediate lift equal U^i") {
  std::mt19937_64 rng(2);
  for (int iter = 0; iter < 40; ++iter) {
    int d = 2 + iter % 2;
    auto s = oracle::random_structure(d, {1, 2, 3}, 0.5, rng);
    auto x = oracle::random_instance(s, 4, 5, rng);
    AcyclicLiftBuilder b(x, s);
    do {
      for (int v = 0; v < x.domain_size; ++v) {
        int root = -1;
        Lift l = b.lift(v, &root);
        CHECK(verify_lift(l, x));
        DomainMask vals = 0;
        for (const auto& g : oracle::all_solutions(l.instance, s)) vals |= DomainMask{1} << g[root];
        CHECK(vals == b.allowed(v));
      }
    } while (b.step());
  }
}

TEST_CASE("obstruction exists exactly when arc-consistency fails") {
  std::mt19937_64 rng(9);
  int found = 0;
  for (int iter = 0; iter < 100; ++iter) {
    int d = 2 + iter % 2;
    auto s = oracle::random_structure(d, {1, 2}, 0.5, rng);
    auto x = oracle::random_instance(s, 2 + iter % 7, 3 + iter % 6, rng);
    auto l = unsolvable_acyclic_lift(x, s);
    CHECK(bool(l) == !good_witness(x, s));
    if (l) {
      ++found;
      CHECK(verify_lift(*l, x));
      if (l->instance.domain_size <= 12) CHECK_FALSE(oracle::solvable(l->instance, s));
    }
  }
  CHECK(found > 10);
}

TEST_CASE("lift output is deterministic") {
  auto s = k2_with_units();
  Instance bad(3, s.signature);
  bad.table("E") = {{0, 1}, {1, 2}, {2, 0}};
  bad.table("U0") = {{0}};
  bad.table("U1") = {{1}};
  auto a = unsolvable_acyclic_lift(bad, s);
  auto b = unsolvable_acyclic_lift(bad, s);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->instance == b->instance);
  CHECK(a->lift_map == b->lift_map);
}

TEST_CASE("cycle_obstruction_lift on the triangle") {
  auto k2 = fixtures::complete_graph(2);
  Instance tri(3, k2.signature);
  tri.tables[0] = {{0, 1}, {1, 2}, {2, 0}};
  auto p = cycle_path(tri, {0, 1, 2, 0});
  auto l = cycle_obstruction_lift(tri, k2, p);
  CHECK(verify_lift(l, tri));
  CHECK(is_acyclic(l.instance));
  REQUIRE(l.distinguished == 0);
  CHECK(l.fiber.size() >= 2);
  auto sols = oracle::all_solutions(l.instance, k2);
  CHECK_FALSE(sols.empty());
  for (const auto& g : sols) {
    bool constant = true;
    for (int v : l.fiber) constant = constant && g[v] == g[l.fiber[0]];
    CHECK_FALSE(constant);
  }
  auto rel = fiber_relation(l, k2);
  for (const auto& t : rel) CHECK(std::adjacent_find(t.begin(), t.end(), std::not_equal_to<>()) != t.end());
}

TEST_CASE("cycle_obstruction_lift rejects non-witnesses") {
  auto k2 = fixtures::complete_graph(2);
  Instance tri(3, k2.signature);
  tri.tables[0] = {{0, 1}, {1, 2}, {2, 0}};
  ClosedPath empty;
  empty.vars = {0};
  CHECK_THROWS_WITH_AS(cycle_obstruction_lift(tri, k2, empty),
                       "path does not witness cycle-inconsistency", InvalidInput);

  Instance sq(4, k2.signature);
  sq.tables[0] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  CHECK_THROWS_WITH_AS(cycle_obstruction_lift(sq, k2, cycle_path(sq, {0, 1, 2, 3, 0})),
                       "path does not witness cycle-inconsistency", InvalidInput);

  ClosedPath open = cycle_path(tri, {0, 1, 2});
  CHECK_THROWS_AS(cycle_obstruction_lift(tri, k2, open), InvalidInput);
}

TEST_CASE("cycle obstruction from the audit") {
  // Odd cycles of length 5 over K2 and a longer arity-3 example over NAE.
  auto k2 = fixtures::complete_graph(2);
  auto c5 = fixtures::cycle_graph(5);
  auto w = good_witness(c5, k2);
  REQUIRE(w);
  auto audit = cycle_consistency_audit(c5, k2, *w, 10);
  REQUIRE_FALSE(audit.pass);
  auto l = cycle_obstruction_lift(c5, k2, *audit.path);
  CHECK(verify_lift(l, c5));
  CHECK(is_acyclic(l.instance));
}
