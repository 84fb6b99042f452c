#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"
#include "polycsp/structure.hpp"

using namespace polycsp;

TEST_CASE("validate_structure") {
  CHECK(validate_structure(fixtures::complete_graph(3)).empty());

  Structure bad(3, {});
  bad.add_relation("E", 2, {{0, 5}});
  auto v = validate_structure(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message == "element out of range");

  Structure arity(3, {});
  arity.add_relation("R", 3, {{0, 1}});
  auto w = validate_structure(arity);
  REQUIRE(!w.empty());
  CHECK(w[0].message == "arity mismatch");
  CHECK(w[0].relation == "R");
}

TEST_CASE("power of K2 and the directed 3-cycle") {
  auto k2 = fixtures::complete_graph(2);
  CHECK(power(k2, 1) == k2);

  auto p = power(k2, 2);
  CHECK(p.domain_size == 4);
  // 00=0, 01=1, 10=2, 11=3: edges 01<->10 and 00<->11.
  Table expect = {{0, 3}, {1, 2}, {2, 1}, {3, 0}};
  CHECK(p.tables[0] == expect);

  auto c = power(fixtures::directed_3cycle(), 2);
  CHECK(c.domain_size == 9);
  CHECK(c.tables[0].size() == 9);
}

TEST_CASE("power agrees with the coordinatewise rule") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 20; ++iter) {
    int d = 2 + iter % 2;
    auto s = oracle::random_structure(d, {2, 3}, 0.4, rng);
    int n = d == 2 ? 1 + iter % 4 : 1 + iter % 3;  // d^n <= 27
    auto p = power(s, n);
    for (std::size_t r = 0; r < s.tables.size(); ++r) {
      int k = s.signature.relations[r].arity;
      std::size_t total = 1;
      for (int i = 0; i < k; ++i) total *= p.domain_size;
      for (std::size_t c = 0; c < total; ++c) {
        Tuple t = decode_tuple(c, p.domain_size, k);
        bool all = true;
        for (int coord = 0; coord < n && all; ++coord) {
          Tuple proj;
          for (int e : t) proj.push_back(decode_tuple(e, d, n)[coord]);
          all = oracle::tuple_in(s.tables[r], proj);
        }
        CHECK(all == p.holds(r, t));
      }
    }
  }
}

TEST_CASE("power refuses past the cap") {
  Caps caps;
  caps.power_elements = 100;
  CHECK_THROWS_AS(power(fixtures::complete_graph(3), 5, caps), CapExceeded);
}

TEST_CASE("disjoint_union") {
  Instance x(2, fixtures::complete_graph(2).signature);
  x.tables[0] = {{0, 1}};
  Instance y(3, x.signature);
  y.tables[0] = {{0, 1}};
  auto u = disjoint_union(x, y);
  CHECK(u.instance.domain_size == 5);
  CHECK(u.right_map == std::vector<int>{2, 3, 4});
  CHECK(u.instance.tables[0] == Table{{0, 1}, {2, 3}});

  auto e = disjoint_union(x, empty_instance(x.signature, 0));
  CHECK(e.instance == x);

  Structure other(1, {});
  other.add_relation("F", 2);
  CHECK_THROWS_AS(disjoint_union(x, other), SignatureMismatch);
}

TEST_CASE("fixture shapes") {
  auto two = fixtures::two_sat();
  CHECK(two.signature.size() == 3);
  CHECK(two.table("D0") == Table{{0, 1}, {1, 0}, {1, 1}});
  CHECK(two.table("D2") == Table{{0, 0}, {0, 1}, {1, 0}});
  CHECK(fixtures::three_sat().table("D1").size() == 7);
  CHECK(fixtures::f2_3().signature.size() == 14);
  CHECK(fixtures::special_triad().tables[0].size() == 32);
  CHECK(fixtures::nae().tables[0].size() == 6);
  for (const auto& n : fixtures::catalog()) CHECK(validate_structure(n.structure).empty());
  // The star operation table as printed.
  CHECK(fixtures::rps_star(fixtures::kRock, fixtures::kPaper) == fixtures::kPaper);
  CHECK(fixtures::rps_star(fixtures::kPaper, fixtures::kScissors) == fixtures::kScissors);
  CHECK(fixtures::rps_star(fixtures::kScissors, fixtures::kRock) == fixtures::kRock);
}
