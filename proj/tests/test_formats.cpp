#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"
#include "polycsp/io.hpp"
#include "polycsp/polymorphism.hpp"
#include "polycsp/report.hpp"

using namespace polycsp;
namespace fx = polycsp::fixtures;

namespace {

Structure parse_t(const std::string& text) {
  std::istringstream in(text);
  return parse_template(in);
}

Instance parse_i(const std::string& text, const Signature& sig) {
  std::istringstream in(text);
  return parse_instance(in, sig);
}

template <class F>
ParseError parse_error_of(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError");
  return ParseError(0, 0, "");
}

}  // namespace

TEST_CASE("K3 as text") {
  Structure k3 = parse_t("# triangle\ndomain 3\nrel E 2\n0 1\n1 0\n0 2\n2 0\n1 2\n2 1\n");
  CHECK(k3.domain_size == 3);
  REQUIRE(k3.tables.size() == 1);
  CHECK(k3.tables[0].size() == 6);
  CHECK(k3 == fx::by_name("k3"));
}

TEST_CASE("every fixture survives emit and parse") {
  for (const auto& n : fx::catalog()) {
    CAPTURE(n.name);
    std::string text = emit_template(n.structure);
    CHECK(parse_t(text) == n.structure);
    CHECK(emit_template(parse_t(text)) == text);
  }
}

TEST_CASE("random structures and instances round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 40; ++i) {
    Structure s = oracle::random_structure(2 + i % 3, {1, 2, 3}, 0.4, rng);
    CHECK(parse_t(emit_template(s)) == s);
    Instance x = oracle::random_instance(s, 5, 8, rng);
    CHECK(parse_i(emit_instance(x), s.signature) == x);
  }
}

TEST_CASE("instances are reordered to the template signature") {
  Structure h = fx::horn();
  Instance x = parse_i("variables 3\nrel imp 2\n0 1\nrel U1 1\n2\n", h.signature);
  CHECK(x.signature == h.signature);
  CHECK(x.table("imp") == Table{{0, 1}});
  CHECK(x.table("U1") == Table{{2}});
  CHECK(x.table("U0").empty());
}

TEST_CASE("parse errors carry positions") {
  auto e = parse_error_of([] { parse_t("domain 2\nrel E 2\n0 1\n1 0 1\n"); });
  CHECK(e.line == 4);

  e = parse_error_of([] { parse_t("domain 2\nrel E 2\n0 2\n"); });
  CHECK(e.line == 3);

  e = parse_error_of([] { parse_t("rel E 2\n"); });
  CHECK(e.line == 1);

  Structure k2 = fx::by_name("k2");
  e = parse_error_of([&] { parse_i("variables 2\nrel E 2\n0 1\nrel F 1\n0\n", k2.signature); });
  CHECK(e.line == 4);

  e = parse_error_of([&] { parse_i("variables 2\nrel E 3\n", k2.signature); });
  CHECK(e.line == 2);

  e = parse_error_of([&] { parse_i("variables 2\nrel E 2\n0 x\n", k2.signature); });
  CHECK(e.line == 3);
  CHECK(e.column == 3);
}

TEST_CASE("operation tables as nested arrays") {
  Operation maj = ops::majority();
  Json j = operation_to_json(maj);
  CHECK(j.dump() == "[[[0,0],[0,1]],[[0,1],[1,1]]]");
  CHECK(operation_from_json(j, 2) == maj);
  for (int d = 2; d <= 4; ++d) CHECK(operation_from_json(operation_to_json(ops::dual_discriminator(d)), d) ==
                                     ops::dual_discriminator(d));
  CHECK_THROWS_AS(operation_from_json(Json::parse("[[0,1],[1]]"), 2), InvalidInput);
  CHECK_THROWS_AS(operation_from_json(Json::parse("[[0,1],[1,2]]"), 2), InvalidInput);
}

TEST_CASE("classify reports verify, and tampering is caught") {
  for (const char* name : {"horn", "2sat", "k3", "f2_3"}) {
    CAPTURE(name);
    Structure s = fx::by_name(name);
    Json r = classify_report(classify_template(s, name), s);
    CHECK(verify_report(r).ok());
  }
  Structure h = fx::horn();
  Json r = classify_report(classify_template(h, "horn"), h);
  REQUIRE(r.contains("siggers"));
  auto& ops = r["siggers"]["operations"];
  auto& table = ops.begin().value();
  // Flip one entry of the Siggers operation.
  Json* leaf = &table;
  while (leaf->is_array()) leaf = &(*leaf)[leaf->size() - 1];
  *leaf = 1 - leaf->get<int>();
  CHECK_FALSE(verify_report(r).ok());

  Structure k3 = fx::by_name("k3");
  Json rk = classify_report(classify_template(k3, "k3"), k3);
  rk["graph"]["odd_cycle"] = {0, 1, 0};
  CHECK_FALSE(verify_report(rk).ok());
}

TEST_CASE("gadget and solve reports verify") {
  Gadget g = inverter();
  Json r = gadget_report(g, verify_gadget(g, {}, true));
  ReportCheck c = verify_report(r);
  CHECK(c.ok());
  CHECK(c.checked == 2 * 243);
  r["transcript"][5]["extends"] = !r["transcript"][5]["extends"].get<bool>();
  CHECK_FALSE(verify_report(r).ok());

  Structure h = fx::horn();
  Instance x = parse_i("variables 3\nrel U1 1\n0\nrel imp 2\n0 1\n1 2\n", h.signature);
  Json s = solve_report(solve(x, h), h, x);
  CHECK(verify_report(s).ok());
  s["solution"] = {0, 0, 0};
  CHECK_FALSE(verify_report(s).ok());
}

TEST_CASE("construction chains from JSON") {
  Json chain = Json::parse(R"({"base": {"fixture": "k3"}, "steps": [{"kind": "singleton"}]})");
  SimpleConstruction c = construction_from_json(chain);
  CHECK(c.base == fx::by_name("k3"));
  CHECK(c.target() == fx::with_singletons(fx::by_name("k3")));

  Structure k3s = c.target();
  Instance x = parse_i("variables 3\nrel E 2\n0 1\n1 2\nrel c0 1\n0\n2\n", k3s.signature);
  ReductionCertificate cert = compile(x, c);
  auto h = find_homomorphism(cert.output(), cert.steps.back().output_template);
  CHECK(h.has_value() == oracle::solvable(x, k3s));
  Json r = reduce_report(cert, k3s, x, h);
  CHECK(verify_report(r).ok());

  CHECK_THROWS_AS(construction_from_json(Json::parse(R"({"base": {"fixture": "k3"}, "steps": [{"kind": "teleport"}]})")),
                  InvalidInput);
  CHECK_THROWS(construction_from_json(Json::parse(R"({"steps": []})")));
}

TEST_CASE("reports of an unknown kind are rejected") {
  CHECK_THROWS_AS(verify_report(Json::parse(R"({"kind": "mystery"})")), InvalidInput);
}
