#include "polycsp/report.hpp"

#include <algorithm>
#include <sstream>

#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"
#include "polycsp/io.hpp"

namespace polycsp {

Json operation_to_json(const Operation& op) {
  std::function<Json(Tuple&, int)> build = [&](Tuple& prefix, int depth) -> Json {
    if (depth == op.arity) return op(prefix);
    Json arr = Json::array();
    for (int a = 0; a < op.domain_size; ++a) {
      prefix.push_back(a);
      arr.push_back(build(prefix, depth + 1));
      prefix.pop_back();
    }
    return arr;
  };
  Tuple prefix;
  return build(prefix, 0);
}

Operation operation_from_json(const Json& j, int domain_size) {
  int arity = 0;
  for (const Json* p = &j; p->is_array(); p = &(*p)[0]) {
    if (p->empty()) throw InvalidInput("operation table has an empty level");
    ++arity;
  }
  Operation op;
  op.domain_size = domain_size;
  op.arity = arity;
  std::function<void(const Json&, int)> walk = [&](const Json& node, int depth) {
    if (depth == arity) {
      if (!node.is_number_integer()) throw InvalidInput("operation table entry is not an integer");
      int v = node.get<int>();
      if (v < 0 || v >= domain_size) throw InvalidInput("operation table entry out of range");
      op.table.push_back(v);
      return;
    }
    if (!node.is_array() || static_cast<int>(node.size()) != domain_size)
      throw InvalidInput("operation table is not a full " + std::to_string(domain_size) + "-ary tree");
    for (const auto& child : node) walk(child, depth + 1);
  };
  walk(j, 0);
  return op;
}

namespace {

Json lift_json(const Lift& l) {
  return {{"instance", emit_instance(l.instance)},
          {"lift_map", l.lift_map},
          {"acyclic", l.claimed_acyclic},
          {"distinguished", l.distinguished ? Json(*l.distinguished) : Json(nullptr)},
          {"fiber", l.fiber},
          {"notes", l.notes}};
}

Structure template_of(const Json& j) {
  if (j.is_object() && j.contains("fixture")) return fixtures::by_name(j["fixture"].get<std::string>());
  if (!j.is_string()) throw InvalidInput("template must be text or {\"fixture\": name}");
  std::istringstream in(j.get<std::string>());
  return parse_template(in);
}

Instance instance_of(const Json& j, const Signature& sig) {
  std::istringstream in(j.get<std::string>());
  return parse_instance(in, sig);
}

SimpleFormula formula_of(const Json& j) {
  SimpleFormula f;
  f.free_vars = j.value("free", std::vector<std::string>{});
  f.bound_vars = j.value("bound", std::vector<std::string>{});
  for (const auto& a : j.value("atoms", Json::array()))
    f.atoms.push_back({a.at(0).get<std::string>(), a.at(1).get<std::vector<int>>()});
  for (const auto& e : j.value("equalities", Json::array()))
    f.equalities.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  f.pp_mode = j.value("pp", false);
  return f;
}

}  // namespace

Json classify_report(const Verdict& v, const Structure& s) {
  Json r;
  r["kind"] = "classify";
  r["template"] = {{"id", v.template_id}, {"text", emit_template(s)}};
  r["tractable"] = to_string(v.tractable);
  if (v.siggers) {
    Json ops = Json::object();
    for (const auto& [name, op] : v.siggers->operations) ops[name] = operation_to_json(op);
    r["siggers"] = {{"structure", emit_template(v.expanded_core)},
                    {"operations", ops},
                    {"certificate", v.siggers->certificate}};
  }
  r["core_elements"] = v.core_elements;
  Json w = {{"answer", to_string(v.width1.answer)}, {"arity", v.width1.arity}, {"note", v.width1.note}};
  if (v.width1.extractor)
    w["set_function"] = {{"domain_size", v.width1.extractor->set_function.domain_size},
                         {"arity", v.width1.extractor->set_function.arity},
                         {"by_set", v.width1.extractor->set_function.by_set}};
  r["width1"] = w;
  r["dual_discriminator"] = to_string(v.dual_discriminator);
  if (v.boolean) {
    Json b = {{"bucket", static_cast<int>(v.boolean->bucket)}, {"name", to_string(v.boolean->bucket)}};
    if (v.boolean->witness) {
      b["operation_name"] = v.boolean->operation;
      b["operation"] = operation_to_json(*v.boolean->witness);
    }
    r["boolean"] = b;
  }
  if (v.graph)
    r["graph"] = {{"bipartite", v.graph->bipartite},
                  {"odd_cycle", v.graph->odd_cycle},
                  {"core_size", v.graph->core_size},
                  {"siggers", v.graph->siggers}};
  if (v.smooth)
    r["smooth_digraph"] = {{"tractable", v.smooth->tractable},
                           {"cycle_union", v.smooth->cycle_union},
                           {"core_elements", v.smooth->core_elements},
                           {"siggers", to_string(v.smooth->siggers)}};
  r["labels"] = v.labels;
  r["evidence"] = v.evidence;
  return r;
}

Json gadget_report(const Gadget& g, const GadgetVerdict& v) {
  Json r;
  r["kind"] = "gadget";
  r["gadget"] = g.name;
  r["graph"] = to_edge_list(g.graph);
  r["coding_edges"] = g.coding_edges;
  r["pass"] = v.pass;
  r["patterns"] = v.patterns;
  r["searched"] = v.searched;
  if (v.counterexample)
    r["counterexample"] = {{"pattern", *v.counterexample}, {"admitted", v.counterexample_admitted}};
  Json t = Json::array();
  for (const auto& [p, ext] : v.transcript) t.push_back({{"pattern", p}, {"extends", ext}, {"admitted", g.admits(p)}});
  r["transcript"] = t;
  return r;
}

Json solve_report(const SolveResult& res, const Structure& s, const Instance& x) {
  Json r;
  r["kind"] = "solve";
  r["template"] = {{"text", emit_template(s)}};
  r["instance"] = emit_instance(x);
  r["method"] = res.method;
  r["solvable"] = res.solution.has_value();
  r["solution"] = res.solution ? Json(*res.solution) : Json(nullptr);
  r["notes"] = res.notes;
  return r;
}

Json obstruct_report(const Structure& s, const Instance& x, const std::optional<Lift>& lift,
                     const std::string& kind) {
  Json r;
  r["kind"] = "obstruct";
  r["template"] = {{"text", emit_template(s)}};
  r["instance"] = emit_instance(x);
  r["obstruction"] = kind;
  r["lift"] = lift ? lift_json(*lift) : Json(nullptr);
  return r;
}

Json reduce_report(const ReductionCertificate& cert, const Structure& input_template,
                   const Instance& x, const std::optional<Assignment>& output_solution) {
  Json r;
  r["kind"] = "reduce";
  r["template"] = {{"text", emit_template(input_template)}};
  r["instance"] = emit_instance(x);
  const auto& last = cert.steps.back();
  r["output_template"] = emit_template(last.output_template);
  r["output"] = emit_instance(cert.output());
  Json steps = Json::array();
  for (const auto& st : cert.steps)
    steps.push_back({{"kind", st.kind}, {"multiplier", st.multiplier}, {"notes", st.notes}});
  r["steps"] = steps;
  r["multiplier"] = cert.multiplier;
  r["input_degree"] = cert.input_degree;
  r["output_degree"] = cert.output_degree;
  r["solvable"] = output_solution.has_value();
  if (output_solution) {
    r["output_solution"] = *output_solution;
    r["input_solution"] = pullback_solution(*output_solution, cert);
  }
  r["notes"] = cert.notes;
  return r;
}

SimpleConstruction construction_from_json(const Json& j, const SearchOptions& opts) {
  SimpleConstruction c;
  c.base = template_of(j.at("base"));
  Structure current = c.base;
  for (const auto& st : j.value("steps", Json::array())) {
    const std::string kind = st.at("kind").get<std::string>();
    if (kind == "singleton") {
      c.steps.push_back(SingletonExpansion{});
      current = fixtures::with_singletons(current);
    } else if (kind == "hom-equivalence") {
      Structure target = template_of(st.at("target"));
      HomEquivalence eq;
      if (st.contains("to_target")) {
        eq = {target, st["to_target"].get<Assignment>(), st.at("from_target").get<Assignment>()};
      } else {
        auto found = hom_equivalence(current, target, opts);
        if (!found) throw InvalidInput("templates in a hom-equivalence step are not equivalent");
        eq = *found;
      }
      c.steps.push_back(eq);
      current = target;
    } else if (kind == "definitional") {
      Structure target = template_of(st.at("target"));
      std::vector<SimpleFormula> fs;
      for (const auto& f : st.at("formulas")) fs.push_back(formula_of(f));
      c.steps.push_back(definitional_expansion(current, target, fs));
      current = target;
    } else if (kind == "interpretation") {
      SimpleInterpretation in;
      in.target = template_of(st.at("target"));
      in.dimension = st.at("dimension").get<int>();
      in.domain_formula = formula_of(st.at("domain_formula"));
      for (const auto& q : st.at("quotient")) in.quotient_map[q.at(0).get<Tuple>()] = q.at(1).get<int>();
      for (const auto& f : st.at("preimage")) in.preimage.push_back(formula_of(f));
      c.steps.push_back(in);
      current = in.target;
    } else {
      throw InvalidInput("unknown construction step '" + kind + "'");
    }
  }
  return c;
}

ReportCheck verify_report(const Json& report, const Caps& caps) {
  ReportCheck out;
  auto check = [&](bool ok, const std::string& what) {
    ++out.checked;
    if (!ok) out.failures.push_back(what);
  };
  const std::string kind = report.at("kind").get<std::string>();
  if (kind == "classify") {
    Structure s = template_of(report.at("template").at("text"));
    if (report.contains("siggers")) {
      Structure t = template_of(report["siggers"].at("structure"));
      std::map<std::string, Operation> ops;
      for (const auto& [name, table] : report["siggers"].at("operations").items())
        ops[name] = operation_from_json(table, t.domain_size);
      bool pres = true;
      for (const auto& [name, op] : ops) pres = pres && preserves(op, t);
      check(pres, "Siggers operation does not preserve the expanded core");
      check(satisfies(ops, identities::siggers()), "Siggers identity fails");
      // Dropping the singleton relations must leave a template equivalent to s.
      Structure stripped(t.domain_size, s.signature);
      for (std::size_t r = 0; r < s.tables.size() && r < t.tables.size(); ++r) stripped.tables[r] = t.tables[r];
      check(t.signature.size() == s.signature.size() + static_cast<std::size_t>(t.domain_size) &&
                hom_equivalent(stripped, s, {caps}),
            "expanded core is not equivalent to the template");
    }
    if (report.at("width1").contains("set_function")) {
      const auto& j = report["width1"]["set_function"];
      SetFunction f{j.at("domain_size").get<int>(), j.at("arity").get<int>(),
                    j.at("by_set").get<std::vector<int>>()};
      check(set_function_preserves(f, s, caps), "width-1 extractor does not preserve the template");
    }
    if (report.at("dual_discriminator") == "yes")
      check(preserves(ops::dual_discriminator(s.domain_size), s), "dual discriminator is not a polymorphism");
    if (report.contains("graph") && !report["graph"].at("bipartite").get<bool>()) {
      auto walk = report["graph"].at("odd_cycle").get<std::vector<int>>();
      bool ok = walk.size() >= 2 && walk.size() % 2 == 0 && walk.front() == walk.back() && !s.tables.empty();
      for (std::size_t i = 0; ok && i + 1 < walk.size(); ++i) ok = std::binary_search(s.tables[0].begin(), s.tables[0].end(), Tuple{walk[i], walk[i + 1]});
      check(ok, "odd_cycle is not a closed walk of odd length");
    }
    if (report.contains("boolean") && report["boolean"].contains("operation"))
      check(preserves(operation_from_json(report["boolean"]["operation"], 2), s),
            "boolean bucket operation is not a polymorphism");
  } else if (kind == "gadget") {
    std::istringstream in(report.at("graph").get<std::string>());
    Graph g = parse_edge_list(in);
    auto coding = report.at("coding_edges").get<std::vector<int>>();
    for (const auto& e : report.at("transcript")) {
      EdgeColoring partial(g.edges.size(), -1);
      auto p = e.at("pattern").get<Tuple>();
      for (std::size_t i = 0; i < p.size(); ++i) partial.at(coding.at(i)) = p[i];
      bool ext = extend_edge_coloring(g, partial, caps).has_value();
      check(ext == e.at("extends").get<bool>(), "transcript entry does not match the graph");
      if (report.at("pass").get<bool>())
        check(ext == e.at("admitted").get<bool>(), "passing transcript has a mismatch");
    }
    if (report.contains("counterexample")) {
      EdgeColoring partial(g.edges.size(), -1);
      auto p = report["counterexample"].at("pattern").get<Tuple>();
      for (std::size_t i = 0; i < p.size(); ++i) partial.at(coding.at(i)) = p[i];
      bool ext = extend_edge_coloring(g, partial, caps).has_value();
      check(ext != report["counterexample"].at("admitted").get<bool>(), "counterexample is not one");
    }
  } else if (kind == "solve") {
    Structure s = template_of(report.at("template").at("text"));
    Instance x = instance_of(report.at("instance"), s.signature);
    if (report.at("solvable").get<bool>())
      check(is_homomorphism(report.at("solution").get<Assignment>(), x, s), "solution does not verify");
    else
      check(!find_homomorphism(x, s, {}, {caps}), "instance reported unsolvable has a solution");
  } else if (kind == "obstruct") {
    Structure s = template_of(report.at("template").at("text"));
    Instance x = instance_of(report.at("instance"), s.signature);
    if (!report.at("lift").is_null()) {
      const auto& j = report["lift"];
      Lift l;
      l.instance = instance_of(j.at("instance"), s.signature);
      l.lift_map = j.at("lift_map").get<std::vector<int>>();
      l.claimed_acyclic = j.at("acyclic").get<bool>();
      check(verify_lift(l, x), "lift does not map onto the instance");
      if (l.claimed_acyclic) check(is_acyclic(l.instance), "lift is not acyclic");
      if (report.at("obstruction") == "acyclic")
        check(!find_homomorphism(l.instance, s, {}, {caps}), "acyclic lift is solvable");
    }
  } else if (kind == "reduce") {
    Structure s = template_of(report.at("template").at("text"));
    Instance x = instance_of(report.at("instance"), s.signature);
    Structure d = template_of(report.at("output_template"));
    Instance y = instance_of(report.at("output"), d.signature);
    if (report.at("solvable").get<bool>()) {
      check(is_homomorphism(report.at("output_solution").get<Assignment>(), y, d), "output solution does not verify");
      check(is_homomorphism(report.at("input_solution").get<Assignment>(), x, s), "input solution does not verify");
    } else {
      check(!find_homomorphism(y, d, {}, {caps}), "output reported unsolvable has a solution");
      check(!find_homomorphism(x, s, {}, {caps}), "input has a solution but the output has none");
    }
  } else {
    throw InvalidInput("unknown report kind '" + kind + "'");
  }
  return out;
}

}  // namespace polycsp
