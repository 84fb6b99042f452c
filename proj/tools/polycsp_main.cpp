// polycsp command-line front end.
//
// Exit status: 0 success, 1 negative verdict or unsolvable, 2 usage or input
// error, 3 a cap refused the computation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "polycsp/classify.hpp"
#include "polycsp/compiler.hpp"
#include "polycsp/consistency.hpp"
#include "polycsp/duality.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"
#include "polycsp/gadgets.hpp"
#include "polycsp/io.hpp"
#include "polycsp/report.hpp"

using namespace polycsp;

namespace {

struct Options {
  std::vector<std::string> caps;
  std::uint64_t seed_order = 0;
  std::string json_path;
  SearchOptions search;
};

Structure load_template(const std::string& arg) {
  if (std::filesystem::exists(arg)) return read_template_file(arg);
  for (const auto& n : fixtures::catalog())
    if (n.name == arg) return n.structure;
  throw InvalidInput("no template file or fixture named '" + arg + "'");
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

void write_json(const Options& o, const Json& j) {
  if (o.json_path.empty()) return;
  std::ofstream out(o.json_path);
  if (!out) throw InvalidInput("cannot write " + o.json_path);
  out << j.dump(2) << '\n';
}

int exit_for(Answer a) { return a == Answer::Yes ? 0 : a == Answer::No ? 1 : 3; }

int cmd_classify(const Options& o, const std::string& path) {
  Structure s = load_template(path);
  Verdict v = classify_template(s, std::filesystem::path(path).stem().string(), o.search);
  std::cout << "template: " << v.template_id << '\n';
  std::cout << "tractable: " << to_string(v.tractable) << '\n';
  std::cout << "width1: " << to_string(v.width1.answer) << " (arity " << v.width1.arity << ")\n";
  std::cout << "dual_discriminator: " << to_string(v.dual_discriminator) << '\n';
  if (v.boolean)
    std::cout << "boolean_bucket: " << static_cast<int>(v.boolean->bucket) << ' ' << to_string(v.boolean->bucket)
              << '\n';
  else
    std::cout << "boolean_bucket: not-boolean\n";
  if (v.graph) std::cout << "graph: " << (v.graph->bipartite ? "bipartite" : "not bipartite") << '\n';
  if (v.smooth) std::cout << "smooth_digraph: " << (v.smooth->tractable ? "tractable" : "intractable") << '\n';
  for (const auto& l : v.labels) std::cout << "label: " << l << '\n';
  for (const auto& e : v.evidence) std::cout << "evidence: " << e << '\n';
  write_json(o, classify_report(v, s));
  return exit_for(v.tractable);
}

int cmd_solve(const Options& o, const std::string& tpath, const std::string& ipath) {
  Structure s = load_template(tpath);
  Instance x = read_instance_file(ipath, s.signature);
  SolveResult r = solve(x, s, o.search);
  std::cout << "method: " << r.method << '\n';
  if (r.solution)
    std::cout << "solution: " << join(*r.solution) << '\n';
  else
    std::cout << "unsolvable\n";
  write_json(o, solve_report(r, s, x));
  return r.solution ? 0 : 1;
}

int cmd_reduce(const Options& o, const std::string& chain_path, const std::string& ipath) {
  std::ifstream in(chain_path);
  if (!in) throw InvalidInput("cannot open " + chain_path);
  Json chain;
  try {
    chain = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, e.byte, e.what());
  }
  SimpleConstruction c = construction_from_json(chain, o.search);
  Structure t = c.target();
  Instance x = read_instance_file(ipath, t.signature);
  ReductionCertificate cert = compile(x, c, o.search);
  const Structure& d = cert.steps.back().output_template;
  auto h = find_homomorphism(cert.output(), d, {}, o.search);
  std::cout << "steps: " << cert.steps.size() << '\n';
  std::cout << "degree: " << cert.input_degree << " -> " << cert.output_degree << " (bound "
            << cert.multiplier * std::max<std::size_t>(cert.input_degree, 1) << ")\n";
  std::cout << emit_instance(cert.output());
  std::cout << (h ? "solvable" : "unsolvable") << '\n';
  write_json(o, reduce_report(cert, t, x, h));
  return h ? 0 : 1;
}

int cmd_obstruct(const Options& o, const std::string& tpath, const std::string& ipath) {
  Structure s = load_template(tpath);
  Instance x = read_instance_file(ipath, s.signature);
  Witness w = ac_closure(x, s, Witness::empty(x.domain_size, s.domain_size), o.seed_order);
  std::optional<Lift> lift;
  std::string kind = "none";
  if (!w.good()) {
    lift = unsolvable_acyclic_lift(x, s, o.search);
    kind = "acyclic";
  } else if (!find_homomorphism(x, s, {}, o.search)) {
    auto audit = cycle_consistency_audit(x, s, w, static_cast<std::size_t>(x.domain_size), o.search.caps);
    if (!audit.pass) {
      lift = cycle_obstruction_lift(x, s, *audit.path, o.search);
      kind = "cycle";
    }
  }
  write_json(o, obstruct_report(s, x, lift, kind));
  if (!lift) {
    std::cout << (kind == "none" && w.good() ? "no obstruction found\n" : "no obstruction\n");
    return 1;
  }
  std::cout << "obstruction: " << kind << " lift with " << lift->instance.domain_size << " variables\n";
  std::cout << emit_instance(lift->instance);
  std::cout << "lift_map: " << join(lift->lift_map) << '\n';
  if (lift->distinguished)
    std::cout << "fiber over " << *lift->distinguished << ": " << join(lift->fiber)
              << " (no solution is constant on it)\n";
  return 0;
}

Gadget gadget_by_name(const std::string& name, const Caps& caps) {
  if (name == "inverter") return inverter();
  if (name == "or") return or_gate();
  if (name == "or-drawn") return or_gate_as_drawn();
  if (name.rfind("setter-", 0) == 0) return variable_setter(std::stoi(name.substr(7)), caps);
  throw InvalidInput("unknown gadget '" + name + "' (inverter, or, or-drawn, setter-N)");
}

int cmd_gadget_verify(const Options& o, const std::string& name) {
  Gadget g = gadget_by_name(name, o.search.caps);
  GadgetVerdict v = verify_gadget(g, o.search.caps, true);
  for (const auto& [p, ext] : v.transcript)
    std::cout << join(p) << ' ' << (ext ? "extends" : "blocked") << (ext == g.admits(p) ? "" : " MISMATCH") << '\n';
  std::cout << g.name << ": " << (v.pass ? "PASS" : "FAIL") << " over " << v.patterns << " patterns\n";
  if (v.counterexample)
    std::cout << "counterexample: " << join(*v.counterexample)
              << (v.counterexample_admitted ? " (admitted, does not extend)" : " (extends, not admitted)") << '\n';
  write_json(o, gadget_report(g, v));
  return v.pass ? 0 : 1;
}

int cmd_gadget_build(const Options& o, const std::string& what) {
  if (!std::filesystem::exists(what)) {
    Gadget g = gadget_by_name(what, o.search.caps);
    std::cout << "# coding edges: " << join(g.coding_edges) << '\n' << to_edge_list(g.graph);
    return 0;
  }
  std::ifstream in(what);
  CNFInstance phi = parse_dimacs(in);
  SatReduction r = reduce_3sat(phi, o.search.caps);
  std::cout << to_edge_list(r.graph);
  if (!o.json_path.empty()) {
    Json j;
    j["kind"] = "gadget-build";
    j["graph"] = to_edge_list(r.graph);
    Json copies = Json::array();
    for (const auto& c : r.record.copies)
      copies.push_back({{"kind", c.kind}, {"first_vertex", c.first_vertex}, {"vertex_count", c.vertex_count}});
    j["copies"] = copies;
    j["setter_pairs"] = r.record.setter_pairs;
    j["gate_pairs"] = r.record.gate_pairs;
    write_json(o, j);
  }
  return 0;
}

int cmd_fixtures_list() {
  for (const auto& n : fixtures::catalog()) std::cout << n.name << '\t' << n.note << '\n';
  return 0;
}

int cmd_fixtures_emit(const std::string& name) {
  std::cout << emit_template(fixtures::by_name(name));
  return 0;
}

int cmd_verify_report(const Options& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, e.byte, e.what());
  }
  ReportCheck c = verify_report(j, o.search.caps);
  for (const auto& f : c.failures) std::cout << "FAIL: " << f << '\n';
  std::cout << c.checked << " checks, " << c.failures.size() << " failures\n";
  return c.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polymorphism and CSP toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--cap", o.caps, "Override a size cap, NAME=VALUE (repeatable)");
  app.add_option("--seed-order", o.seed_order, "Shuffle seed for arc-consistency worklists");
  app.add_option("--json", o.json_path, "Write a JSON report to this path");

  std::string a1, a2;
  int status = 0;
  std::function<int()> run;

  auto* classify = app.add_subcommand("classify", "Classify a template");
  classify->add_option("template", a1)->required();
  classify->callback([&] { run = [&] { return cmd_classify(o, a1); }; });

  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("template", a1)->required();
  solve_cmd->add_option("instance", a2)->required();
  solve_cmd->callback([&] { run = [&] { return cmd_solve(o, a1, a2); }; });

  auto* reduce = app.add_subcommand("reduce", "Compile an instance along a construction chain");
  reduce->add_option("chain", a1)->required();
  reduce->add_option("instance", a2)->required();
  reduce->callback([&] { run = [&] { return cmd_reduce(o, a1, a2); }; });

  auto* obstruct = app.add_subcommand("obstruct", "Emit an obstruction lift for an unsolvable instance");
  obstruct->add_option("template", a1)->required();
  obstruct->add_option("instance", a2)->required();
  obstruct->callback([&] { run = [&] { return cmd_obstruct(o, a1, a2); }; });

  auto* gadget = app.add_subcommand("gadget", "Edge-coloring gadgets");
  gadget->require_subcommand(1);
  gadget->fallthrough();
  auto* gverify = gadget->add_subcommand("verify", "Verify a gadget against its predicate");
  gverify->add_option("name", a1)->required();
  gverify->callback([&] { run = [&] { return cmd_gadget_verify(o, a1); }; });
  auto* gbuild = gadget->add_subcommand("build", "Print a gadget, or the reduction of a DIMACS file");
  gbuild->add_option("what", a1)->required();
  gbuild->callback([&] { run = [&] { return cmd_gadget_build(o, a1); }; });

  auto* fx = app.add_subcommand("fixtures", "Built-in templates");
  fx->require_subcommand(1);
  fx->fallthrough();
  fx->add_subcommand("list", "List fixture names")->callback([&] { run = [] { return cmd_fixtures_list(); }; });
  auto* emit = fx->add_subcommand("emit", "Print a fixture as a template file");
  emit->add_option("name", a1)->required();
  emit->callback([&] { run = [&] { return cmd_fixtures_emit(a1); }; });

  auto* vr = app.add_subcommand("verify-report", "Re-verify the witnesses in a JSON report");
  vr->add_option("report", a1)->required();
  vr->callback([&] { run = [&] { return cmd_verify_report(o, a1); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    o.search.caps = Caps::from_env();
    for (const auto& c : o.caps) {
      auto eq = c.find('=');
      if (eq == std::string::npos) throw InvalidInput("--cap expects NAME=VALUE");
      std::size_t value = std::stoull(c.substr(eq + 1));
      if (!o.search.caps.set(c.substr(0, eq), value)) throw InvalidInput("unknown cap '" + c.substr(0, eq) + "'");
    }
    status = run();
  } catch (const CapExceeded& e) {
    std::cerr << "cap refused: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const SignatureMismatch& e) {
    std::cerr << "signature mismatch: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
