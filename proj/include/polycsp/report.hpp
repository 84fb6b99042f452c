#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "polycsp/classify.hpp"
#include "polycsp/compiler.hpp"
#include "polycsp/duality.hpp"
#include "polycsp/gadgets.hpp"

namespace polycsp {

using Json = nlohmann::ordered_json;

/// Nested arrays, first argument outermost.
Json operation_to_json(const Operation& op);
/// Arity is the nesting depth; every leaf must lie in the domain.
Operation operation_from_json(const Json& j, int domain_size);

Json classify_report(const Verdict& v, const Structure& s);
Json gadget_report(const Gadget& g, const GadgetVerdict& v);
Json solve_report(const SolveResult& r, const Structure& s, const Instance& x);
Json obstruct_report(const Structure& s, const Instance& x, const std::optional<Lift>& lift,
                     const std::string& kind);
Json reduce_report(const ReductionCertificate& cert, const Structure& input_template,
                   const Instance& x, const std::optional<Assignment>& output_solution);

/// Construction chain document:
///   {"base": T, "steps": [S...]} with T a template text or {"fixture": name}
/// and S one of
///   {"kind": "singleton"}
///   {"kind": "hom-equivalence", "target": T}   (maps optional)
///   {"kind": "definitional", "target": T, "formulas": [F...]}
///   {"kind": "interpretation", "target": T, "dimension": n,
///    "domain_formula": F, "quotient": [[tuple, value]...], "preimage": [F...]}
/// F = {"free": [...], "bound": [...], "atoms": [[name, [vars]]...],
///      "equalities": [[i, j]...], "pp": bool}.
SimpleConstruction construction_from_json(const Json& j, const SearchOptions& opts = {});

struct ReportCheck {
  std::size_t checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Re-verifies every witness carried by a report from its own contents.
ReportCheck verify_report(const Json& report, const Caps& caps = {});

}  // namespace polycsp
