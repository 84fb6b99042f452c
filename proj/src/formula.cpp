#include "polycsp/formula.hpp"

#include <numeric>
#include <sstream>

#include "polycsp/errors.hpp"
#include "polycsp/polymorphism.hpp"

namespace polycsp {

std::size_t SimpleFormula::weight() const {
  std::size_t w = 0;
  for (const auto& a : atoms) w += a.vars.size();
  return w;
}

void SimpleFormula::validate(const Signature& sig) const {
  const int n = variable_count();
  for (const auto& a : atoms) {
    auto idx = sig.index_of(a.relation);
    if (!idx) throw InvalidInput("formula uses unknown relation " + a.relation);
    if (static_cast<int>(a.vars.size()) != sig.relations[*idx].arity)
      throw InvalidInput("formula atom " + a.relation + " has the wrong arity");
    for (int v : a.vars)
      if (v < 0 || v >= n) throw InvalidInput("formula atom names an undeclared variable");
  }
  if (!equalities.empty() && !pp_mode) throw InvalidInput("equality atom in a simple formula");
  for (auto [a, b] : equalities)
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw InvalidInput("equality names an undeclared variable");
}

std::string to_string(const SimpleFormula& f) {
  std::ostringstream out;
  auto name = [&](int v) {
    int nf = static_cast<int>(f.free_vars.size());
    return v < nf ? f.free_vars[v] : f.bound_vars[v - nf];
  };
  out << "(";
  for (std::size_t i = 0; i < f.free_vars.size(); ++i) out << (i ? "," : "") << f.free_vars[i];
  out << ") :: ";
  if (!f.bound_vars.empty()) {
    out << "exists";
    for (const auto& b : f.bound_vars) out << " " << b;
    out << ". ";
  }
  bool first = true;
  for (const auto& a : f.atoms) {
    out << (first ? "" : " & ") << a.relation << "(";
    for (std::size_t i = 0; i < a.vars.size(); ++i) out << (i ? "," : "") << name(a.vars[i]);
    out << ")";
    first = false;
  }
  for (auto [a, b] : f.equalities) {
    out << (first ? "" : " & ") << name(a) << "=" << name(b);
    first = false;
  }
  if (first) out << "true";
  return out.str();
}

namespace {

// Instance over s for the formula, equalities merged away. rep[v] is the
// instance variable standing for formula variable v.
Instance formula_instance(const Structure& s, const SimpleFormula& f, std::vector<int>& rep) {
  f.validate(s.signature);
  const int n = f.variable_count();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (auto [a, b] : f.equalities) parent[find(a)] = find(b);
  rep.assign(n, -1);
  std::vector<int> id(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    if (id[r] < 0) id[r] = next++;
    rep[v] = id[r];
  }
  Instance x(next, s.signature);
  for (const auto& a : f.atoms) {
    Tuple t;
    for (int v : a.vars) t.push_back(rep[v]);
    x.table(a.relation).push_back(std::move(t));
  }
  x.canonicalize();
  return x;
}

std::optional<Assignment> solve_with_free(const Structure& s, const SimpleFormula& f,
                                          const Tuple& args, const SearchOptions& opts,
                                          std::vector<int>& rep) {
  if (args.size() != f.free_vars.size()) throw InvalidInput("formula argument count mismatch");
  Instance x = formula_instance(s, f, rep);
  PartialAssignment seed(x.domain_size);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] < 0 || args[i] >= s.domain_size) throw InvalidInput("formula argument out of range");
    auto& slot = seed[rep[i]];
    if (slot && *slot != args[i]) return std::nullopt;
    slot = args[i];
  }
  SearchOptions lex = opts;
  lex.order = VarOrder::Lex;
  return find_homomorphism(x, s, seed, lex);
}

}  // namespace

bool evaluate_formula(const Structure& s, const SimpleFormula& f, const Tuple& args,
                      const SearchOptions& opts) {
  std::vector<int> rep;
  return solve_with_free(s, f, args, opts, rep).has_value();
}

std::optional<Tuple> formula_witness(const Structure& s, const SimpleFormula& f,
                                     const Tuple& args, const SearchOptions& opts) {
  std::vector<int> rep;
  auto sol = solve_with_free(s, f, args, opts, rep);
  if (!sol) return std::nullopt;
  Tuple out;
  for (int v = static_cast<int>(f.free_vars.size()); v < f.variable_count(); ++v)
    out.push_back((*sol)[rep[v]]);
  return out;
}

Table formula_table(const Structure& s, const SimpleFormula& f, const SearchOptions& opts) {
  std::vector<int> rep;
  Instance x = formula_instance(s, f, rep);
  const int k = static_cast<int>(f.free_vars.size());
  if (k == 0) {
    if (find_homomorphism(x, s, {}, opts)) return {Tuple{}};
    return {};
  }
  std::vector<int> vars(rep.begin(), rep.begin() + k);
  // project() wants distinct variables; expand duplicates afterwards.
  std::vector<int> uniq = vars;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  Table out;
  for (const auto& t : project_solutions(x, s, uniq, opts)) {
    Tuple full;
    for (int v : vars) full.push_back(t[std::lower_bound(uniq.begin(), uniq.end(), v) - uniq.begin()]);
    out.push_back(std::move(full));
  }
  canonicalize(out);
  return out;
}

SimpleFormula eq_c_formula(const Structure& s, int c, const SearchOptions& opts) {
  if (c < 0 || c >= s.domain_size) throw InvalidInput("element out of range");
  if (find_core(s, opts).core.domain_size != s.domain_size)
    throw InvalidInput("eq_c_formula needs a core");
  SimpleFormula f;
  f.free_vars = {"a", "b"};
  // Formula variable for element d in copy 0 or 1; c is free, others shared.
  std::vector<int> var_of(s.domain_size, -1);
  for (int d = 0; d < s.domain_size; ++d) {
    if (d == c) continue;
    var_of[d] = 2 + static_cast<int>(f.bound_vars.size());
    f.bound_vars.push_back("x" + std::to_string(d));
  }
  for (int copy = 0; copy < 2; ++copy)
    for (std::size_t r = 0; r < s.tables.size(); ++r)
      for (const auto& e : s.tables[r]) {
        Atom a{s.signature.relations[r].name, {}};
        for (int d : e) a.vars.push_back(d == c ? copy : var_of[d]);
        f.atoms.push_back(std::move(a));
      }
  return f;
}

Table orbit_diagonal(const Structure& s, int c, const SearchOptions& opts) {
  Table out;
  for (const auto& h : all_homomorphisms(s, s, static_cast<std::size_t>(-1), opts)) {
    std::vector<int> sorted = h;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) != sorted.end()) continue;
    out.push_back({h[c], h[c]});
  }
  canonicalize(out);
  return out;
}

EquationFreeResult simple_definition_equation_free(const Structure& s, const Table& r, int k,
                                                   const SearchOptions& opts) {
  EquationFreeResult res;
  if (k < 1) throw InvalidInput("arity must be positive");
  if (r.empty()) {
    res.reason = "empty relation";
    return res;
  }
  if (auto eq = implies_equation(r, k)) {
    res.equation = eq;
    res.reason = "relation implies x" + std::to_string(eq->first) + " = x" +
                 std::to_string(eq->second);
    return res;
  }
  if (!is_pp_definable(s, r, k, opts)) {
    res.reason = "relation is not pp-definable";
    return res;
  }
  Table rows = r;
  canonicalize(rows);
  const std::size_t m = rows.size();
  const std::size_t size = checked_pow(s.domain_size, m, opts.caps.power_elements, "power_elements");
  // Columns sigma_1..sigma_k first, then every other element of D^m.
  std::vector<int> var_of(size, -1);
  SimpleFormula f;
  for (int i = 0; i < k; ++i) {
    Tuple col;
    for (const auto& row : rows) col.push_back(row[i]);
    var_of[encode_tuple(col, s.domain_size)] = i;
    f.free_vars.push_back("x" + std::to_string(i + 1));
  }
  for (std::size_t code = 0; code < size; ++code) {
    if (var_of[code] >= 0) continue;
    var_of[code] = k + static_cast<int>(f.bound_vars.size());
    f.bound_vars.push_back("x" + std::to_string(k + f.bound_vars.size() + 1));
  }
  Structure p = power(s, static_cast<int>(m), opts.caps);
  std::size_t atoms = p.tuple_count();
  if (atoms > opts.caps.indicator_constraints)
    throw CapExceeded("indicator_constraints", atoms, opts.caps.indicator_constraints);
  for (std::size_t rel = 0; rel < p.tables.size(); ++rel)
    for (const auto& t : p.tables[rel]) {
      Atom a{s.signature.relations[rel].name, {}};
      for (int e : t) a.vars.push_back(var_of[e]);
      f.atoms.push_back(std::move(a));
    }
  Table check = formula_table(s, f, opts);
  if (check != rows) throw VerificationFailure("equation-free definition does not evaluate to r");
  res.formula = std::move(f);
  return res;
}

}  // namespace polycsp
