#include "polycsp/compiler.hpp"

#include <algorithm>
#include <set>

#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"

namespace polycsp {

namespace {

std::string eq_name(int c) { return "eq" + std::to_string(c); }

// Indices of eq0..eq{n-1} in s, or an empty vector when none are present.
std::vector<std::size_t> orbit_relation_indices(const Structure& s) {
  std::vector<std::size_t> out;
  for (int c = 0; c < s.domain_size; ++c)
    if (auto i = s.signature.index_of(eq_name(c))) out.push_back(*i);
  if (!out.empty() && static_cast<int>(out.size()) != s.domain_size)
    throw InvalidInput("missing (=_c) relations: only some eqN relations are present");
  return out;
}

bool is_core(const Structure& s, const SearchOptions& opts) {
  return find_core(s, opts).core.domain_size == s.domain_size;
}

std::size_t degree(const Instance& x) { return max_occurrence(x); }

void check_degree(ReductionCertificate& cert) {
  cert.input_degree = degree(cert.steps.front().source);
  cert.output_degree = degree(cert.output());
  cert.multiplier = 1;
  for (const auto& st : cert.steps) cert.multiplier *= st.multiplier;
  // Each step satisfies out <= N * max(in, 1); the product bounds the chain.
  std::size_t in = cert.steps.front().source.domain_size ? degree(cert.steps.front().source) : 0;
  for (const auto& st : cert.steps) {
    std::size_t a = degree(st.source), b = degree(st.output);
    if (b > st.multiplier * std::max<std::size_t>(a, 1))
      throw VerificationFailure(st.kind + " step breaks the degree bound");
  }
  if (cert.output_degree > cert.multiplier * std::max<std::size_t>(in, 1))
    throw VerificationFailure("compiled instance breaks the degree bound");
}

// x is an instance of with_singletons(s); the output is over s_eq, which is s
// plus the orbit relations (or s itself when it has them).
ReductionStep singleton_step(const Instance& x, const Structure& s, const Structure& s_eq,
                             const std::vector<std::size_t>& eq_idx) {
  const Structure e = fixtures::with_singletons(s);
  require_same_signature(x, e);
  const int nx = x.domain_size, d = s_eq.domain_size;
  ReductionStep st;
  st.kind = "singleton";
  st.source = x;
  st.source_template = e;
  st.output_template = s_eq;
  Instance out(nx + nx * d, s_eq.signature);
  auto copy = [&](int v, int a) { return nx + v * d + a; };
  for (int v = 0; v < nx; ++v) st.provenance.push_back("x" + std::to_string(v));
  for (int v = 0; v < nx; ++v)
    for (int a = 0; a < d; ++a)
      st.provenance.push_back("copy(x" + std::to_string(v) + "," + std::to_string(a) + ")");

  std::vector<char> is_eq(s_eq.tables.size(), 0);
  for (auto i : eq_idx) is_eq[i] = 1;
  // Relations of s_eq keep their tuples; non-orbit relations get a copy of
  // the template on every variable.
  for (std::size_t r = 0; r < s.tables.size(); ++r) out.tables[r] = x.tables[r];
  for (std::size_t r = 0; r < s_eq.tables.size(); ++r) {
    if (is_eq[r]) continue;
    for (int v = 0; v < nx; ++v)
      for (const auto& t : s_eq.tables[r]) {
        Tuple c;
        for (int a : t) c.push_back(copy(v, a));
        out.tables[r].push_back(std::move(c));
      }
  }
  // Links between the copies of variables sharing a tuple.
  std::set<std::pair<int, int>> share;
  for (const auto& tab : x.tables)
    for (const auto& t : tab)
      for (int a : t)
        for (int b : t)
          if (a != b) share.insert({a, b});
  for (int c = 0; c < d; ++c)
    for (auto [a, b] : share) out.tables[eq_idx[c]].push_back({copy(a, c), copy(b, c)});
  // Anchors for singleton constraints.
  for (int c = 0; c < d; ++c) {
    const Table& u = x.tables[s.tables.size() + c];
    for (const auto& t : u) out.tables[eq_idx[c]].push_back({t[0], copy(t[0], c)});
  }
  out.canonicalize();
  st.output = std::move(out);

  std::size_t m = 0, arity = 1;
  for (int a = 0; a < d; ++a) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < s_eq.tables.size(); ++r) {
      if (is_eq[r]) continue;
      for (const auto& t : s_eq.tables[r]) count += std::count(t.begin(), t.end(), a);
    }
    m = std::max(m, count);
  }
  for (const auto& sym : e.signature.relations) arity = std::max<std::size_t>(arity, sym.arity);
  st.multiplier = m + 2 * arity;
  return st;
}

Assignment verify_side(const Assignment& f, const Instance& x, const Structure& s,
                       const char* what) {
  if (static_cast<int>(f.size()) != x.domain_size || !is_homomorphism(f, x, s))
    throw VerificationFailure(std::string(what) + " is not a solution");
  return f;
}

Assignment push_step(const Assignment& g, const ReductionStep& st, const SearchOptions& opts) {
  verify_side(g, st.source, st.source_template, "pushforward input");
  Assignment out(st.output.domain_size, -1);
  if (st.kind == "singleton") {
    const int nx = st.source.domain_size, d = st.output_template.domain_size;
    for (int v = 0; v < nx; ++v) {
      out[v] = g[v];
      for (int a = 0; a < d; ++a) out[nx + v * d + a] = a;
    }
  } else if (st.kind == "hom-equivalence") {
    for (std::size_t v = 0; v < g.size(); ++v) out[v] = st.from_target[g[v]];
  } else {
    const auto& in = *st.interp;
    // Least representative of each class.
    std::vector<const Tuple*> rep(in.target.domain_size, nullptr);
    for (const auto& [t, e] : in.quotient_map)
      if (!rep[e]) rep[e] = &t;
    for (std::size_t v = 0; v < g.size(); ++v)
      for (int i = 0; i < in.dimension; ++i) out[st.y[v][i]] = (*rep[g[v]])[i];
    for (const auto& b : st.blocks) {
      const SimpleFormula& f = b.formula < 0 ? in.domain_formula : in.preimage[b.formula];
      Tuple args;
      for (std::size_t i = 0; i < f.free_vars.size(); ++i) args.push_back(out[b.vars[i]]);
      auto wit = formula_witness(st.output_template, f, args, opts);
      if (!wit) throw VerificationFailure("no witness for a defining formula");
      for (std::size_t j = 0; j < wit->size(); ++j) out[b.vars[f.free_vars.size() + j]] = (*wit)[j];
    }
  }
  return verify_side(out, st.output, st.output_template, "pushforward output");
}

Assignment pull_step(const Assignment& h, const ReductionStep& st) {
  verify_side(h, st.output, st.output_template, "pullback input");
  Assignment out(st.source.domain_size);
  if (st.kind == "singleton") {
    const int nx = st.source.domain_size, d = st.output_template.domain_size;
    for (int v = 0; v < nx; ++v) {
      // h restricted to the copy of v is an automorphism; undo it.
      Assignment inv(d, -1);
      for (int a = 0; a < d; ++a) inv[h[nx + v * d + a]] = a;
      if (std::count(inv.begin(), inv.end(), -1))
        throw VerificationFailure("copy of the template is not mapped bijectively");
      out[v] = inv[h[v]];
    }
  } else if (st.kind == "hom-equivalence") {
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = st.to_target[h[v]];
  } else {
    const auto& in = *st.interp;
    for (std::size_t v = 0; v < out.size(); ++v) {
      Tuple t;
      for (int y : st.y[v]) t.push_back(h[y]);
      auto it = in.quotient_map.find(t);
      if (it == in.quotient_map.end()) throw VerificationFailure("value outside the interpreted set");
      out[v] = it->second;
    }
  }
  return verify_side(out, st.source, st.source_template, "pullback output");
}

}  // namespace

void SimpleInterpretation::validate(const Structure& source, const SearchOptions& opts) const {
  if (dimension < 1) throw InvalidInput("malformed interpretation: dimension must be positive");
  require_valid(target);
  domain_formula.validate(source.signature);
  if (static_cast<int>(domain_formula.free_vars.size()) != dimension)
    throw InvalidInput("malformed interpretation: domain formula needs n free variables");
  if (preimage.size() != target.tables.size())
    throw InvalidInput("malformed interpretation: one preimage formula per relation");
  for (std::size_t r = 0; r < preimage.size(); ++r) {
    preimage[r].validate(source.signature);
    if (static_cast<int>(preimage[r].free_vars.size()) !=
        dimension * target.signature.relations[r].arity)
      throw InvalidInput("malformed interpretation: preimage formula arity");
  }
  if (!domain_formula.equalities.empty() ||
      std::any_of(preimage.begin(), preimage.end(), [](const SimpleFormula& f) { return !f.equalities.empty(); }))
    throw InvalidInput("malformed interpretation: equality atoms are not simple");

  Table a = formula_table(source, domain_formula, opts);
  if (a.size() != quotient_map.size())
    throw InvalidInput("malformed interpretation: quotient map is not defined exactly on A");
  std::vector<char> hit(target.domain_size, 0);
  for (const auto& t : a) {
    auto it = quotient_map.find(t);
    if (it == quotient_map.end())
      throw InvalidInput("malformed interpretation: quotient map is not defined exactly on A");
    if (it->second < 0 || it->second >= target.domain_size)
      throw InvalidInput("malformed interpretation: quotient value out of range");
    hit[it->second] = 1;
  }
  if (std::count(hit.begin(), hit.end(), 0))
    throw InvalidInput("malformed interpretation: quotient map is not onto");

  // c^-1(R) computed directly must match each formula.
  for (std::size_t r = 0; r < preimage.size(); ++r) {
    const int k = target.signature.relations[r].arity;
    std::size_t count = checked_pow(a.size(), k, opts.caps.power_elements, "power_elements");
    Table expect;
    for (std::size_t code = 0; code < count; ++code) {
      Tuple pick = decode_tuple(code, static_cast<int>(a.size()), k);
      Tuple img, flat;
      for (int i : pick) {
        img.push_back(quotient_map.at(a[i]));
        flat.insert(flat.end(), a[i].begin(), a[i].end());
      }
      if (target.holds(r, img)) expect.push_back(std::move(flat));
    }
    canonicalize(expect);
    if (formula_table(source, preimage[r], opts) != expect)
      throw InvalidInput("malformed interpretation: preimage formula for " +
                         target.signature.relations[r].name + " is not c^-1(R)");
  }
}

std::optional<HomEquivalence> hom_equivalence(const Structure& source, const Structure& target,
                                              const SearchOptions& opts) {
  require_same_signature(source, target);
  auto to = find_homomorphism(source, target, {}, opts);
  if (!to) return std::nullopt;
  auto from = find_homomorphism(target, source, {}, opts);
  if (!from) return std::nullopt;
  return HomEquivalence{target, *to, *from};
}

Structure SimpleConstruction::target() const {
  Structure cur = base;
  for (const auto& st : steps) {
    if (auto* in = std::get_if<SimpleInterpretation>(&st)) cur = in->target;
    else if (auto* he = std::get_if<HomEquivalence>(&st)) cur = he->target;
    else cur = fixtures::with_singletons(cur);
  }
  return cur;
}

Structure with_orbit_relations(const Structure& s, const SearchOptions& opts) {
  Structure out = s;
  for (int c = 0; c < s.domain_size; ++c) {
    if (out.signature.index_of(eq_name(c))) throw InvalidInput("relation " + eq_name(c) + " already present");
    out.add_relation(eq_name(c), 2, orbit_diagonal(s, c, opts));
  }
  return out;
}

SimpleInterpretation definitional_expansion(const Structure& source, const Structure& target,
                                            const std::vector<SimpleFormula>& formulas) {
  SimpleInterpretation in;
  in.dimension = 1;
  in.domain_formula.free_vars = {"x"};
  for (int a = 0; a < source.domain_size; ++a) in.quotient_map[{a}] = a;
  in.preimage = formulas;
  in.target = target;
  return in;
}

ReductionCertificate reduce_singleton_expansion(const Instance& x, const Structure& s,
                                                const SearchOptions& opts) {
  require_valid(s);
  if (!is_core(s, opts)) throw InvalidInput("singleton expansion needs a core template");
  ReductionCertificate cert;
  auto eq_idx = orbit_relation_indices(s);
  if (!eq_idx.empty()) {
    for (int c = 0; c < s.domain_size; ++c)
      if (s.tables[eq_idx[c]] != orbit_diagonal(s, c, opts))
        throw InvalidInput("relation " + eq_name(c) + " is not the orbit diagonal of " +
                           std::to_string(c));
    cert.steps.push_back(singleton_step(x, s, s, eq_idx));
  } else {
    Structure s_eq = with_orbit_relations(s, opts);
    cert.steps.push_back(singleton_step(x, s, s_eq, orbit_relation_indices(s_eq)));
    std::vector<SimpleFormula> defs;
    for (std::size_t r = 0; r < s.tables.size(); ++r) {
      SimpleFormula f;
      Atom a{s.signature.relations[r].name, {}};
      for (int i = 0; i < s.signature.relations[r].arity; ++i) {
        f.free_vars.push_back("x" + std::to_string(i + 1));
        a.vars.push_back(i);
      }
      f.atoms.push_back(std::move(a));
      defs.push_back(std::move(f));
    }
    for (int c = 0; c < s.domain_size; ++c) defs.push_back(eq_c_formula(s, c, opts));
    auto expand = reduce_interpretation(cert.steps.back().output, s,
                                        definitional_expansion(s, s_eq, defs), opts);
    cert.steps.push_back(std::move(expand.steps.front()));
    cert.notes.push_back("(=_c) relations injected from their equality-free definitions");
  }
  check_degree(cert);
  return cert;
}

ReductionCertificate reduce_interpretation(const Instance& x, const Structure& source,
                                           const SimpleInterpretation& interp,
                                           const SearchOptions& opts) {
  interp.validate(source, opts);
  require_same_signature(x, interp.target);
  ReductionStep st;
  st.kind = "interpretation";
  st.source = x;
  st.source_template = interp.target;
  st.output_template = source;
  st.interp = std::make_shared<SimpleInterpretation>(interp);
  const int n = interp.dimension;

  int next = 0;
  auto fresh = [&](std::string label) {
    st.provenance.push_back(std::move(label));
    return next++;
  };
  st.y.resize(x.domain_size);
  for (int v = 0; v < x.domain_size; ++v)
    for (int i = 0; i < n; ++i)
      st.y[v].push_back(fresh("y[x" + std::to_string(v) + "][" + std::to_string(i) + "]"));

  auto add_block = [&](int formula, const std::vector<int>& free, const std::string& tag) {
    const SimpleFormula& f = formula < 0 ? interp.domain_formula : interp.preimage[formula];
    ReductionStep::Block b{formula, free};
    for (std::size_t j = 0; j < f.bound_vars.size(); ++j)
      b.vars.push_back(fresh(tag + "[" + std::to_string(j) + "]"));
    st.blocks.push_back(std::move(b));
  };
  for (int v = 0; v < x.domain_size; ++v) add_block(-1, st.y[v], "zA[x" + std::to_string(v) + "]");
  for (std::size_t r = 0; r < x.tables.size(); ++r)
    for (const auto& t : x.tables[r]) {
      std::vector<int> free;
      std::string tag = "zR[" + interp.target.signature.relations[r].name + "(";
      for (std::size_t i = 0; i < t.size(); ++i) {
        free.insert(free.end(), st.y[t[i]].begin(), st.y[t[i]].end());
        tag += (i ? ",x" : "x") + std::to_string(t[i]);
      }
      add_block(static_cast<int>(r), free, tag + ")]");
    }

  Instance out(next, source.signature);
  for (const auto& b : st.blocks) {
    const SimpleFormula& f = b.formula < 0 ? interp.domain_formula : interp.preimage[b.formula];
    for (const auto& a : f.atoms) {
      Tuple t;
      for (int v : a.vars) t.push_back(b.vars[v]);
      out.table(a.relation).push_back(std::move(t));
    }
  }
  out.canonicalize();
  st.output = std::move(out);

  std::size_t widest = 0;
  for (const auto& f : interp.preimage) widest = std::max(widest, f.weight());
  st.multiplier = interp.domain_formula.weight() + widest + 1;

  ReductionCertificate cert;
  cert.steps.push_back(std::move(st));
  check_degree(cert);
  return cert;
}

ReductionCertificate reduce_hom_equivalence(const Instance& x, const Structure& source,
                                            const HomEquivalence& eq) {
  require_same_signature(source, eq.target);
  require_same_signature(x, eq.target);
  if (!is_homomorphism(eq.to_target, source, eq.target) ||
      !is_homomorphism(eq.from_target, eq.target, source))
    throw InvalidInput("hom-equivalence maps fail verification");
  ReductionStep st;
  st.kind = "hom-equivalence";
  st.source = x;
  st.source_template = eq.target;
  st.output = x;
  st.output_template = source;
  st.to_target = eq.to_target;
  st.from_target = eq.from_target;
  for (int v = 0; v < x.domain_size; ++v) st.provenance.push_back("x" + std::to_string(v));
  ReductionCertificate cert;
  cert.steps.push_back(std::move(st));
  check_degree(cert);
  return cert;
}

ReductionCertificate compile(const Instance& x, const SimpleConstruction& c,
                             const SearchOptions& opts) {
  std::vector<Structure> templates{c.base};
  for (const auto& st : c.steps) {
    const Structure& cur = templates.back();
    if (auto* in = std::get_if<SimpleInterpretation>(&st)) templates.push_back(in->target);
    else if (auto* he = std::get_if<HomEquivalence>(&st)) templates.push_back(he->target);
    else templates.push_back(fixtures::with_singletons(cur));
  }
  require_same_signature(x, templates.back());
  if (c.steps.empty()) {
    ReductionCertificate cert;
    HomEquivalence id{c.base, {}, {}};
    for (int a = 0; a < c.base.domain_size; ++a) {
      id.to_target.push_back(a);
      id.from_target.push_back(a);
    }
    return reduce_hom_equivalence(x, c.base, id);
  }

  ReductionCertificate cert;
  Instance cur = x;
  for (std::size_t i = c.steps.size(); i-- > 0;) {
    const Structure& src = templates[i];
    ReductionCertificate part;
    if (auto* in = std::get_if<SimpleInterpretation>(&c.steps[i]))
      part = reduce_interpretation(cur, src, *in, opts);
    else if (auto* he = std::get_if<HomEquivalence>(&c.steps[i]))
      part = reduce_hom_equivalence(cur, src, *he);
    else
      part = reduce_singleton_expansion(cur, src, opts);
    for (auto& st : part.steps) cert.steps.push_back(std::move(st));
    for (auto& n : part.notes) cert.notes.push_back(std::move(n));
    cur = cert.output();
  }
  check_degree(cert);
  return cert;
}

Assignment pushforward_solution(const Assignment& g, const ReductionCertificate& cert,
                                const SearchOptions& opts) {
  Assignment cur = g;
  for (const auto& st : cert.steps) cur = push_step(cur, st, opts);
  return cur;
}

Assignment pullback_solution(const Assignment& h, const ReductionCertificate& cert) {
  Assignment cur = h;
  for (auto it = cert.steps.rbegin(); it != cert.steps.rend(); ++it) cur = pull_step(cur, *it);
  return cur;
}

}  // namespace polycsp
