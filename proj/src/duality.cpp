#include "polycsp/duality.hpp"

#include <algorithm>
#include <tuple>

#include "polycsp/errors.hpp"

namespace polycsp {

struct AcyclicLiftBuilder::Node {
  int var = 0;
  int rel = -1;  // -1: the one-variable lift
  int pos = 0;   // position of `var` in the added tuple
  std::vector<std::shared_ptr<const Node>> kids;
  std::size_t size = 1;
};

namespace {

constexpr const char* kNotWitness = "path does not witness cycle-inconsistency";

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > static_cast<std::size_t>(-1) - b ? static_cast<std::size_t>(-1) : a + b;
}

}  // namespace

bool verify_lift(const Lift& l, const Instance& x) {
  if (l.instance.signature != x.signature) return false;
  if (static_cast<int>(l.lift_map.size()) != l.instance.domain_size) return false;
  for (int v : l.lift_map)
    if (v < 0 || v >= x.domain_size) return false;
  if (!is_homomorphism(l.lift_map, l.instance, x)) return false;
  return !l.claimed_acyclic || is_acyclic(l.instance);
}

Lift identity_lift(const Instance& x) {
  Lift l;
  l.instance = x;
  l.claimed_acyclic = is_acyclic(x);
  for (int v = 0; v < x.domain_size; ++v) l.lift_map.push_back(v);
  return l;
}

AcyclicLiftBuilder::AcyclicLiftBuilder(const Instance& x, const Structure& s, const Caps& caps)
    : x_(x), s_(s), caps_(caps) {
  require_same_signature(x, s);
  if (s.domain_size > kMaxTemplateDomain)
    throw CapExceeded("template_domain", s.domain_size, kMaxTemplateDomain);
  u_.assign(x.domain_size, full_mask(s.domain_size));
  for (int v = 0; v < x.domain_size; ++v) {
    auto n = std::make_shared<Node>();
    n->var = v;
    node_.push_back(std::move(n));
  }
}

std::optional<int> AcyclicLiftBuilder::empty_variable() const {
  for (int v = 0; v < x_.domain_size; ++v)
    if (!u_[v]) return v;
  return std::nullopt;
}

bool AcyclicLiftBuilder::step() {
  if (empty_variable()) return false;
  // Triples in (variable, relation, tuple rank, position) order.
  std::vector<std::tuple<int, int, int, int>> triples;
  for (std::size_t r = 0; r < x_.tables.size(); ++r)
    for (std::size_t t = 0; t < x_.tables[r].size(); ++t)
      for (std::size_t i = 0; i < x_.tables[r][t].size(); ++i)
        triples.emplace_back(x_.tables[r][t][i], static_cast<int>(r), static_cast<int>(t),
                             static_cast<int>(i));
  std::sort(triples.begin(), triples.end());
  for (auto [v, r, t, i] : triples) {
    const Tuple& vars = x_.tables[r][t];
    DomainMask proj = 0;
    for (const auto& e : s_.tables[r]) {
      bool live = true;
      for (std::size_t j = 0; j < vars.size() && live; ++j) live = (u_[vars[j]] >> e[j]) & 1;
      if (live) proj |= DomainMask{1} << e[i];
    }
    if (proj == u_[v]) continue;
    auto n = std::make_shared<Node>();
    n->var = v;
    n->rel = r;
    n->pos = i;
    n->size = 0;
    for (int w : vars) {
      n->kids.push_back(node_[w]);
      n->size = saturating_add(n->size, node_[w]->size);
    }
    node_[v] = std::move(n);
    u_[v] = proj;
    ++steps_;
    return true;
  }
  return false;
}

bool AcyclicLiftBuilder::run() {
  while (step()) {
  }
  return empty_variable().has_value();
}

std::size_t AcyclicLiftBuilder::lift_size(int var) const { return node_[var]->size; }

int AcyclicLiftBuilder::materialize(const Node& n, Lift& out) const {
  if (n.rel < 0) {
    out.lift_map.push_back(n.var);
    return static_cast<int>(out.lift_map.size()) - 1;
  }
  Tuple roots;
  for (const auto& k : n.kids) roots.push_back(materialize(*k, out));
  out.instance.tables[n.rel].push_back(roots);
  return roots[n.pos];
}

Lift AcyclicLiftBuilder::lift(int var, int* root) const {
  if (node_[var]->size > caps_.lift_nodes)
    throw CapExceeded("lift_nodes", node_[var]->size, caps_.lift_nodes);
  Lift out;
  out.instance = Instance(0, x_.signature);
  int r = materialize(*node_[var], out);
  out.instance.domain_size = static_cast<int>(out.lift_map.size());
  out.instance.canonicalize();
  if (root) *root = r;
  return out;
}

std::optional<Lift> unsolvable_acyclic_lift(const Instance& x, const Structure& s,
                                            const SearchOptions& opts) {
  AcyclicLiftBuilder b(x, s, opts.caps);
  bool emptied = b.run();
  if (emptied == good_witness(x, s).has_value())
    throw VerificationFailure("refinement disagrees with the arc-consistency closure");
  if (!emptied) return std::nullopt;
  int root = 0;
  Lift l = b.lift(*b.empty_variable(), &root);
  l.distinguished = *b.empty_variable();
  l.notes.push_back("refinement steps: " + std::to_string(b.steps()));
  if (!verify_lift(l, x)) throw VerificationFailure("obstruction is not an acyclic lift");
  if (find_homomorphism(l.instance, s, {}, opts))
    throw VerificationFailure("obstruction has a solution");
  return l;
}

Lift cycle_obstruction_lift(const Instance& x, const Structure& s, const ClosedPath& p,
                            const SearchOptions& opts) {
  require_same_signature(x, s);
  if (p.steps.empty() || !is_path(x, p) || p.vars.front() != p.vars.back())
    throw InvalidInput(kNotWitness);
  auto w = good_witness(x, s);
  if (!w) throw InvalidInput(kNotWitness);
  const int x1 = p.vars.front();
  const DomainMask up = w->allowed(x1) & ~path_failures(s, *w, p);

  // x with the unary constraint U_P(x1), over s with U_P added.
  Structure s2 = s;
  std::string up_name = "U_P";
  while (s2.signature.index_of(up_name)) up_name = "_" + up_name;
  Table up_table;
  for (int a = 0; a < s.domain_size; ++a)
    if ((up >> a) & 1) up_table.push_back({a});
  const std::size_t up_rel = s2.add_relation(up_name, 1, up_table);
  Instance x2 = x;
  x2.signature = s2.signature;
  x2.tables.push_back({{x1}});

  AcyclicLiftBuilder b2(x2, s2, opts.caps);
  if (!b2.run()) throw InvalidInput(kNotWitness);
  Lift y = b2.lift(*b2.empty_variable());

  // Final lifts of x itself pin each gadget variable to U_x.
  AcyclicLiftBuilder b1(x, s, opts.caps);
  if (b1.run()) throw VerificationFailure("arc-consistent instance emptied a set");

  Lift out;
  out.instance = Instance(0, x.signature);
  out.lift_map = y.lift_map;
  for (std::size_t r = 0; r < x.tables.size(); ++r) out.instance.tables[r] = y.instance.tables[r];
  auto fresh = [&](int xv) {
    out.lift_map.push_back(xv);
    return static_cast<int>(out.lift_map.size()) - 1;
  };
  // Copy of Y_{xv} with its root at `at`.
  auto attach = [&](int xv, int at) {
    int root = -1;
    Lift copy = b1.lift(xv, &root);
    std::vector<int> rename(copy.lift_map.size());
    for (std::size_t v = 0; v < copy.lift_map.size(); ++v)
      rename[v] = static_cast<int>(v) == root ? at : fresh(copy.lift_map[v]);
    for (std::size_t r = 0; r < copy.instance.tables.size(); ++r)
      for (const auto& t : copy.instance.tables[r]) {
        Tuple nt;
        for (int v : t) nt.push_back(rename[v]);
        out.instance.tables[r].push_back(std::move(nt));
      }
  };

  for (const auto& t : y.instance.tables[up_rel]) {
    int z = t[0];
    attach(x1, z);
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      const PathStep& st = p.steps[k];
      Tuple vars(st.tuple.size());
      int next = st.from == st.to ? z : fresh(p.vars[k + 1]);
      for (std::size_t i = 0; i < st.tuple.size(); ++i) {
        if (static_cast<int>(i) == st.from) vars[i] = z;
        else if (static_cast<int>(i) == st.to) vars[i] = next;
        else vars[i] = fresh(st.tuple[i]);
      }
      out.instance.tables[st.relation].push_back(std::move(vars));
      if (next != z) attach(p.vars[k + 1], next);
      z = next;
    }
  }
  out.instance.domain_size = static_cast<int>(out.lift_map.size());
  out.instance.canonicalize();
  out.distinguished = x1;
  for (int v = 0; v < out.instance.domain_size; ++v)
    if (out.lift_map[v] == x1) out.fiber.push_back(v);
  out.notes.push_back("derived unary relation " + up_name + " materialized with " +
                      std::to_string(up_table.size()) + " values");

  if (!verify_lift(out, x)) throw VerificationFailure("cycle obstruction is not an acyclic lift");
  if (!find_homomorphism(out.instance, s, {}, opts))
    throw VerificationFailure("cycle obstruction has no solution");
  for (int a = 0; a < s.domain_size; ++a) {
    PartialAssignment seed(out.instance.domain_size);
    for (int v : out.fiber) seed[v] = a;
    if (find_homomorphism(out.instance, s, seed, opts))
      throw VerificationFailure("cycle obstruction has a solution constant on the fiber");
  }
  return out;
}

Table fiber_relation(const Lift& l, const Structure& s, const SearchOptions& opts) {
  if (l.fiber.empty()) throw InvalidInput("lift has no distinguished fiber");
  Table out;
  for (const auto& t : project_solutions(l.instance, s, l.fiber, opts)) out.push_back(t);
  return out;
}

}  // namespace polycsp
