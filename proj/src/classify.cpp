#include "polycsp/classify.hpp"

#include <bit>
#include <deque>

#include "polycsp/consistency.hpp"
#include "polycsp/errors.hpp"
#include "polycsp/fixtures.hpp"

namespace polycsp {

std::string to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    default: return "unknown";
  }
}

std::string to_string(BooleanBucket b) {
  switch (b) {
    case BooleanBucket::TotallySymmetric: return "totally-symmetric";
    case BooleanBucket::TwoSatConstructible: return "2SAT-constructible";
    case BooleanBucket::Intractable: return "intractable";
    default: return "affine";
  }
}

BooleanVerdict classify_boolean(const Structure& s) {
  if (s.domain_size != 2) throw InvalidInput("classify_boolean needs domain size 2");
  const std::pair<const char*, Operation> ts[] = {
      {"constant 0", Operation::constant(2, 1, 0)},
      {"constant 1", Operation::constant(2, 1, 1)},
      {"and", ops::min2(2)},
      {"or", ops::max2(2)},
  };
  for (const auto& [name, op] : ts)
    if (preserves(op, s)) return {BooleanBucket::TotallySymmetric, name, op};
  if (preserves(ops::majority(), s)) return {BooleanBucket::TwoSatConstructible, "majority", ops::majority()};
  if (preserves(ops::minority(), s)) return {BooleanBucket::Affine, "minority", ops::minority()};
  return {BooleanBucket::Intractable, "", std::nullopt};
}

Width1Verdict is_width1(const Structure& s, const SearchOptions& opts) {
  require_valid(s);
  Width1Verdict v;
  v.arity = s.domain_size * std::max(1, s.signature.max_arity());
  try {
    v.extractor = check_totally_symmetric(s, v.arity, opts);
    v.answer = v.extractor ? Answer::Yes : Answer::No;
    v.note = v.extractor ? "totally symmetric polymorphism found at arity " + std::to_string(v.arity)
                         : "no totally symmetric polymorphism of arity " + std::to_string(v.arity);
  } catch (const CapExceeded& e) {
    v.answer = Answer::Unknown;
    v.note = std::string("unknown (cap): ") + e.what();
  }
  return v;
}

namespace {

bool single_binary(const Structure& s) {
  return s.signature.size() == 1 && s.signature.relations[0].arity == 2;
}

bool is_simple_graph(const Structure& g) {
  if (!single_binary(g)) return false;
  const Table& e = g.tables[0];
  for (const auto& t : e) {
    if (t[0] == t[1]) return false;
    if (!g.holds(0, {t[1], t[0]})) return false;
  }
  return true;
}

// Closed walk through an odd cycle, or empty when g is bipartite.
std::vector<int> odd_cycle(const Structure& g) {
  const int n = g.domain_size;
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : g.tables[0]) adj[t[0]].push_back(t[1]);
  std::vector<int> side(n, -1), parent(n, -1);
  for (int root = 0; root < n; ++root) {
    if (side[root] >= 0) continue;
    side[root] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (side[v] < 0) {
          side[v] = 1 - side[u];
          parent[v] = u;
          queue.push_back(v);
        } else if (side[v] == side[u]) {
          std::vector<int> pu{u}, pv{v};
          while (parent[pu.back()] >= 0) pu.push_back(parent[pu.back()]);
          while (parent[pv.back()] >= 0) pv.push_back(parent[pv.back()]);
          while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
            pu.pop_back();
            pv.pop_back();
          }
          // pu and pv now end at their lowest common ancestor.
          std::vector<int> walk(pu.begin(), pu.end());
          for (auto it = pv.rbegin() + 1; it != pv.rend(); ++it) walk.push_back(*it);
          walk.push_back(u);
          return walk;
        }
      }
    }
  }
  return {};
}

}  // namespace

GraphVerdict classify_graph(const Structure& g, const SearchOptions& opts) {
  require_valid(g);
  if (g.domain_size == 0) throw InvalidInput("empty graph");
  if (!is_simple_graph(g)) throw InvalidInput("not a simple graph (one symmetric irreflexive binary relation)");
  GraphVerdict v;
  v.odd_cycle = odd_cycle(g);
  v.bipartite = v.odd_cycle.empty();
  auto core = find_core(g, opts);
  v.core_size = core.core.domain_size;
  v.siggers = check_siggers(fixtures::with_singletons(core.core), opts).has_value();
  if (v.siggers != v.bipartite)
    throw VerificationFailure("bipartite test and Siggers search disagree");
  return v;
}

SmoothVerdict classify_smooth_digraph(const Structure& d, const SearchOptions& opts) {
  require_valid(d);
  if (!single_binary(d) || d.domain_size == 0) throw InvalidInput("not a digraph with one binary relation");
  std::vector<int> in(d.domain_size, 0), out(d.domain_size, 0);
  for (const auto& t : d.tables[0]) {
    ++out[t[0]];
    ++in[t[1]];
  }
  for (int v = 0; v < d.domain_size; ++v)
    if (in[v] == 0 || out[v] == 0) throw InvalidInput("not smooth: vertex " + std::to_string(v));
  SmoothVerdict v;
  auto core = find_core(d, opts);
  v.core_elements = core.elements;
  std::vector<int> cin(core.core.domain_size, 0), cout(core.core.domain_size, 0);
  for (const auto& t : core.core.tables[0]) {
    ++cout[t[0]];
    ++cin[t[1]];
  }
  v.cycle_union = true;
  for (int i = 0; i < core.core.domain_size; ++i) v.cycle_union = v.cycle_union && cin[i] == 1 && cout[i] == 1;
  v.tractable = v.cycle_union;
  try {
    bool sig = check_siggers(fixtures::with_singletons(core.core), opts).has_value();
    v.siggers = sig ? Answer::Yes : Answer::No;
    if (sig != v.tractable) throw VerificationFailure("core shape and Siggers search disagree");
  } catch (const CapExceeded&) {
    v.siggers = Answer::Unknown;
  }
  return v;
}

Verdict classify_template(const Structure& s, const std::string& id, const SearchOptions& opts) {
  require_valid(s);
  if (s.domain_size == 0) throw InvalidInput("empty template");
  Verdict v;
  v.template_id = id;
  try {
    auto core = find_core(s, opts);
    v.core_elements = core.elements;
    v.evidence.push_back("core on " + std::to_string(core.core.domain_size) + " of " +
                         std::to_string(s.domain_size) + " elements");
    Structure expanded = fixtures::with_singletons(core.core);
    v.expanded_core = expanded;
    v.evidence.push_back("singleton relations added to the core: " +
                         std::to_string(core.core.domain_size));
    v.siggers = check_siggers(expanded, opts);
    v.tractable = v.siggers ? Answer::Yes : Answer::No;
    v.evidence.push_back(v.siggers ? "Siggers operation found on the expanded core"
                                   : "Siggers indicator instance exhausted: no solution");
  } catch (const CapExceeded& e) {
    v.evidence.push_back(std::string("tractability unknown (cap): ") + e.what());
  }
  v.width1 = is_width1(s, opts);
  v.evidence.push_back("width 1: " + v.width1.note);
  try {
    v.dual_discriminator = check_dual_discriminator(s) ? Answer::Yes : Answer::No;
  } catch (const CapExceeded& e) {
    v.evidence.push_back(std::string("dual discriminator unknown (cap): ") + e.what());
  }
  if (s.domain_size == 2) v.boolean = classify_boolean(s);
  if (is_simple_graph(s)) {
    v.graph = classify_graph(s, opts);
  } else if (single_binary(s)) {
    try {
      v.smooth = classify_smooth_digraph(s, opts);
    } catch (const InvalidInput&) {
      v.evidence.push_back("digraph is not smooth");
    }
  }

  if (v.tractable == Answer::No) v.labels.push_back("intractable: the Borel problem is Sigma^1_2-complete");
  if (v.width1.answer == Answer::Yes) v.labels.push_back("width 1: essentially classical");
  if (v.dual_discriminator == Answer::Yes) v.labels.push_back("dual discriminator: effectivizable");
  if (v.boolean) v.labels.push_back("boolean bucket " + std::to_string(static_cast<int>(v.boolean->bucket)) +
                                    ": " + to_string(v.boolean->bucket));
  return v;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

struct BinaryNet {
  // adj[x] holds (y, succ) with succ[a] the values of y allowed by x = a.
  std::vector<std::vector<std::pair<int, std::vector<DomainMask>>>> adj;
  std::vector<DomainMask> dom;
};

BinaryNet binary_projections(const Instance& x, const Structure& s) {
  BinaryNet net;
  net.adj.resize(x.domain_size);
  net.dom.assign(x.domain_size, full_mask(s.domain_size));
  for (std::size_t r = 0; r < x.tables.size(); ++r) {
    const Table& rel = s.tables[r];
    const int k = s.signature.relations[r].arity;
    for (const auto& t : x.tables[r]) {
      for (int i = 0; i < k; ++i) {
        DomainMask proj = 0;
        for (const auto& u : rel) proj |= DomainMask{1} << u[i];
        net.dom[t[i]] &= proj;
      }
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          if (t[i] == t[j]) {
            DomainMask diag = 0;
            for (const auto& u : rel)
              if (u[i] == u[j]) diag |= DomainMask{1} << u[i];
            net.dom[t[i]] &= diag;
            continue;
          }
          std::vector<DomainMask> fwd(s.domain_size, 0), back(s.domain_size, 0);
          for (const auto& u : rel) {
            fwd[u[i]] |= DomainMask{1} << u[j];
            back[u[j]] |= DomainMask{1} << u[i];
          }
          net.adj[t[i]].emplace_back(t[j], std::move(fwd));
          net.adj[t[j]].emplace_back(t[i], std::move(back));
        }
    }
  }
  return net;
}

DomainMask image(const std::vector<DomainMask>& succ, DomainMask from) {
  DomainMask out = 0;
  for (; from; from &= from - 1) out |= succ[std::countr_zero(from)];
  return out;
}

// Arc consistency from the given start variables; false if a domain empties.
bool arc_consistency(const BinaryNet& net, std::vector<DomainMask>& dom, std::deque<int> queue) {
  std::vector<char> queued(dom.size(), 0);
  for (int v : queue) queued[v] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    if (dom[v] == 0) return false;
    for (const auto& [w, succ] : net.adj[v]) {
      DomainMask nd = dom[w] & image(succ, dom[v]);
      if (nd == dom[w]) continue;
      if (nd == 0) return false;
      dom[w] = nd;
      if (!queued[w]) {
        queued[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return true;
}

void require_instance(const Instance& x, const Structure& s) {
  require_valid(x);
  require_valid(s);
  require_same_signature(x, s);
  if (s.domain_size > kMaxTemplateDomain) throw CapExceeded("template_domain", s.domain_size, kMaxTemplateDomain);
}

}  // namespace

std::optional<Assignment> dual_discriminator_solve(const Instance& x, const Structure& s) {
  require_instance(x, s);
  if (!check_dual_discriminator(s)) throw InvalidInput("template has no dual discriminator polymorphism");
  if (s.domain_size == 0) {
    if (x.domain_size == 0) return Assignment{};
    return std::nullopt;
  }
  // Each relation is the conjunction of its binary projections, and after
  // arc consistency every projection is a product, a bijection or a pair of
  // implications. Propagating a value therefore only fixes other variables,
  // and a value that propagates without conflict can be kept.
  BinaryNet net = binary_projections(x, s);
  std::vector<DomainMask> dom = net.dom;
  std::deque<int> all;
  for (int v = 0; v < x.domain_size; ++v) all.push_back(v);
  if (!arc_consistency(net, dom, all)) return std::nullopt;
  for (int v = 0; v < x.domain_size; ++v) {
    if (std::popcount(dom[v]) == 1) continue;
    bool placed = false;
    for (DomainMask m = dom[v]; m && !placed; m &= m - 1) {
      auto trial = dom;
      trial[v] = m & -m;
      if (arc_consistency(net, trial, {v})) {
        dom = std::move(trial);
        placed = true;
      }
    }
    if (!placed) return std::nullopt;
  }
  Assignment f(x.domain_size);
  for (int v = 0; v < x.domain_size; ++v) f[v] = std::countr_zero(dom[v]);
  if (!is_homomorphism(f, x, s)) throw VerificationFailure("dual discriminator propagation produced a non-solution");
  return f;
}

std::optional<Assignment> rps_solve(const Instance& x, const Structure& s) {
  require_instance(x, s);
  if (!(s == fixtures::rps())) throw InvalidInput("rps_solve needs the rock-paper-scissors template");
  const std::size_t pi = *s.signature.index_of("pi");
  const std::size_t star = *s.signature.index_of("star");
  auto w = good_witness(x, s);
  if (!w) return std::nullopt;
  const int n = x.domain_size;
  std::vector<DomainMask> u(n);
  for (int v = 0; v < n; ++v) u[v] = w->allowed(v);

  // Edges carry d(x, y) mod 3: f(y) = pi^d(f(x)).
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (const auto& t : x.tables[pi]) {
    adj[t[0]].emplace_back(t[1], 1);
    adj[t[1]].emplace_back(t[0], 2);
  }
  const DomainMask paper = DomainMask{1} << fixtures::kPaper;
  for (const auto& t : x.tables[star])
    if (std::popcount(u[t[0]]) == 1 && (u[t[0]] & paper)) {
      adj[t[1]].emplace_back(t[2], 0);
      adj[t[2]].emplace_back(t[1], 0);
    }

  Assignment f(n, -1);
  std::vector<int> offset(n, -1);
  for (int root = 0; root < n; ++root) {
    if (offset[root] >= 0) continue;
    std::vector<int> comp{root};
    offset[root] = 0;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (auto [y, d] : adj[comp[i]]) {
        int want = (offset[comp[i]] + d) % 3;
        if (offset[y] < 0) {
          offset[y] = want;
          comp.push_back(y);
        } else if (offset[y] != want) {
          return std::nullopt;
        }
      }
    for (int v : comp) {
      int k = std::popcount(u[v]);
      if (k == 1) {
        f[v] = std::countr_zero(u[v]);
      } else if (k == 2) {
        int a = std::countr_zero(u[v]);
        int b = std::countr_zero(u[v] & (u[v] - 1));
        f[v] = fixtures::rps_star(a, b);
      } else {
        f[v] = (fixtures::kRock + offset[v]) % 3;
      }
    }
  }
  // The construction is a solution whenever one exists.
  if (!is_homomorphism(f, x, s)) return std::nullopt;
  return f;
}

SolveResult solve(const Instance& x, const Structure& s, const SearchOptions& opts) {
  require_instance(x, s);
  SolveResult r;
  if (s == fixtures::rps()) {
    r.method = "rps";
    r.solution = rps_solve(x, s);
  } else {
    Width1Verdict w = is_width1(s, opts);
    r.notes.push_back("width 1: " + w.note);
    if (w.extractor) {
      r.method = "width1";
      r.solution = width1_solve(x, s, w.extractor->set_function);
    } else if (check_dual_discriminator(s)) {
      r.method = "dual-discriminator";
      r.solution = dual_discriminator_solve(x, s);
    } else {
      r.method = "search";
      r.solution = find_homomorphism(x, s, {}, opts);
    }
  }
  if (r.solution && !is_homomorphism(*r.solution, x, s))
    throw VerificationFailure(r.method + " solver returned a non-solution");
  return r;
}

}  // namespace polycsp
