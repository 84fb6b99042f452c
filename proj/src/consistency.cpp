#include "polycsp/consistency.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <numeric>
#include <random>

#include "polycsp/errors.hpp"

namespace polycsp {

namespace {

struct Occ {
  int rel;
  int idx;  // tuple index in x.tables[rel]
};

std::vector<Occ> occurrences(const Instance& x) {
  std::vector<Occ> out;
  for (std::size_t r = 0; r < x.tables.size(); ++r)
    for (std::size_t i = 0; i < x.tables[r].size(); ++i)
      out.push_back({static_cast<int>(r), static_cast<int>(i)});
  return out;
}

void check_inputs(const Instance& x, const Structure& s) {
  require_same_signature(x, s);
  if (s.domain_size > kMaxTemplateDomain)
    throw CapExceeded("template_domain", s.domain_size, kMaxTemplateDomain);
}

}  // namespace

Witness Witness::empty(int variables, int domain_size) {
  return {domain_size, std::vector<DomainMask>(variables, 0)};
}

bool Witness::good() const {
  DomainMask all = full_mask(domain_size);
  return std::none_of(excluded.begin(), excluded.end(),
                      [all](DomainMask m) { return (m & all) == all; });
}

Witness ac_closure(const Instance& x, const Structure& s, const Witness& seed,
                   std::uint64_t order_seed) {
  check_inputs(x, s);
  if (seed.domain_size != s.domain_size || static_cast<int>(seed.excluded.size()) != x.domain_size)
    throw InvalidInput("witness does not match instance and template");
  const DomainMask all = full_mask(s.domain_size);
  Witness w = seed;
  for (auto& m : w.excluded) {
    if (m & ~all) throw InvalidInput("witness set outside the domain");
  }

  auto occ = occurrences(x);
  std::vector<std::vector<int>> touching(x.domain_size);
  for (std::size_t c = 0; c < occ.size(); ++c)
    for (int v : x.tables[occ[c].rel][occ[c].idx]) touching[v].push_back(static_cast<int>(c));

  std::vector<int> order(occ.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(order_seed);
  if (order_seed) std::shuffle(order.begin(), order.end(), rng);
  std::deque<int> queue(order.begin(), order.end());
  std::vector<char> queued(occ.size(), 1);

  while (!queue.empty()) {
    int c;
    if (order_seed) {
      std::uniform_int_distribution<std::size_t> pick(0, queue.size() - 1);
      auto it = queue.begin() + static_cast<std::ptrdiff_t>(pick(rng));
      c = *it;
      queue.erase(it);
    } else {
      c = queue.front();
      queue.pop_front();
    }
    queued[c] = 0;
    const Tuple& vars = x.tables[occ[c].rel][occ[c].idx];
    const int k = static_cast<int>(vars.size());
    std::vector<DomainMask> supported(k, 0);
    for (const auto& e : s.tables[occ[c].rel]) {
      bool live = true;
      for (int i = 0; i < k && live; ++i) live = !((w.excluded[vars[i]] >> e[i]) & 1);
      if (!live) continue;
      for (int i = 0; i < k; ++i) supported[i] |= DomainMask{1} << e[i];
    }
    for (int i = 0; i < k; ++i) {
      DomainMask grown = w.excluded[vars[i]] | (all & ~supported[i]);
      if (grown == w.excluded[vars[i]]) continue;
      w.excluded[vars[i]] = grown;
      for (int d : touching[vars[i]])
        if (!queued[d]) {
          queued[d] = 1;
          queue.push_back(d);
        }
    }
  }
  return w;
}

std::optional<Witness> good_witness(const Instance& x, const Structure& s) {
  Witness w = ac_closure(x, s, Witness::empty(x.domain_size, s.domain_size));
  if (!w.good()) return std::nullopt;
  return w;
}

std::optional<Assignment> width1_solve(const Instance& x, const Structure& s, const Operation& ts) {
  if (ts.domain_size != s.domain_size) throw InvalidInput("not a valid extractor: domain mismatch");
  validate_operation(ts);
  auto f = as_set_function(ts);
  if (!f) throw InvalidInput("not a valid extractor: operation is not totally symmetric");
  return width1_solve(x, s, *f);
}

std::optional<Assignment> width1_solve(const Instance& x, const Structure& s,
                                       const SetFunction& ts) {
  check_inputs(x, s);
  const int d = s.domain_size;
  const int need = d * s.signature.max_arity();
  if (ts.domain_size != d) throw InvalidInput("not a valid extractor: domain mismatch");
  if (ts.arity < need)
    throw InvalidInput("not a valid extractor: arity " + std::to_string(ts.arity) + " < " +
                       std::to_string(need));
  if (!set_function_preserves(ts, s))
    throw InvalidInput("not a valid extractor: not a polymorphism");

  auto w = good_witness(x, s);
  if (!w) return std::nullopt;
  Assignment out(x.domain_size);
  for (int v = 0; v < x.domain_size; ++v) {
    DomainMask u = w->allowed(v);
    Tuple row;
    for (int a = 0; a < d; ++a)
      if ((u >> a) & 1) row.push_back(a);
    const std::size_t set_size = row.size();
    while (static_cast<int>(row.size()) < ts.arity) row.push_back(row[row.size() - set_size]);
    out[v] = ts(row);
  }
  if (!is_homomorphism(out, x, s))
    throw VerificationFailure("width-1 extraction produced a non-solution");
  return out;
}

bool is_acyclic(const Instance& x) {
  // Union-find over variables and constraint occurrences; one edge per
  // tuple position.
  auto occ = occurrences(x);
  std::vector<int> parent(static_cast<std::size_t>(x.domain_size) + occ.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t c = 0; c < occ.size(); ++c) {
    int node = x.domain_size + static_cast<int>(c);
    for (int v : x.tables[occ[c].rel][occ[c].idx]) {
      int a = find(v), b = find(node);
      if (a == b) return false;
      parent[a] = b;
    }
  }
  return true;
}

std::optional<Assignment> acyclic_solve(const Instance& x, const Structure& s) {
  check_inputs(x, s);
  if (!is_acyclic(x)) throw InvalidInput("instance has a cycle");
  auto w = good_witness(x, s);
  if (!w) return std::nullopt;

  auto occ = occurrences(x);
  std::vector<std::vector<int>> touching(x.domain_size);
  for (std::size_t c = 0; c < occ.size(); ++c)
    for (int v : x.tables[occ[c].rel][occ[c].idx]) touching[v].push_back(static_cast<int>(c));

  Assignment g(x.domain_size, -1);
  std::vector<char> used(occ.size(), 0);
  for (int root = 0; root < x.domain_size; ++root) {
    if (g[root] >= 0) continue;
    g[root] = std::countr_zero(w->allowed(root));
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : touching[v]) {
        if (used[c]) continue;
        used[c] = 1;
        const Tuple& vars = x.tables[occ[c].rel][occ[c].idx];
        const Tuple* pick = nullptr;
        for (const auto& e : s.tables[occ[c].rel]) {
          bool ok = true;
          for (std::size_t i = 0; i < vars.size() && ok; ++i) {
            if (vars[i] == v) ok = e[i] == g[v];
            else ok = (w->allowed(vars[i]) >> e[i]) & 1;
          }
          if (ok) {
            pick = &e;
            break;
          }
        }
        if (!pick) throw VerificationFailure("closed witness lacks a support");
        for (std::size_t i = 0; i < vars.size(); ++i)
          if (vars[i] != v) {
            g[vars[i]] = (*pick)[i];
            stack.push_back(vars[i]);
          }
      }
    }
  }
  if (!is_homomorphism(g, x, s)) throw VerificationFailure("acyclic extension is not a solution");
  return g;
}

bool is_path(const Instance& x, const ClosedPath& p) {
  if (p.vars.size() != p.steps.size() + 1 || p.steps.empty()) return false;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& st = p.steps[i];
    if (st.relation < 0 || st.relation >= static_cast<int>(x.tables.size())) return false;
    const Table& t = x.tables[st.relation];
    if (!std::binary_search(t.begin(), t.end(), st.tuple)) return false;
    int k = static_cast<int>(st.tuple.size());
    if (st.from < 0 || st.to < 0 || st.from >= k || st.to >= k) return false;
    if (st.tuple[st.from] != p.vars[i] || st.tuple[st.to] != p.vars[i + 1]) return false;
  }
  return true;
}

DomainMask path_failures(const Structure& s, const Witness& w, const ClosedPath& p) {
  const int d = s.domain_size;
  // Binary projections pi_{j,k} R as successor masks.
  std::vector<std::vector<DomainMask>> succ(p.steps.size(), std::vector<DomainMask>(d, 0));
  for (std::size_t i = 0; i < p.steps.size(); ++i)
    for (const auto& e : s.tables[p.steps[i].relation])
      succ[i][e[p.steps[i].from]] |= DomainMask{1} << e[p.steps[i].to];

  DomainMask bad = 0;
  DomainMask start = w.allowed(p.vars.front());
  for (int a = 0; a < d; ++a) {
    if (!((start >> a) & 1)) continue;
    DomainMask cur = DomainMask{1} << a;
    for (std::size_t i = 0; i < p.steps.size() && cur; ++i) {
      DomainMask next = 0;
      for (int b = 0; b < d; ++b)
        if ((cur >> b) & 1) next |= succ[i][b];
      // a_n = a_1 carries no U condition of its own beyond U_{x_1}.
      cur = next & w.allowed(p.vars[i + 1]);
    }
    if (!((cur >> a) & 1)) bad |= DomainMask{1} << a;
  }
  return bad;
}

std::string AuditResult::label() const {
  std::string scope = "up to length " + std::to_string(max_len);
  if (pass) return "PASS (" + scope + ", " + std::to_string(cycles) + " cycles)";
  return "FAIL at value " + std::to_string(value) + " (" + scope + ")";
}

AuditResult cycle_consistency_audit(const Instance& x, const Structure& s, const Witness& w,
                                    std::size_t max_len, const Caps& caps) {
  check_inputs(x, s);
  if (max_len == 0) throw InvalidInput("max_len must be positive");
  if (w.domain_size != s.domain_size || static_cast<int>(w.excluded.size()) != x.domain_size)
    throw InvalidInput("witness does not match instance and template");
  if (!w.good()) throw InvalidInput("audit needs a good witness");

  // Incidence multigraph edges: (variable, occurrence, position).
  auto occ = occurrences(x);
  struct Edge {
    int var, occ, pos;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> var_edges(x.domain_size), occ_edges(occ.size());
  for (std::size_t c = 0; c < occ.size(); ++c) {
    const Tuple& t = x.tables[occ[c].rel][occ[c].idx];
    for (std::size_t i = 0; i < t.size(); ++i) {
      int id = static_cast<int>(edges.size());
      edges.push_back({t[i], static_cast<int>(c), static_cast<int>(i)});
      var_edges[t[i]].push_back(id);
      occ_edges[c].push_back(id);
    }
  }

  AuditResult res;
  res.max_len = max_len;
  std::size_t traversals = 0;
  std::vector<char> var_on(x.domain_size, 0), occ_on(occ.size(), 0), edge_on(edges.size(), 0);
  // Occurrences are not ordered against variables; every cycle is found from
  // its least variable, once per orientation.
  std::vector<int> path_vars;
  std::vector<int> step_in, step_out;

  auto check_cycle = [&]() -> bool {
    ClosedPath base;
    base.vars = path_vars;
    base.vars.push_back(path_vars.front());
    for (std::size_t i = 0; i < step_in.size(); ++i) {
      const Occ& o = occ[edges[step_in[i]].occ];
      base.steps.push_back({o.rel, x.tables[o.rel][o.idx], edges[step_in[i]].pos,
                            edges[step_out[i]].pos});
    }
    const std::size_t n = base.steps.size();
    for (std::size_t r = 0; r < n; ++r) {
      ClosedPath p;
      for (std::size_t i = 0; i <= n; ++i) p.vars.push_back(base.vars[(r + i) % n]);
      for (std::size_t i = 0; i < n; ++i) p.steps.push_back(base.steps[(r + i) % n]);
      DomainMask bad = path_failures(s, w, p);
      if (bad) {
        res.pass = false;
        res.value = std::countr_zero(bad);
        res.path = std::move(p);
        return true;
      }
    }
    return false;
  };

  // Depth-first enumeration; returns true to stop.
  std::function<bool(int, int)> dfs = [&](int start, int v) -> bool {
    if (step_in.size() >= max_len) return false;
    for (int e_in : var_edges[v]) {
      if (edge_on[e_in]) continue;
      int c = edges[e_in].occ;
      if (occ_on[c]) continue;
      occ_on[c] = 1;
      edge_on[e_in] = 1;
      for (int e_out : occ_edges[c]) {
        if (edge_on[e_out]) continue;
        int u = edges[e_out].var;
        if (u < start) continue;
        step_in.push_back(e_in);
        step_out.push_back(e_out);
        if (u == start) {
          ++traversals;
          if (traversals / 2 > caps.cycles)
            throw CapExceeded("cycles", traversals / 2, caps.cycles);
          if (check_cycle()) return true;
        } else if (!var_on[u]) {
          var_on[u] = 1;
          path_vars.push_back(u);
          if (dfs(start, u)) return true;
          path_vars.pop_back();
          var_on[u] = 0;
        }
        step_in.pop_back();
        step_out.pop_back();
      }
      edge_on[e_in] = 0;
      occ_on[c] = 0;
    }
    return false;
  };

  for (int start = 0; start < x.domain_size; ++start) {
    var_on[start] = 1;
    path_vars = {start};
    bool stop = dfs(start, start);
    var_on[start] = 0;
    if (stop) break;
  }
  res.cycles = (traversals + 1) / 2;
  return res;
}

}  // namespace polycsp
