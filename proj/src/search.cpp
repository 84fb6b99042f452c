#include "polycsp/search.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

#include "polycsp/errors.hpp"

namespace polycsp {

namespace {

constexpr std::uint64_t kFixedKey = 0xFFFFFFFFull;

inline int lowest(DomainMask m) { return std::countr_zero(m); }

}  // namespace

HomSearch::HomSearch(const Instance& x, const Structure& s, SearchOptions opts)
    : s_(s), n_vars_(x.domain_size), dsize_(s.domain_size), opts_(opts) {
  require_same_signature(x, s);
  if (s.domain_size > kMaxTemplateDomain)
    throw CapExceeded("template_domain", s.domain_size, kMaxTemplateDomain);

  rels_.resize(s.tables.size());
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    Rel& rel = rels_[r];
    rel.arity = s.signature.relations[r].arity;
    for (const auto& t : s.tables[r]) rel.flat.insert(rel.flat.end(), t.begin(), t.end());
    if (rel.arity == 1) {
      for (const auto& t : s.tables[r]) rel.unary |= DomainMask{1} << t[0];
    } else if (rel.arity == 2) {
      rel.succ.assign(dsize_, 0);
      rel.pred.assign(dsize_, 0);
      for (const auto& t : s.tables[r]) {
        rel.succ[t[0]] |= DomainMask{1} << t[1];
        rel.pred[t[1]] |= DomainMask{1} << t[0];
        if (t[0] == t[1]) rel.diag |= DomainMask{1} << t[0];
      }
    }
  }

  std::vector<std::uint32_t> deg(n_vars_ + 1, 0);
  for (std::size_t r = 0; r < x.tables.size(); ++r) {
    for (const auto& t : x.tables[r]) {
      for (int v : t)
        if (v < 0 || v >= n_vars_) throw InvalidInput("instance variable out of range");
      cons_.push_back({static_cast<int>(r), static_cast<std::uint32_t>(cvars_.size()),
                       static_cast<int>(t.size())});
      cvars_.insert(cvars_.end(), t.begin(), t.end());
      for (std::size_t i = 0; i < t.size(); ++i) {
        // Count each variable once per constraint.
        if (std::find(t.begin(), t.begin() + i, t[i]) == t.begin() + i) ++deg[t[i]];
      }
    }
  }
  adj_off_.assign(n_vars_ + 1, 0);
  for (int v = 0; v < n_vars_; ++v) adj_off_[v + 1] = adj_off_[v] + deg[v];
  adj_.assign(adj_off_[n_vars_], 0);
  std::vector<std::uint32_t> fill(adj_off_.begin(), adj_off_.end() - 1);
  for (std::size_t c = 0; c < cons_.size(); ++c) {
    const int* vs = cvars_.data() + cons_[c].off;
    for (int i = 0; i < cons_[c].arity; ++i)
      if (std::find(vs, vs + i, vs[i]) == vs + i) adj_[fill[vs[i]]++] = static_cast<int>(c);
  }

  dom_.assign(n_vars_, full_mask(dsize_));
  in_queue_.assign(cons_.size(), 0);
  while (tree_size_ < std::max(n_vars_, 1)) tree_size_ *= 2;
  tree_.assign(2 * tree_size_, std::numeric_limits<std::uint64_t>::max());
  for (int v = 0; v < n_vars_; ++v) tree_update(v);
  if (dsize_ == 0 && n_vars_ > 0) failed_ = true;

  // Seed the queue with every constraint; the first propagate() call
  // establishes arc consistency.
  for (std::size_t c = 0; c < cons_.size(); ++c) {
    queue_.push_back(static_cast<int>(c));
    in_queue_[c] = 1;
  }
}

void HomSearch::tree_update(int v) {
  int pc = std::popcount(dom_[v]);
  std::uint64_t key;
  if (pc <= 1)
    key = kFixedKey;
  else
    key = opts_.order == VarOrder::Mrv ? static_cast<std::uint64_t>(pc) : 0;
  std::size_t i = tree_size_ + v;
  tree_[i] = (key << 32) | static_cast<std::uint64_t>(v);
  for (i /= 2; i >= 1; i /= 2) tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
}

int HomSearch::select_var() const {
  if (n_vars_ == 0) return -1;
  std::uint64_t top = tree_[1];
  if ((top >> 32) == kFixedKey) return -1;
  return static_cast<int>(top & 0xFFFFFFFFull);
}

void HomSearch::set_dom(int v, DomainMask m) {
  trail_.emplace_back(v, dom_[v]);
  dom_[v] = m;
  tree_update(v);
  for (std::uint32_t k = adj_off_[v]; k < adj_off_[v + 1]; ++k) {
    int c = adj_[k];
    if (!in_queue_[c]) {
      in_queue_[c] = 1;
      queue_.push_back(c);
    }
  }
}

void HomSearch::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    auto [v, m] = trail_.back();
    trail_.pop_back();
    dom_[v] = m;
    tree_update(v);
  }
}

bool HomSearch::revise(int ci) {
  const Con& c = cons_[ci];
  const Rel& rel = rels_[c.rel];
  const int* vs = cvars_.data() + c.off;
  if (c.arity == 1) {
    DomainMask m = dom_[vs[0]] & rel.unary;
    if (m != dom_[vs[0]]) {
      if (!m) return false;
      set_dom(vs[0], m);
    }
    return true;
  }
  if (c.arity == 2) {
    int u = vs[0], w = vs[1];
    if (u == w) {
      DomainMask m = dom_[u] & rel.diag;
      if (m != dom_[u]) {
        if (!m) return false;
        set_dom(u, m);
      }
      return true;
    }
    DomainMask du = dom_[u], dw = dom_[w], nu = 0, nw = 0;
    for (DomainMask it = du; it; it &= it - 1) {
      int a = lowest(it);
      if (rel.succ[a] & dw) nu |= DomainMask{1} << a;
    }
    if (!nu) return false;
    for (DomainMask it = dw; it; it &= it - 1) {
      int b = lowest(it);
      if (rel.pred[b] & nu) nw |= DomainMask{1} << b;
    }
    if (!nw) return false;
    if (nu != du) set_dom(u, nu);
    if (nw != dw) set_dom(w, nw);
    return true;
  }
  // General arity: scan the table for tuples compatible with current domains.
  int k = c.arity;
  int rep[64];
  DomainMask sup[64];
  for (int i = 0; i < k; ++i) {
    rep[i] = i;
    for (int j = 0; j < i; ++j)
      if (vs[j] == vs[i]) {
        rep[i] = j;
        break;
      }
    sup[i] = 0;
  }
  const int* t = rel.flat.data();
  std::size_t n = rel.flat.size() / k;
  for (std::size_t row = 0; row < n; ++row, t += k) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      ok = ((dom_[vs[i]] >> t[i]) & 1) && t[i] == t[rep[i]];
    if (!ok) continue;
    for (int i = 0; i < k; ++i) sup[i] |= DomainMask{1} << t[i];
  }
  for (int i = 0; i < k; ++i) {
    if (rep[i] != i) continue;
    DomainMask m = dom_[vs[i]] & sup[i];
    if (!m) return false;
    if (m != dom_[vs[i]]) set_dom(vs[i], m);
  }
  return true;
}

bool HomSearch::propagate_queue() {
  while (!queue_.empty()) {
    int c = queue_.back();
    queue_.pop_back();
    in_queue_[c] = 0;
    if (!revise(c)) {
      for (int q : queue_) in_queue_[q] = 0;
      queue_.clear();
      return false;
    }
  }
  return true;
}

bool HomSearch::propagate() {
  if (failed_) return false;
  if (!propagate_queue()) failed_ = true;
  return !failed_;
}

bool HomSearch::restrict(int var, DomainMask allowed) {
  if (var < 0 || var >= n_vars_) throw InvalidInput("variable out of range");
  DomainMask m = dom_[var] & allowed;
  if (m != dom_[var]) set_dom(var, m);
  if (!m) failed_ = true;
  return m != 0;
}

bool HomSearch::apply_seed(const PartialAssignment& seed) {
  if (seed.size() > static_cast<std::size_t>(n_vars_))
    throw InvalidInput("seed longer than variable count");
  bool ok = true;
  for (std::size_t v = 0; v < seed.size(); ++v) {
    if (!seed[v]) continue;
    int a = *seed[v];
    if (a < 0 || a >= dsize_) throw InvalidInput("seed value out of range");
    ok = restrict(static_cast<int>(v), DomainMask{1} << a) && ok;
  }
  return ok;
}

bool HomSearch::search_from_here(Assignment* out) {
  // Iterative DFS so deep instances do not exhaust the call stack.
  struct Frame {
    int var;
    DomainMask remaining;
    std::size_t mark;
  };
  std::size_t base = trail_.size();
  std::vector<Frame> stack;
  bool descend = true;
  while (true) {
    if (descend) {
      int v = select_var();
      if (v < 0) {
        if (out) {
          out->assign(n_vars_, 0);
          for (int i = 0; i < n_vars_; ++i) (*out)[i] = lowest(dom_[i]);
        }
        undo_to(base);
        return true;
      }
      stack.push_back({v, dom_[v], trail_.size()});
    }
    Frame& f = stack.back();
    undo_to(f.mark);
    descend = false;
    while (f.remaining) {
      int a = lowest(f.remaining);
      f.remaining &= f.remaining - 1;
      if (++nodes_ > opts_.caps.search_nodes)
        throw CapExceeded("search_nodes", nodes_, opts_.caps.search_nodes);
      set_dom(f.var, DomainMask{1} << a);
      if (propagate_queue()) {
        descend = true;
        break;
      }
      undo_to(f.mark);
    }
    if (descend) continue;
    stack.pop_back();
    if (stack.empty()) {
      undo_to(base);
      return false;
    }
  }
}

std::optional<Assignment> HomSearch::solve() {
  if (!propagate()) return std::nullopt;
  Assignment a;
  if (!search_from_here(&a)) return std::nullopt;
  return a;
}

std::set<Tuple> HomSearch::project(const std::vector<int>& vars, std::size_t limit) {
  std::set<Tuple> out;
  for (int v : vars)
    if (v < 0 || v >= n_vars_) throw InvalidInput("projection variable out of range");
  if (!propagate()) return out;
  if (vars.empty()) {
    if (search_from_here(nullptr)) out.insert(Tuple{});
    return out;
  }
  // Branch over the projected variables; each leaf needs one existence check.
  Tuple cur(vars.size());
  std::vector<std::pair<DomainMask, std::size_t>> stack;
  std::size_t base = trail_.size();
  stack.push_back({dom_[vars[0]], base});
  while (!stack.empty()) {
    std::size_t depth = stack.size() - 1;
    auto& [remaining, mark] = stack.back();
    undo_to(mark);
    if (!remaining) {
      stack.pop_back();
      continue;
    }
    int a = lowest(remaining);
    remaining &= remaining - 1;
    if (++nodes_ > opts_.caps.search_nodes)
      throw CapExceeded("search_nodes", nodes_, opts_.caps.search_nodes);
    std::size_t m = mark;
    if (!((dom_[vars[depth]] >> a) & 1)) continue;
    set_dom(vars[depth], DomainMask{1} << a);
    if (!propagate_queue()) {
      undo_to(m);
      continue;
    }
    cur[depth] = a;
    if (depth + 1 == vars.size()) {
      if (search_from_here(nullptr)) {
        out.insert(cur);
        if (out.size() > limit) throw CapExceeded("projection_size", out.size(), limit);
      }
      undo_to(m);
    } else {
      stack.push_back({dom_[vars[depth + 1]], trail_.size()});
    }
  }
  undo_to(base);
  return out;
}

std::optional<Assignment> find_homomorphism(const Instance& x, const Structure& s,
                                            const PartialAssignment& seed,
                                            const SearchOptions& opts) {
  HomSearch h(x, s, opts);
  if (!h.apply_seed(seed)) return std::nullopt;
  auto r = h.solve();
  if (r && !is_homomorphism(*r, x, s))
    throw VerificationFailure("search returned a non-homomorphism");
  return r;
}

std::optional<Assignment> find_homomorphism_within(const Instance& x, const Structure& s,
                                                   const std::vector<DomainMask>& domains,
                                                   const SearchOptions& opts) {
  HomSearch h(x, s, opts);
  for (std::size_t v = 0; v < domains.size(); ++v)
    if (!h.restrict(static_cast<int>(v), domains[v])) return std::nullopt;
  return h.solve();
}

bool is_homomorphism(const Assignment& f, const Instance& x, const Structure& s) {
  require_same_signature(x, s);
  if (f.size() != static_cast<std::size_t>(x.domain_size))
    throw InvalidInput("assignment is not total");
  for (int v : f)
    if (v < 0 || v >= s.domain_size) return false;
  Tuple img;
  for (std::size_t r = 0; r < x.tables.size(); ++r) {
    for (const auto& t : x.tables[r]) {
      img.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) img[i] = f[t[i]];
      if (!s.holds(r, img)) return false;
    }
  }
  return true;
}

std::set<Tuple> project_solutions(const Instance& x, const Structure& s,
                                  const std::vector<int>& vars, const SearchOptions& opts) {
  if (vars.empty()) throw InvalidInput("projection needs at least one variable");
  HomSearch h(x, s, opts);
  return h.project(vars);
}

Structure induced_substructure(const Structure& s, const std::vector<int>& keep) {
  std::vector<int> pos(s.domain_size, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
  Structure out(static_cast<int>(keep.size()), s.signature);
  for (std::size_t r = 0; r < s.tables.size(); ++r) {
    for (const auto& t : s.tables[r]) {
      Tuple u(t.size());
      bool in = true;
      for (std::size_t i = 0; i < t.size() && in; ++i) {
        u[i] = pos[t[i]];
        in = u[i] >= 0;
      }
      if (in) out.tables[r].push_back(std::move(u));
    }
    canonicalize(out.tables[r]);
  }
  return out;
}

CoreResult find_core(const Structure& s, const SearchOptions& opts) {
  require_valid(s);
  // cur: current image (sorted s-elements); ret: s-element -> s-element in cur.
  std::vector<int> cur(s.domain_size);
  std::iota(cur.begin(), cur.end(), 0);
  std::vector<int> ret = cur;
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    Structure sub = induced_substructure(s, cur);
    for (int v = 0; v < sub.domain_size; ++v) {
      std::vector<DomainMask> doms(sub.domain_size,
                                   full_mask(sub.domain_size) & ~(DomainMask{1} << v));
      auto h = find_homomorphism_within(sub, sub, doms, opts);
      if (!h) continue;
      std::vector<int> image(h->begin(), h->end());
      std::sort(image.begin(), image.end());
      image.erase(std::unique(image.begin(), image.end()), image.end());
      for (int& e : ret) {
        int idx = static_cast<int>(std::lower_bound(cur.begin(), cur.end(), e) - cur.begin());
        e = cur[(*h)[idx]];
      }
      std::vector<int> next;
      for (int i : image) next.push_back(cur[i]);
      cur = std::move(next);
      shrunk = true;
      break;
    }
  }
  CoreResult res;
  res.core = induced_substructure(s, cur);
  res.elements = cur;
  std::vector<int> idx(s.domain_size, -1);
  for (std::size_t i = 0; i < cur.size(); ++i) idx[cur[i]] = static_cast<int>(i);
  // ret restricted to the core is an automorphism alpha; compose with its
  // inverse so the retraction fixes the core pointwise.
  std::vector<int> alpha(cur.size()), alpha_inv(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) alpha[i] = idx[ret[cur[i]]];
  for (std::size_t i = 0; i < cur.size(); ++i) alpha_inv[alpha[i]] = static_cast<int>(i);
  res.retraction.resize(s.domain_size);
  for (int e = 0; e < s.domain_size; ++e) res.retraction[e] = alpha_inv[idx[ret[e]]];
  if (!is_homomorphism(res.retraction, s, res.core))
    throw VerificationFailure("core retraction is not a homomorphism");
  return res;
}

bool hom_equivalent(const Structure& s, const Structure& t, const SearchOptions& opts) {
  require_same_signature(s, t);
  return find_homomorphism(s, t, {}, opts) && find_homomorphism(t, s, {}, opts);
}

std::vector<Assignment> all_homomorphisms(const Instance& x, const Structure& s,
                                          std::size_t limit, const SearchOptions& opts) {
  std::vector<Assignment> out;
  if (x.domain_size == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> vars(x.domain_size);
  std::iota(vars.begin(), vars.end(), 0);
  HomSearch h(x, s, opts);
  for (const auto& t : h.project(vars, limit)) out.push_back(t);
  return out;
}

}  // namespace polycsp
