// Brute-force reference implementations used only by the tests. Nothing here
// calls into the search engine, so agreement with the library is meaningful.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "polycsp/structure.hpp"

namespace oracle {

using polycsp::Assignment;
using polycsp::Instance;
using polycsp::Structure;
using polycsp::Tuple;

inline bool tuple_in(const polycsp::Table& t, const Tuple& x) {
  return std::find(t.begin(), t.end(), x) != t.end();
}

inline bool is_hom(const Assignment& f, const Instance& x, const Structure& s) {
  for (std::size_t r = 0; r < x.tables.size(); ++r)
    for (const auto& t : x.tables[r]) {
      Tuple img;
      for (int v : t) img.push_back(f[v]);
      if (!tuple_in(s.tables[r], img)) return false;
    }
  return true;
}

/// Calls `fn` on every map {0..n-1} -> {0..d-1}; stops when fn returns false.
inline void for_each_map(int n, int d, const std::function<bool(const Assignment&)>& fn) {
  if (d == 0 && n > 0) return;
  Assignment a(n, 0);
  while (true) {
    if (!fn(a)) return;
    int i = n - 1;
    while (i >= 0 && ++a[i] == d) a[i--] = 0;
    if (i < 0) return;
  }
}

inline std::vector<Assignment> all_solutions(const Instance& x, const Structure& s) {
  std::vector<Assignment> out;
  for_each_map(x.domain_size, s.domain_size, [&](const Assignment& a) {
    if (is_hom(a, x, s)) out.push_back(a);
    return true;
  });
  return out;
}

inline bool solvable(const Instance& x, const Structure& s) {
  bool found = false;
  for_each_map(x.domain_size, s.domain_size, [&](const Assignment& a) {
    found = is_hom(a, x, s);
    return !found;
  });
  return found;
}

inline bool bipartite(const Structure& g) {
  std::vector<int> col(g.domain_size, -1);
  for (int s = 0; s < g.domain_size; ++s) {
    if (col[s] >= 0) continue;
    col[s] = 0;
    std::vector<int> st{s};
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      for (const auto& e : g.tables[0]) {
        if (e[0] != u) continue;
        if (e[1] == u) return false;
        if (col[e[1]] < 0) {
          col[e[1]] = 1 - col[u];
          st.push_back(e[1]);
        } else if (col[e[1]] == col[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

/// Brute-force SAT over clauses of signed literals (+v / -v, 1-based).
inline bool sat(int vars, const std::vector<std::vector<int>>& clauses) {
  for (std::uint32_t m = 0; m < (1u << vars); ++m) {
    bool all = true;
    for (const auto& c : clauses) {
      bool any = false;
      for (int l : c) {
        bool val = (m >> (std::abs(l) - 1)) & 1;
        any = any || (l > 0 ? val : !val);
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

/// Random instance over the signature of `s`, `n` variables, `m` tuples.
inline Instance random_instance(const Structure& s, int n, int m, std::mt19937_64& rng) {
  Instance x(n, s.signature);
  std::uniform_int_distribution<int> pick_rel(0, static_cast<int>(s.tables.size()) - 1);
  std::uniform_int_distribution<int> pick_var(0, n - 1);
  for (int i = 0; i < m; ++i) {
    int r = pick_rel(rng);
    Tuple t(s.signature.relations[r].arity);
    for (int& v : t) v = pick_var(rng);
    x.tables[r].push_back(t);
  }
  x.canonicalize();
  return x;
}

/// Random structure with the given arities on domain d.
inline Structure random_structure(int d, const std::vector<int>& arities, double density,
                                  std::mt19937_64& rng) {
  Structure s(d, {});
  std::bernoulli_distribution coin(density);
  for (std::size_t r = 0; r < arities.size(); ++r) {
    polycsp::Table t;
    std::size_t total = 1;
    for (int i = 0; i < arities[r]; ++i) total *= d;
    for (std::size_t c = 0; c < total; ++c)
      if (coin(rng)) t.push_back(polycsp::decode_tuple(c, d, arities[r]));
    s.add_relation("R" + std::to_string(r), arities[r], t);
  }
  return s;
}

/// Plain backtracking edge 3-coloring; `fixed` holds -1 for free edges.
inline bool edge_colorable(int n, const std::vector<std::pair<int, int>>& edges,
                           std::vector<int> fixed) {
  std::vector<int> used(n, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (fixed[e] < 0) continue;
    int bit = 1 << fixed[e];
    if ((used[edges[e].first] | used[edges[e].second]) & bit) return false;
    used[edges[e].first] |= bit;
    used[edges[e].second] |= bit;
  }
  std::function<bool(std::size_t)> go = [&](std::size_t e) {
    while (e < edges.size() && fixed[e] >= 0) ++e;
    if (e == edges.size()) return true;
    auto [u, v] = edges[e];
    for (int c = 0; c < 3; ++c) {
      int bit = 1 << c;
      if ((used[u] | used[v]) & bit) continue;
      used[u] |= bit;
      used[v] |= bit;
      if (go(e + 1)) return true;
      used[u] &= ~bit;
      used[v] &= ~bit;
    }
    return false;
  };
  return go(0);
}

}  // namespace oracle
