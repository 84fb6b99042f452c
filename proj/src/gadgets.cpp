#include "polycsp/gadgets.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "polycsp/errors.hpp"
#include "polycsp/sat.hpp"

namespace polycsp {

int Graph::add_vertex() { return vertex_count++; }

int Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
    throw InvalidInput("edge endpoint out of range");
  if (u == v) throw InvalidInput("loop at vertex " + std::to_string(u));
  for (const auto& [a, b] : edges)
    if ((a == u && b == v) || (a == v && b == u))
      throw InvalidInput("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
  edges.emplace_back(u, v);
  return static_cast<int>(edges.size()) - 1;
}

int Graph::degree(int v) const {
  int d = 0;
  for (const auto& [a, b] : edges) d += (a == v) + (b == v);
  return d;
}

int Graph::max_degree() const {
  std::vector<int> deg(vertex_count, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

void Graph::validate() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
      throw InvalidInput("edge endpoint out of range");
    if (a == b) throw InvalidInput("loop at vertex " + std::to_string(a));
    if (!seen.insert(std::minmax(a, b)).second)
      throw InvalidInput("duplicate edge " + std::to_string(a) + " " + std::to_string(b));
  }
}

bool is_proper_coloring(const Graph& g, const EdgeColoring& c) {
  if (c.size() != g.edges.size()) return false;
  std::vector<int> used(g.vertex_count, 0);
  for (std::size_t e = 0; e < c.size(); ++e) {
    if (c[e] < 0 || c[e] > 2) return false;
    int bit = 1 << c[e];
    auto [u, v] = g.edges[e];
    if ((used[u] & bit) || (used[v] & bit)) return false;
    used[u] |= bit;
    used[v] |= bit;
  }
  return true;
}

int Gadget::internal_vertex_count() const {
  return graph.vertex_count - static_cast<int>(coding_edges.size());
}

void Gadget::validate() const {
  graph.validate();
  std::set<int> stubs;
  for (int e : coding_edges) {
    if (e < 0 || e >= static_cast<int>(graph.edges.size()))
      throw InvalidInput("coding edge " + std::to_string(e) + " is not an edge");
    int s = graph.edges[e].second;
    if (graph.degree(s) != 1 || !stubs.insert(s).second)
      throw InvalidInput("coding edge " + std::to_string(e) + " does not end at its own stub");
  }
  if (!admits) throw InvalidInput("gadget has no boundary predicate");
}

namespace {

// Relabels colors in order of first occurrence.
Tuple canonical_pattern(const Tuple& p) {
  int map[3] = {-1, -1, -1};
  int next = 0;
  Tuple out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (map[p[i]] < 0) map[p[i]] = next++;
    out[i] = map[p[i]];
  }
  return out;
}

bool boundary_proper(const Gadget& g, const Tuple& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] == p[j] && g.anchor(i) == g.anchor(j)) return false;
  return true;
}

}  // namespace

Table Gadget::admissible(const Caps& caps) const {
  const std::size_t k = coding_edges.size();
  const std::size_t total = checked_pow(3, k, caps.gadget_patterns, "gadget_patterns");
  Table out;
  for (std::size_t i = 0; i < total; ++i) {
    Tuple p = decode_tuple(i, 3, static_cast<int>(k));
    if (boundary_proper(*this, p) && admits(p)) out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Edge coloring search

std::optional<EdgeColoring> extend_edge_coloring(const Graph& g, const EdgeColoring& partial,
                                                 const Caps& caps) {
  const int m = static_cast<int>(g.edges.size());
  if (static_cast<int>(partial.size()) != m)
    throw InvalidInput("partial coloring has the wrong length");
  std::vector<int> fixed_mask(g.vertex_count, 0);
  for (int e = 0; e < m; ++e) {
    int c = partial[e];
    if (c < -1 || c > 2) throw InvalidInput("edge colors are 0, 1, 2 or -1");
    if (c < 0) continue;
    auto [u, v] = g.edges[e];
    if ((fixed_mask[u] >> c & 1) || (fixed_mask[v] >> c & 1)) return std::nullopt;
    fixed_mask[u] |= 1 << c;
    fixed_mask[v] |= 1 << c;
  }

  // Components of free edges, adjacent when they share a vertex.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<int>> free_at(g.vertex_count);
  for (int e = 0; e < m; ++e)
    if (partial[e] < 0) {
      free_at[g.edges[e].first].push_back(e);
      free_at[g.edges[e].second].push_back(e);
    }
  for (const auto& es : free_at)
    for (std::size_t i = 1; i < es.size(); ++i) parent[find(es[i])] = find(es[0]);
  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(m, -1);
  for (int e = 0; e < m; ++e) {
    if (partial[e] >= 0) continue;
    int r = find(e);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[r]].push_back(e);
  }

  EdgeColoring out = partial;
  std::vector<int> local(m, -1);
  for (const auto& comp : comps) {
    SatSolver sat(3 * static_cast<int>(comp.size()));
    bool touches_fixed = false;
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      auto [u, v] = g.edges[comp[i]];
      int banned = fixed_mask[u] | fixed_mask[v];
      touches_fixed = touches_fixed || banned;
      std::vector<int> alo;
      for (int c = 0; c < 3; ++c) {
        int var = 3 * static_cast<int>(i) + c;
        if (banned >> c & 1) sat.add_clause({SatSolver::neg(var)});
        else alo.push_back(SatSolver::pos(var));
      }
      if (alo.empty()) return std::nullopt;
      sat.add_clause(alo);
    }
    std::set<int> verts;
    for (int e : comp) {
      verts.insert(g.edges[e].first);
      verts.insert(g.edges[e].second);
    }
    for (int w : verts) {
      const auto& es = free_at[w];
      for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = i + 1; j < es.size(); ++j)
          for (int c = 0; c < 3; ++c)
            sat.add_clause({SatSolver::neg(3 * local[es[i]] + c), SatSolver::neg(3 * local[es[j]] + c)});
      // A vertex of degree 3 sees every color.
      if (es.size() + std::popcount(static_cast<unsigned>(fixed_mask[w])) == 3)
        for (int c = 0; c < 3; ++c) {
          if (fixed_mask[w] >> c & 1) continue;
          std::vector<int> alo;
          for (int e : es) alo.push_back(SatSolver::pos(3 * local[e] + c));
          sat.add_clause(alo);
        }
    }
    // Colors of an untouched component can be permuted freely.
    if (!touches_fixed) sat.add_clause({SatSolver::pos(0)});
    auto res = sat.solve(caps.search_nodes);
    if (res == SatSolver::Result::Unknown)
      throw CapExceeded("search_nodes", sat.conflicts() + 1, caps.search_nodes);
    if (res == SatSolver::Result::Unsat) return std::nullopt;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (int c = 0; c < 3; ++c)
        if (sat.value(3 * static_cast<int>(i) + c)) {
          out[comp[i]] = c;
          break;
        }
  }
  if (!is_proper_coloring(g, out)) throw VerificationFailure("edge coloring search returned an improper coloring");
  return out;
}

std::optional<EdgeColoring> brute_force_edge_coloring(const Graph& g, const Caps& caps) {
  g.validate();
  if (g.edges.size() > caps.coloring_edges)
    throw CapExceeded("coloring_edges", g.edges.size(), caps.coloring_edges);
  return extend_edge_coloring(g, EdgeColoring(g.edges.size(), -1), caps);
}

// ---------------------------------------------------------------------------
// Verification

namespace {

bool extends(const Gadget& g, const Tuple& p, const Caps& caps) {
  EdgeColoring partial(g.graph.edges.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i) partial[g.coding_edges[i]] = p[i];
  return extend_edge_coloring(g.graph, partial, caps).has_value();
}

void check_symmetric(const Gadget& g, std::size_t total, std::size_t k) {
  for (std::size_t i = 0; i < total; ++i) {
    Tuple p = decode_tuple(i, 3, static_cast<int>(k));
    if (g.admits(p) != g.admits(canonical_pattern(p)))
      throw InvalidInput("boundary predicate is not closed under color permutations");
  }
}

}  // namespace

GadgetVerdict verify_gadget(const Gadget& g, const Caps& caps, bool transcript) {
  g.validate();
  const std::size_t k = g.coding_edges.size();
  const std::size_t total = checked_pow(3, k, caps.gadget_patterns, "gadget_patterns");
  check_symmetric(g, total, k);

  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < total; ++i) {
    Tuple p = decode_tuple(i, 3, static_cast<int>(k));
    if (p == canonical_pattern(p) && boundary_proper(g, p)) reps.push_back(i);
  }
  std::vector<char> ext(reps.size(), 0);
  const long long n = static_cast<long long>(reps.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long r = 0; r < n; ++r)
    ext[r] = extends(g, decode_tuple(reps[r], 3, static_cast<int>(k)), caps);

  GadgetVerdict v;
  v.searched = reps.size();
  std::vector<char> ext_of(total, 0);
  for (std::size_t r = 0; r < reps.size(); ++r) ext_of[reps[r]] = ext[r];
  for (std::size_t i = 0; i < total; ++i) {
    Tuple p = decode_tuple(i, 3, static_cast<int>(k));
    if (!boundary_proper(g, p)) continue;
    ++v.patterns;
    bool e = ext_of[encode_tuple(canonical_pattern(p), 3)];
    bool a = g.admits(p);
    if (transcript) v.transcript.emplace_back(p, e);
    if (e != a && v.pass) {
      v.pass = false;
      v.counterexample = p;
      v.counterexample_admitted = a;
    }
  }
  return v;
}

GadgetVerdict verify_gadget_serial(const Gadget& g, const Caps& caps, bool transcript) {
  g.validate();
  const std::size_t k = g.coding_edges.size();
  const std::size_t total = checked_pow(3, k, caps.gadget_patterns, "gadget_patterns");
  check_symmetric(g, total, k);
  GadgetVerdict v;
  for (std::size_t i = 0; i < total; ++i) {
    Tuple p = decode_tuple(i, 3, static_cast<int>(k));
    if (!boundary_proper(g, p)) continue;
    ++v.patterns;
    ++v.searched;
    bool e = extends(g, p, caps);
    bool a = g.admits(p);
    if (transcript) v.transcript.emplace_back(p, e);
    if (e != a && v.pass) {
      v.pass = false;
      v.counterexample = p;
      v.counterexample_admitted = a;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Gadgets

namespace {

// Wires gadget copies together. Stubs of placed gadgets are dropped; their
// coding edges become ports at the anchors.
struct Assembly {
  Graph g;
  std::vector<int> coding;

  std::vector<int> place(const Gadget& gd, GadgetCopy* copy = nullptr) {
    std::vector<int> map(gd.graph.vertex_count, -1);
    std::vector<char> is_stub(gd.graph.vertex_count, 0);
    for (std::size_t i = 0; i < gd.coding_edges.size(); ++i) is_stub[gd.stub(i)] = 1;
    int first = g.vertex_count;
    for (int v = 0; v < gd.graph.vertex_count; ++v)
      if (!is_stub[v]) map[v] = g.add_vertex();
    std::vector<char> is_coding(gd.graph.edges.size(), 0);
    for (int e : gd.coding_edges) is_coding[e] = 1;
    for (std::size_t e = 0; e < gd.graph.edges.size(); ++e)
      if (!is_coding[e]) g.edges.emplace_back(map[gd.graph.edges[e].first], map[gd.graph.edges[e].second]);
    if (copy) {
      copy->first_vertex = first;
      copy->vertex_count = g.vertex_count - first;
    }
    std::vector<int> ports;
    for (std::size_t i = 0; i < gd.coding_edges.size(); ++i) ports.push_back(map[gd.anchor(i)]);
    return ports;
  }
  int join(int a, int b) { return g.add_edge(a, b); }
  void expose(int a) {
    int s = g.add_vertex();
    coding.push_back(g.add_edge(a, s));
  }
};

enum Port { kA = 0, kB, kC, kD, kE };

bool some_pair_agrees(const Tuple& p) {
  for (std::size_t i = 0; i + 1 < p.size(); i += 2)
    if (p[i] == p[i + 1]) return true;
  return false;
}

bool pairs_uniform(const Tuple& p) {
  bool all_agree = true, all_disagree = true;
  for (std::size_t i = 0; i + 1 < p.size(); i += 2) {
    all_agree = all_agree && p[i] == p[i + 1];
    all_disagree = all_disagree && p[i] != p[i + 1];
  }
  return all_agree || all_disagree;
}

// Two H's in series whose e edges feed the next block's input pair, and a
// third H freeing the output colors. Agreement propagates around the ring, so
// either every input pair agrees or none does.
Gadget setter_ring(int n) {
  Assembly a;
  const Gadget h = inverter();
  std::vector<std::vector<int>> x, y, b;
  for (int j = 0; j < n; ++j) {
    x.push_back(a.place(h));
    y.push_back(a.place(h));
    b.push_back(a.place(h));
  }
  for (int j = 0; j < n; ++j) {
    const int next = (j + 1) % n;
    a.join(x[j][kC], y[j][kA]);
    a.join(x[j][kD], y[j][kB]);
    a.join(x[j][kE], x[next][kA]);
    a.join(y[j][kE], x[next][kB]);
    a.join(y[j][kC], b[j][kA]);
    a.join(y[j][kD], b[j][kB]);
  }
  for (int j = 0; j < n; ++j) {
    a.expose(b[j][kC]);
    a.expose(b[j][kD]);
  }
  return {"variable_setter(" + std::to_string(n) + ")", a.g, a.coding, pairs_uniform};
}

Gadget setter_single() {
  Assembly a;
  auto h = a.place(inverter());
  a.expose(h[kA]);
  a.expose(h[kB]);
  return {"variable_setter(1)", a.g, a.coding, pairs_uniform};
}

const Gadget& verified_small_setter(int n) {
  static std::once_flag flags[5];
  static Gadget cache[5];
  std::call_once(flags[n], [n] {
    Gadget g = n == 1 ? setter_single() : setter_ring(n);
    auto v = verify_gadget(g);
    if (!v.pass) throw VerificationFailure(g.name + " failed verification");
    cache[n] = std::move(g);
  });
  return cache[n];
}

}  // namespace

Gadget inverter() {
  // Vertices 0..4 are the stubs of a, b, e, c, d.
  Graph g;
  g.vertex_count = 12;
  Gadget out;
  out.name = "inverter";
  const int coding[5][2] = {{5, 0}, {6, 1}, {10, 3}, {11, 4}, {8, 2}};  // a b c d e
  for (const auto& e : coding) out.coding_edges.push_back(g.add_edge(e[0], e[1]));
  const int internal[8][2] = {{5, 7}, {5, 10}, {6, 9}, {6, 11}, {7, 8}, {7, 11}, {8, 9}, {9, 10}};
  for (const auto& e : internal) g.add_edge(e[0], e[1]);
  out.graph = g;
  out.admits = [](const Tuple& p) {
    int a = p[0], b = p[1], c = p[2], d = p[3], e = p[4];
    return (a == b && e != c && c != d && d != e) || (c == d && e != a && a != b && b != e);
  };
  return out;
}

Gadget or_gate() {
  // The three Q pairs form a triangle with one side subdivided, so they
  // cannot all agree.
  Assembly a;
  const Gadget h = inverter();
  std::vector<std::vector<int>> hs;
  for (int i = 0; i < 3; ++i) hs.push_back(a.place(h));
  a.join(hs[0][kC], hs[1][kC]);
  a.join(hs[0][kD], hs[2][kC]);
  int mid = a.g.add_vertex();
  a.join(hs[1][kD], mid);
  a.join(hs[2][kD], mid);
  for (int i = 0; i < 3; ++i) {
    a.expose(hs[i][kA]);
    a.expose(hs[i][kB]);
  }
  return {"or_gate", a.g, a.coding, some_pair_agrees};
}

Gadget or_gate_as_drawn() {
  Assembly a;
  const Gadget h = inverter();
  std::vector<std::vector<int>> hs;
  for (int i = 0; i < 3; ++i) hs.push_back(a.place(h));
  int v13 = a.g.add_vertex(), v18 = a.g.add_vertex(), v19 = a.g.add_vertex();
  a.join(hs[0][kB], v13);
  a.join(hs[2][kA], v18);
  a.join(v13, v18);
  a.join(v13, v19);
  a.join(v19, v18);
  // Ends that stop at degree-1 vertices in the drawing.
  for (auto [i, port] : {std::pair{0, kA}, {1, kA}, {1, kB}, {2, kB}, {0, kE}, {1, kE}, {2, kE}})
    a.join(hs[i][port], a.g.add_vertex());
  for (int i = 0; i < 3; ++i) {
    a.expose(hs[i][kD]);
    a.expose(hs[i][kC]);
  }
  return {"or_gate_as_drawn", a.g, a.coding, some_pair_agrees};
}

Gadget variable_setter(int n, const Caps& caps) {
  if (n < 1) throw InvalidInput("variable_setter needs n >= 1");
  if (static_cast<std::size_t>(n) > caps.setter_pairs)
    throw CapExceeded("setter_pairs", n, caps.setter_pairs);
  if (n <= 4) return verified_small_setter(n);

  // Chain blocks of four, joining the last pair of one block to the first
  // pair of the next; each join uses up two pairs.
  std::vector<int> sizes{4};
  int have = 4;
  while (have < n) {
    int add = std::min(2, n - have);
    sizes.push_back(add + 2);
    have += add;
  }
  Assembly a;
  std::vector<std::pair<int, int>> out_pairs;
  std::pair<int, int> tail{-1, -1};
  for (std::size_t bi = 0; bi < sizes.size(); ++bi) {
    auto ports = a.place(verified_small_setter(sizes[bi]));
    int pairs = sizes[bi];
    int first = 0;
    if (bi > 0) {
      a.join(tail.first, ports[0]);
      a.join(tail.second, ports[1]);
      first = 1;
    }
    int last = bi + 1 < sizes.size() ? pairs - 1 : pairs;
    for (int j = first; j < last; ++j) out_pairs.emplace_back(ports[2 * j], ports[2 * j + 1]);
    if (bi + 1 < sizes.size()) tail = {ports[2 * (pairs - 1)], ports[2 * (pairs - 1) + 1]};
  }
  for (auto [p, q] : out_pairs) {
    a.expose(p);
    a.expose(q);
  }
  return {"variable_setter(" + std::to_string(n) + ")", a.g, a.coding, pairs_uniform};
}

// ---------------------------------------------------------------------------
// 3SAT reduction

void CNFInstance::validate() const {
  if (variable_count < 0) throw InvalidInput("negative variable count");
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto& c = clauses[i];
    for (std::size_t j = 0; j < 3; ++j) {
      if (c[j].var < 0 || c[j].var >= variable_count)
        throw InvalidInput("clause " + std::to_string(i) + " uses an undeclared variable");
      for (std::size_t k = 0; k < j; ++k)
        if (c[k].var == c[j].var)
          throw InvalidInput("clause " + std::to_string(i) + " repeats variable " +
                             std::to_string(c[j].var));
    }
  }
}

bool CNFInstance::satisfied_by(const Assignment& a) const {
  if (static_cast<int>(a.size()) != variable_count) return false;
  for (const auto& c : clauses) {
    bool sat = false;
    for (const auto& l : c) sat = sat || ((a[l.var] != 0) != l.negated);
    if (!sat) return false;
  }
  return true;
}

namespace {

struct Occurrence {
  int clause;
  int pos;
  bool negated;
};

std::vector<std::vector<Occurrence>> occurrences(const CNFInstance& phi) {
  std::vector<std::vector<Occurrence>> occ(phi.variable_count);
  for (std::size_t i = 0; i < phi.clauses.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      const auto& l = phi.clauses[i][k];
      occ[l.var].push_back({static_cast<int>(i), k, l.negated});
    }
  return occ;
}

}  // namespace

SatReduction reduce_3sat(const CNFInstance& phi, const Caps& caps) {
  phi.validate();
  const auto occ = occurrences(phi);
  Assembly a;
  CodingRecord rec;
  rec.setter.assign(phi.variable_count, std::nullopt);
  rec.setter_pairs.resize(phi.variable_count);
  rec.gate_pairs.resize(phi.clauses.size());

  std::vector<std::vector<int>> setter_ports(phi.variable_count);
  for (int v = 0; v < phi.variable_count; ++v) {
    if (occ[v].empty()) continue;
    GadgetCopy copy{"setter", 0, 0};
    setter_ports[v] = a.place(variable_setter(static_cast<int>(occ[v].size()), caps), &copy);
    rec.setter[v] = static_cast<int>(rec.copies.size());
    rec.copies.push_back(copy);
  }
  const Gadget gate = or_gate();
  std::vector<std::vector<int>> gate_ports;
  for (std::size_t i = 0; i < phi.clauses.size(); ++i) {
    GadgetCopy copy{"or", 0, 0};
    gate_ports.push_back(a.place(gate, &copy));
    rec.gate.push_back(static_cast<int>(rec.copies.size()));
    rec.copies.push_back(copy);
  }
  const Gadget h = inverter();
  for (int v = 0; v < phi.variable_count; ++v)
    for (std::size_t j = 0; j < occ[v].size(); ++j) {
      const auto& o = occ[v][j];
      int s0 = setter_ports[v][2 * j], s1 = setter_ports[v][2 * j + 1];
      int g0 = gate_ports[o.clause][2 * o.pos], g1 = gate_ports[o.clause][2 * o.pos + 1];
      if (!o.negated) {
        std::array<int, 2> e{a.join(s0, g0), a.join(s1, g1)};
        rec.setter_pairs[v].push_back(e);
        rec.gate_pairs[o.clause][o.pos] = e;
        continue;
      }
      GadgetCopy copy{"inverter", 0, 0};
      auto hp = a.place(h, &copy);
      rec.inverters.push_back(static_cast<int>(rec.copies.size()));
      rec.copies.push_back(copy);
      rec.setter_pairs[v].push_back({a.join(s0, hp[kA]), a.join(s1, hp[kB])});
      rec.gate_pairs[o.clause][o.pos] = {a.join(hp[kC], g0), a.join(hp[kD], g1)};
    }
  if (a.g.max_degree() > 3) throw VerificationFailure("reduction output has a vertex of degree above 3");
  return {a.g, rec};
}

Assignment coloring_to_assignment(const EdgeColoring& c, const SatReduction& r,
                                  const CNFInstance& phi) {
  if (!is_proper_coloring(r.graph, c)) throw InvalidInput("not a proper edge 3-coloring");
  Assignment a(phi.variable_count, 0);
  for (int v = 0; v < phi.variable_count; ++v) {
    const auto& pairs = r.record.setter_pairs[v];
    if (pairs.empty()) continue;
    bool agree = c[pairs[0][0]] == c[pairs[0][1]];
    for (const auto& p : pairs)
      if ((c[p[0]] == c[p[1]]) != agree)
        throw VerificationFailure("setter of variable " + std::to_string(v) + " has mixed pairs");
    a[v] = agree ? 1 : 0;
  }
  if (!phi.satisfied_by(a)) throw VerificationFailure("decoded assignment does not satisfy the formula");
  return a;
}

EdgeColoring assignment_to_coloring(const Assignment& a, const SatReduction& r,
                                    const CNFInstance& phi, const Caps& caps) {
  if (static_cast<int>(a.size()) != phi.variable_count)
    throw InvalidInput("assignment has the wrong length");
  for (int x : a)
    if (x != 0 && x != 1) throw InvalidInput("assignment values are 0 or 1");
  if (!phi.satisfied_by(a)) throw InvalidInput("assignment does not satisfy the formula");

  // Color the edges between gadgets, then extend inside each gadget.
  EdgeColoring partial(r.graph.edges.size(), -1);
  auto paint = [&](const std::array<int, 2>& e, bool agree) {
    partial[e[0]] = 0;
    partial[e[1]] = agree ? 0 : 1;
  };
  const auto occ = occurrences(phi);
  for (int v = 0; v < phi.variable_count; ++v)
    for (std::size_t j = 0; j < occ[v].size(); ++j) {
      paint(r.record.setter_pairs[v][j], a[v] == 1);
      if (occ[v][j].negated) paint(r.record.gate_pairs[occ[v][j].clause][occ[v][j].pos], a[v] == 0);
    }
  auto c = extend_edge_coloring(r.graph, partial, caps);
  if (!c) throw VerificationFailure("a gadget did not extend the boundary coloring");
  Assignment back = coloring_to_assignment(*c, r, phi);
  for (int v = 0; v < phi.variable_count; ++v)
    if (!occ[v].empty() && back[v] != a[v])
      throw VerificationFailure("coloring does not encode the assignment");
  return *c;
}

// ---------------------------------------------------------------------------
// Formats

namespace {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokens_of(const std::string& s, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back({s.substr(start, i - start), line, start + 1});
  }
  return out;
}

long long to_int(const Token& t) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.text.size() || t.text.empty())
    throw ParseError(t.line, t.column, "expected an integer, got '" + t.text + "'");
  return v;
}

}  // namespace

CNFInstance parse_dimacs(std::istream& in) {
  CNFInstance phi;
  std::string line;
  std::size_t lineno = 0;
  long long declared = -1;
  std::vector<Literal> clause;
  Token last{"", 0, 0};
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokens_of(line, lineno);
    if (toks.empty() || toks[0].text == "c" || toks[0].text[0] == 'c') continue;
    if (toks[0].text == "%") break;
    if (toks[0].text == "p") {
      if (declared >= 0) throw ParseError(lineno, 1, "second problem line");
      if (toks.size() != 4 || toks[1].text != "cnf")
        throw ParseError(lineno, 1, "expected 'p cnf <variables> <clauses>'");
      long long nv = to_int(toks[2]);
      declared = to_int(toks[3]);
      if (nv < 0 || declared < 0) throw ParseError(lineno, 1, "negative counts");
      phi.variable_count = static_cast<int>(nv);
      continue;
    }
    if (declared < 0) throw ParseError(lineno, 1, "clause before the problem line");
    for (const auto& t : toks) {
      long long x = to_int(t);
      last = t;
      if (x == 0) {
        if (clause.size() != 3)
          throw ParseError(t.line, t.column, "clause must have exactly 3 literals");
        phi.clauses.push_back({clause[0], clause[1], clause[2]});
        clause.clear();
        continue;
      }
      long long var = x < 0 ? -x : x;
      if (var > phi.variable_count)
        throw ParseError(t.line, t.column, "variable " + std::to_string(var) + " not declared");
      clause.push_back({static_cast<int>(var - 1), x < 0});
    }
  }
  if (declared < 0) throw ParseError(lineno + 1, 1, "missing problem line");
  if (!clause.empty()) throw ParseError(last.line, last.column, "unterminated clause");
  if (static_cast<long long>(phi.clauses.size()) != declared)
    throw ParseError(lineno + 1, 1,
                     "expected " + std::to_string(declared) + " clauses, found " +
                         std::to_string(phi.clauses.size()));
  phi.validate();
  return phi;
}

std::string to_dimacs(const CNFInstance& phi) {
  std::ostringstream out;
  out << "p cnf " << phi.variable_count << ' ' << phi.clauses.size() << '\n';
  for (const auto& c : phi.clauses) {
    for (const auto& l : c) out << (l.negated ? -(l.var + 1) : l.var + 1) << ' ';
    out << "0\n";
  }
  return out.str();
}

Graph parse_edge_list(std::istream& in) {
  Graph g;
  std::string line;
  std::size_t lineno = 0;
  long long edges = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokens_of(line, lineno);
    if (toks.empty() || toks[0].text[0] == '#') continue;
    if (toks.size() != 2) throw ParseError(lineno, 1, "expected two integers");
    long long u = to_int(toks[0]), v = to_int(toks[1]);
    if (edges < 0) {
      if (u < 0 || v < 0) throw ParseError(lineno, 1, "negative counts");
      g.vertex_count = static_cast<int>(u);
      edges = v;
      continue;
    }
    try {
      g.add_edge(static_cast<int>(u), static_cast<int>(v));
    } catch (const InvalidInput& e) {
      throw ParseError(lineno, 1, e.what());
    }
  }
  if (edges < 0) throw ParseError(lineno + 1, 1, "missing header");
  if (static_cast<long long>(g.edges.size()) != edges)
    throw ParseError(lineno + 1, 1,
                     "expected " + std::to_string(edges) + " edges, found " +
                         std::to_string(g.edges.size()));
  return g;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.vertex_count << ' ' << g.edges.size() << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
  return out.str();
}

}  // namespace polycsp
