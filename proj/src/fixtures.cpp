#include "polycsp/fixtures.hpp"

#include "polycsp/errors.hpp"

namespace polycsp::fixtures {

namespace {

Structure boolean_with(const std::string& name, int arity, auto pred) {
  Structure s(2, {});
  Table t;
  for (std::size_t code = 0; code < (1u << arity); ++code) {
    Tuple x = decode_tuple(code, 2, arity);
    if (pred(x)) t.push_back(x);
  }
  s.add_relation(name, arity, t);
  return s;
}

}  // namespace

Structure graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Table t;
  for (auto [u, v] : edges) {
    t.push_back({u, v});
    t.push_back({v, u});
  }
  Structure s(n, {});
  s.add_relation("E", 2, t);
  return s;
}

Structure digraph_from_arcs(int n, const std::vector<std::pair<int, int>>& arcs) {
  Table t;
  for (auto [u, v] : arcs) t.push_back({u, v});
  Structure s(n, {});
  s.add_relation("E", 2, t);
  return s;
}

Structure complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return graph_from_edges(n, e);
}

Structure cycle_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return graph_from_edges(n, e);
}

Structure path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph_from_edges(n, e);
}

Structure ksat(int k) {
  Structure s(2, {});
  for (int i = 0; i <= k; ++i) {
    Table t;
    for (std::size_t code = 0; code < (1u << k); ++code) {
      Tuple x = decode_tuple(code, 2, k);
      bool sat = false;
      for (int j = 0; j < k; ++j) sat = sat || (j < i ? x[j] == 0 : x[j] == 1);
      if (sat) t.push_back(x);
    }
    s.add_relation("D" + std::to_string(i), k, t);
  }
  return s;
}

Structure two_sat() { return ksat(2); }
Structure three_sat() { return ksat(3); }

Structure horn() {
  Structure s(2, {});
  s.add_relation("U0", 1, {{0}});
  s.add_relation("U1", 1, {{1}});
  s.add_relation("imp", 2, {{0, 0}, {0, 1}, {1, 1}});
  Table h;
  for (int code = 0; code < 8; ++code) {
    Tuple x = decode_tuple(code, 2, 3);
    if (!(x[0] && x[1]) || x[2]) h.push_back(x);
  }
  s.add_relation("horn3", 3, h);
  return s;
}

Structure nae() {
  return boolean_with("NAE", 3, [](const Tuple& x) { return !(x[0] == x[1] && x[1] == x[2]); });
}

Structure f2_3() {
  Structure s(2, {});
  for (int a = 1; a < 8; ++a) {
    Tuple coef = decode_tuple(a, 2, 3);
    for (int b = 0; b < 2; ++b) {
      Table t;
      for (int code = 0; code < 8; ++code) {
        Tuple x = decode_tuple(code, 2, 3);
        if ((coef[0] * x[0] + coef[1] * x[1] + coef[2] * x[2]) % 2 == b) t.push_back(x);
      }
      s.add_relation("L" + std::to_string(coef[0]) + std::to_string(coef[1]) +
                         std::to_string(coef[2]) + "_" + std::to_string(b),
                     3, t);
    }
  }
  return s;
}

Structure directed_3cycle() {
  return digraph_from_arcs(3, {{kPaper, kRock}, {kRock, kScissors}, {kScissors, kPaper}});
}

Structure special_triad() {
  // Three arms from the center 0, each an oriented path given arc by arc.
  const std::vector<std::pair<int, int>> arcs = {
      {0, 1},   {1, 2},   {2, 3},   {4, 3},   {4, 5},   {5, 6},   {7, 6},
      {8, 7},   {9, 8},   {10, 9},  {0, 11},  {11, 12}, {13, 12}, {13, 14},
      {14, 15}, {15, 16}, {17, 16}, {18, 17}, {19, 18}, {20, 19}, {0, 21},
      {21, 22}, {22, 23}, {24, 23}, {25, 24}, {25, 26}, {26, 27}, {27, 28},
      {29, 28}, {30, 29}, {31, 30}, {32, 31},
  };
  return digraph_from_arcs(33, arcs);
}

int rps_star(int x, int y) {
  static const int table[3][3] = {
      {kRock, kPaper, kRock},
      {kPaper, kPaper, kScissors},
      {kRock, kScissors, kScissors},
  };
  return table[x][y];
}

Structure rps() {
  Structure s(3, {});
  s.add_relation("pi", 2, {{kRock, kPaper}, {kPaper, kScissors}, {kScissors, kRock}});
  Table star;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int z = 0; z < 3; ++z)
        if ((x == kPaper || x == kScissors) && (x == kScissors || y == z))
          star.push_back({x, y, z});
  s.add_relation("star", 3, star);
  return s;
}

Structure with_singletons(const Structure& s) {
  Structure out = s;
  for (int c = 0; c < s.domain_size; ++c) {
    std::string name = "c" + std::to_string(c);
    while (out.signature.index_of(name)) name = "_" + name;
    out.add_relation(name, 1, {{c}});
  }
  return out;
}

Structure random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return graph_from_edges(n, e);
}

std::vector<Named> catalog() {
  return {
      {"k2", complete_graph(2), "complete graph K2"},
      {"k3", complete_graph(3), "complete graph K3"},
      {"2sat", two_sat(), "2SAT clause relations D0..D2"},
      {"3sat", three_sat(), "3SAT clause relations D0..D3"},
      {"horn", horn(), "Horn fragment: U0, U1, imp, horn3"},
      {"nae", nae(), "not-all-equal on {0,1}"},
      {"f2_3", f2_3(), "affine hyperplanes of F_2^3"},
      {"c3", directed_3cycle(), "directed 3-cycle r=0, p=1, s=2"},
      {"triad", special_triad(), "33-vertex special triad"},
      {"rps", rps(), "rock-paper-scissors template (pi, star)"},
  };
}

Structure by_name(const std::string& name) {
  for (auto& n : catalog())
    if (n.name == name) return n.structure;
  throw InvalidInput("unknown fixture: " + name);
}

}  // namespace polycsp::fixtures
