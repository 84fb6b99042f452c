#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "polycsp/structure.hpp"

namespace polycsp::fixtures {

/// Complete graph with a symmetric edge relation "E".
Structure complete_graph(int n);
/// Undirected cycle C_n, relation "E" symmetric.
Structure cycle_graph(int n);
/// Undirected path on n vertices.
Structure path_graph(int n);
/// Graph from an undirected edge list (stored symmetrically).
Structure graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges);
/// Digraph from arcs, relation "E".
Structure digraph_from_arcs(int n, const std::vector<std::pair<int, int>>& arcs);

/// kSAT on {0,1}: relations D0..Dk where Di negates the first i literals.
Structure ksat(int k);
Structure two_sat();
Structure three_sat();
/// Finite Horn fragment: U0={0}, U1={1}, imp(x,y)=x->y, horn3=(x&y)->z.
Structure horn();
Structure nae();
/// F_2(3): one relation per proper nonempty affine hyperplane a.x = b.
Structure f2_3();
/// Directed 3-cycle on r=0, p=1, s=2 with arcs (p,r), (r,s), (s,p).
Structure directed_3cycle();
/// The 33-vertex triad as transcribed; its core is a 5-vertex path (see notes).
Structure special_triad();
/// Rock-paper-scissors template: "pi" (graph of r->p->s->r) and "star".
Structure rps();

constexpr int kRock = 0, kPaper = 1, kScissors = 2;
/// Binary rock-paper-scissors operation on {r,p,s}.
int rps_star(int x, int y);

/// Template with a single relation copied from `s` plus singleton unary
/// relations "c0".."c{n-1}".
Structure with_singletons(const Structure& s);

/// Erdos-Renyi graph (symmetric "E"), no loops.
Structure random_graph(int n, double p, std::mt19937_64& rng);

struct Named {
  std::string name;
  Structure structure;
  std::string note;
};
/// Every built-in template with a stable name.
std::vector<Named> catalog();
Structure by_name(const std::string& name);

}  // namespace polycsp::fixtures
