// graph.hpp — directed graphs on [0, n): neighborhood and treated-degree
// queries, shared-neighbor graph, components, greedy coloring, and seeded
// generators for the graph families used in the experiments.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mivnet/allocation.hpp"

namespace mivnet {

// Dense binary adjacency; entry (i,j) = 1 iff there is an edge from i to j.
// Self loops are rejected. Immutable after construction; share freely.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  Graph(int n, const std::vector<std::pair<int, int>>& directed_edges);

  int size() const { return n_; }
  bool edge(int from, int to) const {
    check_index(from);
    check_index(to);
    return adj_[static_cast<std::size_t>(from) * n_ + to] != 0;
  }

  // In-neighborhood N_i = {j : edge(j, i)}, ascending.
  const std::vector<int>& neighborhood(int i) const {
    check_index(i);
    return in_nbrs_[static_cast<std::size_t>(i)];
  }
  int degree(int i) const { return static_cast<int>(neighborhood(i).size()); }
  int max_degree() const;
  int edge_count() const;
  bool is_symmetric() const;

  // d_i^z = |{j in N_i : z_j = 1}|, coordinate i of g^T z.
  int treated_degree(const Allocation& z, int i) const;
  std::vector<int> treated_degrees(const Allocation& z) const;

  bool operator==(const Graph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

 private:
  void check_index(int i) const;
  void finalize();

  int n_ = 0;
  std::vector<std::uint8_t> adj_;           // row-major n*n
  std::vector<std::vector<int>> in_nbrs_;   // per unit, ascending
};

// Partition of [n] into independent sets; classes[c] lists the units of color c.
struct Coloring {
  std::vector<std::vector<int>> classes;
};

bool valid_coloring(const Graph& g, const Coloring& c);

// h with h_ij = 1{(g^T g)_ij > 0}, zero diagonal: units i, j are adjacent in
// h iff they have at least one common in-neighbor.
Graph shared_neighbor_graph(const Graph& g);

// Weakly connected components (edge direction ignored), each sorted, ordered
// by smallest member.
std::vector<std::vector<int>> connected_components(const Graph& g);
// unit -> component id, ids consistent with connected_components order.
std::vector<int> component_labels(const Graph& g);

// First-fit coloring in natural vertex order, adjacency taken in either
// direction. Deterministic.
Coloring greedy_coloring(const Graph& g);

enum class GraphFamily {
  empty,
  complete,
  ring,
  triangle_tail_v3,  // triangle {0,1,2} plus edge 2-3
  triangle_tail_v1,  // triangle {0,1,2} plus edge 0-3
  erdos_renyi,       // param = edge probability
  pref_attach,       // param = degree power rho
};

GraphFamily parse_graph_family(const std::string& name);
std::string graph_family_name(GraphFamily f);

// Random families are undirected (symmetric adjacency) and reproducible from
// (family, n, seed, param). Preferential attachment grows from a single edge
// 0-1, attaches each new node by one edge with probability proportional to
// current degree^rho, then applies a uniform random vertex relabeling.
Graph generate_graph(GraphFamily family, int n, std::uint64_t seed, double param = 0.0);

// Edge-list text format: first line "n <count>", then one "i j" pair per
// line, 0-indexed and directed. With symmetrize=true each listed edge is
// mirrored on load.
void save_edge_list(const Graph& g, const std::string& path);
Graph load_edge_list(const std::string& path, bool symmetrize = false);

}  // namespace mivnet
