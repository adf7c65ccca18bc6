#include "mivnet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mivnet/rng.hpp"

namespace mivnet {

Graph::Graph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("graph needs n >= 1");
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  finalize();
}

Graph::Graph(int n, const std::vector<std::pair<int, int>>& directed_edges) : n_(n) {
  if (n < 1) throw std::invalid_argument("graph needs n >= 1");
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  for (auto [i, j] : directed_edges) {
    check_index(i);
    check_index(j);
    if (i == j) throw std::invalid_argument("self loops are not allowed");
    adj_[static_cast<std::size_t>(i) * n_ + j] = 1;
  }
  finalize();
}

void Graph::check_index(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("unit index out of range");
}

void Graph::finalize() {
  in_nbrs_.assign(static_cast<std::size_t>(n_), {});
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (adj_[static_cast<std::size_t>(j) * n_ + i]) in_nbrs_[static_cast<std::size_t>(i)].push_back(j);
}

int Graph::max_degree() const {
  int d = 0;
  for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
  return d;
}

int Graph::edge_count() const {
  int c = 0;
  for (auto v : adj_) c += v;
  return c;
}

bool Graph::is_symmetric() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (adj_[static_cast<std::size_t>(i) * n_ + j] != adj_[static_cast<std::size_t>(j) * n_ + i]) return false;
  return true;
}

int Graph::treated_degree(const Allocation& z, int i) const {
  if (z.size() != n_) throw std::invalid_argument("allocation length does not match graph");
  check_index(i);
  int d = 0;
  for (int j : in_nbrs_[static_cast<std::size_t>(i)]) d += z[j];
  return d;
}

std::vector<int> Graph::treated_degrees(const Allocation& z) const {
  if (z.size() != n_) throw std::invalid_argument("allocation length does not match graph");
  std::vector<int> d(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    int s = 0;
    for (int j : in_nbrs_[static_cast<std::size_t>(i)]) s += z[j];
    d[static_cast<std::size_t>(i)] = s;
  }
  return d;
}

bool valid_coloring(const Graph& g, const Coloring& c) {
  const int n = g.size();
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& cls : c.classes) {
    for (std::size_t a = 0; a < cls.size(); ++a) {
      int i = cls[a];
      if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)]) return false;
      seen[static_cast<std::size_t>(i)] = 1;
      for (std::size_t b = 0; b < a; ++b) {
        int j = cls[b];
        if (g.edge(i, j) || g.edge(j, i)) return false;
      }
    }
  }
  for (int v : seen)
    if (!v) return false;
  return true;
}

Graph shared_neighbor_graph(const Graph& g) {
  const int n = g.size();
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    const auto& ni = g.neighborhood(i);
    for (int j = i + 1; j < n; ++j) {
      const auto& nj = g.neighborhood(j);
      // sorted-list intersection test
      std::size_t a = 0, b = 0;
      bool share = false;
      while (a < ni.size() && b < nj.size()) {
        if (ni[a] == nj[b]) {
          share = true;
          break;
        }
        if (ni[a] < nj[b])
          ++a;
        else
          ++b;
      }
      if (share) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
    }
  }
  return Graph(n, edges);
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  const int n = g.size();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> comps;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    int id = static_cast<int>(comps.size());
    comps.push_back({});
    stack.push_back(s);
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comps[static_cast<std::size_t>(id)].push_back(v);
      for (int u = 0; u < n; ++u) {
        if (label[static_cast<std::size_t>(u)] >= 0) continue;
        if (g.edge(v, u) || g.edge(u, v)) {
          label[static_cast<std::size_t>(u)] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(comps[static_cast<std::size_t>(id)].begin(), comps[static_cast<std::size_t>(id)].end());
  }
  return comps;
}

std::vector<int> component_labels(const Graph& g) {
  auto comps = connected_components(g);
  std::vector<int> label(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) label[static_cast<std::size_t>(v)] = static_cast<int>(c);
  return label;
}

Coloring greedy_coloring(const Graph& g) {
  const int n = g.size();
  std::vector<int> color(static_cast<std::size_t>(n), -1);
  int n_colors = 0;
  std::vector<char> used;
  for (int v = 0; v < n; ++v) {
    used.assign(static_cast<std::size_t>(n_colors) + 1, 0);
    for (int u = 0; u < n; ++u) {
      if (u == v || color[static_cast<std::size_t>(u)] < 0) continue;
      if (g.edge(u, v) || g.edge(v, u)) used[static_cast<std::size_t>(color[static_cast<std::size_t>(u)])] = 1;
    }
    int c = 0;
    while (used[static_cast<std::size_t>(c)]) ++c;
    color[static_cast<std::size_t>(v)] = c;
    n_colors = std::max(n_colors, c + 1);
  }
  Coloring out;
  out.classes.assign(static_cast<std::size_t>(n_colors), {});
  for (int v = 0; v < n; ++v) out.classes[static_cast<std::size_t>(color[static_cast<std::size_t>(v)])].push_back(v);
  return out;
}

GraphFamily parse_graph_family(const std::string& name) {
  if (name == "empty") return GraphFamily::empty;
  if (name == "complete") return GraphFamily::complete;
  if (name == "ring") return GraphFamily::ring;
  if (name == "triangle_tail_v3") return GraphFamily::triangle_tail_v3;
  if (name == "triangle_tail_v1") return GraphFamily::triangle_tail_v1;
  if (name == "erdos_renyi") return GraphFamily::erdos_renyi;
  if (name == "pref_attach") return GraphFamily::pref_attach;
  throw std::invalid_argument("unknown graph family: " + name);
}

std::string graph_family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::empty: return "empty";
    case GraphFamily::complete: return "complete";
    case GraphFamily::ring: return "ring";
    case GraphFamily::triangle_tail_v3: return "triangle_tail_v3";
    case GraphFamily::triangle_tail_v1: return "triangle_tail_v1";
    case GraphFamily::erdos_renyi: return "erdos_renyi";
    case GraphFamily::pref_attach: return "pref_attach";
  }
  return "?";
}

namespace {

Graph make_ring(int n) {
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges = {{0, 1}, {1, 0}};
  } else if (n > 2) {
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      edges.emplace_back(i, j);
      edges.emplace_back(j, i);
    }
  }
  return Graph(n, edges);
}

Graph make_triangle_tail(int n, int attach) {
  if (n != 4) throw std::invalid_argument("triangle-plus-tail graphs are defined for n = 4");
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}};
  edges.emplace_back(attach, 3);
  edges.emplace_back(3, attach);
  return Graph(4, edges);
}

Graph make_erdos_renyi(int n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("edge probability must be in [0,1]");
  Rng rng(derive_seed(seed, 0x4552ULL));  // 'ER'
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
  return Graph(n, edges);
}

Graph make_pref_attach(int n, double rho, std::uint64_t seed) {
  if (rho < 0.0) throw std::invalid_argument("degree power rho must be >= 0");
  Rng rng(derive_seed(seed, 0x5041ULL));  // 'PA'
  std::vector<std::pair<int, int>> raw;   // undirected pairs in growth labels
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  if (n >= 2) {
    raw.emplace_back(0, 1);
    deg[0] = deg[1] = 1.0;
  }
  std::vector<double> w;
  for (int k = 2; k < n; ++k) {
    w.assign(static_cast<std::size_t>(k), 0.0);
    double min_pos = 0.0, total = 0.0;
    for (int j = 0; j < k; ++j) {
      double wj = std::pow(deg[static_cast<std::size_t>(j)], rho);
      w[static_cast<std::size_t>(j)] = wj;
      if (wj > 0.0 && (min_pos == 0.0 || wj < min_pos)) min_pos = wj;
    }
    // zero-degree nodes get the minimum positive weight so they stay reachable
    for (int j = 0; j < k; ++j) {
      if (w[static_cast<std::size_t>(j)] <= 0.0) w[static_cast<std::size_t>(j)] = (min_pos > 0.0 ? min_pos : 1.0);
      total += w[static_cast<std::size_t>(j)];
    }
    double u = rng.uniform01() * total;
    int target = k - 1;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      acc += w[static_cast<std::size_t>(j)];
      if (u < acc) {
        target = j;
        break;
      }
    }
    raw.emplace_back(target, k);
    deg[static_cast<std::size_t>(target)] += 1.0;
    deg[static_cast<std::size_t>(k)] += 1.0;
  }
  // relabel uniformly at random; preserves degrees, not insertion order
  std::vector<int> relab(static_cast<std::size_t>(n));
  std::iota(relab.begin(), relab.end(), 0);
  rng.shuffle(relab);
  std::vector<std::pair<int, int>> edges;
  for (auto [a, b] : raw) {
    int i = relab[static_cast<std::size_t>(a)], j = relab[static_cast<std::size_t>(b)];
    edges.emplace_back(i, j);
    edges.emplace_back(j, i);
  }
  return Graph(n, edges);
}

}  // namespace

Graph generate_graph(GraphFamily family, int n, std::uint64_t seed, double param) {
  if (n < 1) throw std::invalid_argument("graph needs n >= 1");
  switch (family) {
    case GraphFamily::empty: return Graph(n);
    case GraphFamily::complete: {
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) edges.emplace_back(i, j);
      return Graph(n, edges);
    }
    case GraphFamily::ring: return make_ring(n);
    case GraphFamily::triangle_tail_v3: return make_triangle_tail(n, 2);
    case GraphFamily::triangle_tail_v1: return make_triangle_tail(n, 0);
    case GraphFamily::erdos_renyi: return make_erdos_renyi(n, param, seed);
    case GraphFamily::pref_attach: return make_pref_attach(n, param, seed);
  }
  throw std::invalid_argument("unknown graph family");
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "n " << g.size() << "\n";
  for (int j = 0; j < g.size(); ++j)
    for (int i : g.neighborhood(j)) out << i << " " << j << "\n";
  // neighborhood(j) lists i with edge i->j, so the line order is by target
  if (!out) throw std::runtime_error("write failed: " + path);
}

Graph load_edge_list(const std::string& path, bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    if (n < 0) {
      std::string tag;
      is >> tag >> n;
      if (!is || tag != "n" || n < 1)
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected header 'n <count>'");
      continue;
    }
    int i, j;
    is >> i >> j;
    if (!is) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected edge 'i j'");
    edges.emplace_back(i, j);
    if (symmetrize) edges.emplace_back(j, i);
  }
  if (n < 1) throw std::runtime_error(path + ": missing 'n <count>' header");
  return Graph(n, edges);
}

}  // namespace mivnet
