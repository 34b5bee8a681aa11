#pragma once

// Simple undirected graphs on nodes 0..n-1. Storage is a canonical sorted
// edge array (i < j) plus CSR adjacency with sorted neighbor lists; both
// views stay consistent because the graph is immutable after construction.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netboot/errors.hpp"

namespace netboot {

using Edge = std::pair<int, int>;

inline std::int64_t pair_count(std::int64_t n) { return n * (n - 1) / 2; }
inline std::int64_t triple_count(std::int64_t n) { return n * (n - 1) * (n - 2) / 6; }

class Graph {
 public:
  Graph() = default;

  // Canonicalizes (i<j), sorts, deduplicates. Rejects out-of-range endpoints
  // and self-loops.
  static Graph from_edges(int n, std::vector<Edge> list) {
    if (n < 0) throw InvalidInput("node count must be nonnegative");
    for (auto& [a, b] : list) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw InvalidNode("edge endpoint out of range: (" + std::to_string(a) + "," +
                          std::to_string(b) + ") with n=" + std::to_string(n));
      if (a == b) throw SelfLoopRejected("self-loop at node " + std::to_string(a));
      if (a > b) std::swap(a, b);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    Graph g;
    g.n_ = n;
    g.edges_ = std::move(list);
    g.build_adjacency();
    return g;
  }

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + adj_start_[v], adj_.data() + adj_start_[v + 1]};
  }
  int degree(int v) const { return adj_start_[v + 1] - adj_start_[v]; }

  bool has_edge(int u, int v) const {
    if (u == v) return false;
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

 private:
  void build_adjacency() {
    adj_start_.assign(n_ + 1, 0);
    for (const auto& [a, b] : edges_) {
      ++adj_start_[a + 1];
      ++adj_start_[b + 1];
    }
    for (int v = 0; v < n_; ++v) adj_start_[v + 1] += adj_start_[v];
    adj_.resize(edges_.size() * 2);
    std::vector<int> cursor(adj_start_.begin(), adj_start_.end() - 1);
    for (const auto& [a, b] : edges_) {
      adj_[cursor[a]++] = b;
      adj_[cursor[b]++] = a;
    }
    // Neighbor lists come out sorted: for node v, edges (a,v) with a<v all
    // precede edges (v,b) in the sorted edge array, each group in ascending
    // order of the other endpoint.
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> adj_;
  std::vector<int> adj_start_{0};
};

// Induced subgraph on `kept` (strictly increasing original ids), relabeled to
// 0..kept.size()-1. kept[new_id] recovers the original id.
inline Graph induced_subgraph(const Graph& g, const std::vector<int>& kept) {
  std::vector<int> new_id(g.node_count(), -1);
  for (std::size_t i = 0; i < kept.size(); ++i) new_id[kept[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  for (const auto& [a, b] : g.edges())
    if (new_id[a] >= 0 && new_id[b] >= 0) edges.emplace_back(new_id[a], new_id[b]);
  return Graph::from_edges(static_cast<int>(kept.size()), std::move(edges));
}

// Graph Laplacian L = D - A. Degrees are integers; row sums are zero by
// construction before any float conversion.
struct Laplacian {
  int n = 0;
  std::vector<std::int64_t> degrees;
  std::vector<Edge> edges;

  // y = L x
  template <typename Vec>
  void apply(const Vec& x, Vec& y) const {
    for (int i = 0; i < n; ++i) y[i] = static_cast<double>(degrees[i]) * x[i];
    for (const auto& [a, b] : edges) {
      y[a] -= x[b];
      y[b] -= x[a];
    }
  }

  double quad_form(std::span<const double> x) const {
    double s = 0;
    for (const auto& [a, b] : edges) {
      const double d = x[a] - x[b];
      s += d * d;
    }
    return s;
  }
};

inline Laplacian laplacian(const Graph& g) {
  Laplacian l;
  l.n = g.node_count();
  l.degrees.resize(l.n);
  for (int v = 0; v < l.n; ++v) l.degrees[v] = g.degree(v);
  l.edges = g.edges();
  return l;
}

// Edge-list file format: optional "n <count>" header line, then one
// whitespace-separated "i j" pair per line. Blank lines are skipped.
inline Graph read_edge_list(const std::string& path, bool one_based = false) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  long lineno = 0;
  bool have_n = false;
  long long n_header = 0;
  std::vector<Edge> edges;
  int max_id = -1;
  const int shift = one_based ? 1 : 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    if (!have_n && edges.empty() && tok == "n") {
      if (!(ls >> n_header) || n_header < 0) throw ParseError("bad node count after 'n'", lineno);
      std::string extra;
      if (ls >> extra) throw ParseError("trailing token '" + extra + "'", lineno);
      have_n = true;
      continue;
    }
    long long a, b;
    std::istringstream es(line);
    if (!(es >> a >> b)) throw ParseError("expected 'i j'", lineno);
    std::string extra;
    if (es >> extra) throw ParseError("trailing token '" + extra + "'", lineno);
    a -= shift;
    b -= shift;
    if (a < 0 || b < 0 || a > 1'000'000'000 || b > 1'000'000'000)
      throw ParseError("node id out of range", lineno);
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    max_id = std::max({max_id, static_cast<int>(a), static_cast<int>(b)});
  }
  const int n = have_n ? static_cast<int>(n_header) : max_id + 1;
  return Graph::from_edges(n, std::move(edges));
}

inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << "n " << g.node_count() << "\n";
  for (const auto& [a, b] : g.edges()) out << a << " " << b << "\n";
  if (!out) throw InvalidInput("write failed: " + path);
}

}  // namespace netboot
