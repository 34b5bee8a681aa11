#pragma once

// Network statistics and their partial-observation estimators.
//
// The normalized triangle density of a graph is T = rho^-3 * (#triangles) /
// C(n,3). On a partially observed graph the estimator restricts both counts
// to fully observed triples: a triple counts iff all three of its pairs are
// observed (for row sampling that means at least two of its nodes are in the
// sampled row set), and rho_hat is the observed-edge / observed-pair ratio.

#include <bit>
#include <cstdint>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/sampling.hpp"

namespace netboot {

struct StatValue {
  double value = 0.0;
  bool defined = true;
};

inline double edge_density(const Graph& g) {
  if (g.node_count() < 2) throw Undefined("edge density needs n >= 2");
  return static_cast<double>(g.edge_count()) / static_cast<double>(pair_count(g.node_count()));
}

inline double partial_edge_density(const PartialGraph& pg) {
  const std::int64_t m = pg.observed_pair_count();
  if (m == 0) throw Undefined("no observed pairs");
  return static_cast<double>(pg.observed_edges.size()) / static_cast<double>(m);
}

// Each triangle {i<j<k} is counted once, at its (i,j) edge, by intersecting
// the two sorted neighbor lists above j.
inline std::int64_t triangle_count(const Graph& g) {
  std::int64_t count = 0;
  for (const auto& [i, j] : g.edges()) {
    const auto ni = g.neighbors(i);
    const auto nj = g.neighbors(j);
    auto a = std::upper_bound(ni.begin(), ni.end(), j);
    auto b = std::upper_bound(nj.begin(), nj.end(), j);
    while (a != ni.end() && b != nj.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else { ++count; ++a; ++b; }
    }
  }
  return count;
}

inline StatValue normalized_triangle_density(const Graph& g) {
  if (g.node_count() < 3) throw Undefined("triangle density needs n >= 3");
  const double rho = edge_density(g);
  if (rho == 0.0) return {0.0, false};
  const double frac = static_cast<double>(triangle_count(g)) /
                      static_cast<double>(triple_count(g.node_count()));
  return {frac / (rho * rho * rho), true};
}

enum class PartialTriangleMode { mask_restricted, completed_by_zero };

namespace stats_detail {

// Dense symmetric bit matrix used to count triples of a pair mask.
class BitMatrix {
 public:
  explicit BitMatrix(int n) : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0) {}

  void set(int i, int j) {
    bits_[static_cast<std::size_t>(i) * words_ + (j >> 6)] |= 1ULL << (j & 63);
    bits_[static_cast<std::size_t>(j) * words_ + (i >> 6)] |= 1ULL << (i & 63);
  }

  // |{k > above : row_i(k) and row_j(k)}|
  std::int64_t common_above(int i, int j, int above) const {
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    const int start = above + 1;
    if (start >= n_) return 0;
    int w = start >> 6;
    std::uint64_t first = a[w] & b[w] & (~0ULL << (start & 63));
    std::int64_t c = std::popcount(first);
    for (++w; w < words_; ++w) c += std::popcount(a[w] & b[w]);
    return c;
  }

 private:
  const std::uint64_t* row(int i) const { return bits_.data() + static_cast<std::size_t>(i) * words_; }
  int n_;
  int words_;
  std::vector<std::uint64_t> bits_;
};

// #triples with all three pairs in the mask = #triangles of the mask graph.
inline std::int64_t mask_triple_count(const PairMask& mask) {
  BitMatrix m(mask.parent_n());
  mask.for_each_pair([&](int i, int j) { m.set(i, j); });
  std::int64_t total = 0;
  mask.for_each_pair([&](int i, int j) { total += m.common_above(i, j, j); });
  return total;
}

struct RowTriangleCounts {
  std::int64_t fully_observed_triples = 0;
  std::int64_t fully_observed_triangles = 0;
};

// Row scheme: a triple is fully observed iff >= 2 of its nodes are in S.
// Triangles with >= 2 nodes in S are counted through their S-S edges: an
// S-S edge sees every triangle it belongs to via common neighbors, counting
// 2-in-S triangles once and 3-in-S triangles three times.
inline RowTriangleCounts row_triangle_counts(const PartialGraph& pg, const Graph& observed) {
  const int n = pg.parent_n;
  const auto s = static_cast<std::int64_t>(pg.row_set.size());
  RowTriangleCounts out;
  out.fully_observed_triples = triple_count(s) + pair_count(s) * (n - s);
  std::vector<char> in_set(n, 0);
  for (int v : pg.row_set) in_set[v] = 1;
  std::int64_t through_ss_edges = 0;  // triangles counted via S-S edges, with multiplicity
  std::int64_t all_in_s_times3 = 0;
  for (const auto& [i, j] : observed.edges()) {
    if (!in_set[i] || !in_set[j]) continue;
    const auto ni = observed.neighbors(i);
    const auto nj = observed.neighbors(j);
    auto a = ni.begin();
    auto b = nj.begin();
    while (a != ni.end() && b != nj.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else {
        ++through_ss_edges;
        all_in_s_times3 += in_set[*a];
        ++a; ++b;
      }
    }
  }
  out.fully_observed_triangles = through_ss_edges - 2 * (all_in_s_times3 / 3);
  return out;
}

}  // namespace stats_detail

// Triangle-density estimate from a partial graph. Degenerate subsamples (no
// fully observed triangle) yield value 0 with defined=false; a subsample with
// no fully observed triple at all is Undefined.
inline StatValue partial_triangle_density(
    const PartialGraph& pg, PartialTriangleMode mode = PartialTriangleMode::mask_restricted) {
  if (pg.parent_n < 3) throw Undefined("triangle density needs n >= 3");
  const Graph observed = Graph::from_edges(pg.parent_n, pg.observed_edges);

  if (mode == PartialTriangleMode::completed_by_zero) {
    // Treat unobserved pairs as non-edges and apply the full-graph formula.
    const std::int64_t tri = triangle_count(observed);
    if (tri == 0) return {0.0, false};
    const double rho = edge_density(observed);
    const double frac = static_cast<double>(tri) / static_cast<double>(triple_count(pg.parent_n));
    return {frac / (rho * rho * rho), true};
  }

  std::int64_t triples = 0;
  std::int64_t triangles = 0;
  if (pg.scheme == Scheme::pair) {
    triples = stats_detail::mask_triple_count(pg.mask);
    triangles = triangle_count(observed);  // a triangle of the observed graph has all pairs masked
  } else {
    const auto counts = stats_detail::row_triangle_counts(pg, observed);
    triples = counts.fully_observed_triples;
    triangles = counts.fully_observed_triangles;
  }
  if (triples == 0) throw Undefined("no fully observed triple");
  if (triangles == 0) return {0.0, false};

  const double rho_hat = partial_edge_density(pg);
  const double frac = static_cast<double>(triangles) / static_cast<double>(triples);
  return {frac / (rho_hat * rho_hat * rho_hat), true};
}

}  // namespace netboot
