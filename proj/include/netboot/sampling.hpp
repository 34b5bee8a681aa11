#pragma once

// Subsampling schemes. All three are parameterized by the fraction q of node
// pairs whose status the subsample observes:
//   node: keep each node w.p. p = sqrt(q), take the induced subgraph;
//   row:  sample a node set S w.p. p = 1 - sqrt(1-q); a pair is observed iff
//         it touches S;
//   pair: observe each pair independently w.p. p = q (explicit bitset mask).

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/generators.hpp"
#include "netboot/graph.hpp"
#include "netboot/rng.hpp"

namespace netboot {

enum class Scheme { node, row, pair };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::node: return "node";
    case Scheme::row: return "row";
    case Scheme::pair: return "pair";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "node") return Scheme::node;
  if (s == "row") return Scheme::row;
  if (s == "pair") return Scheme::pair;
  throw ConfigError("unknown scheme '" + s + "' (want node|row|pair)");
}

struct SamplingPlan {
  Scheme scheme = Scheme::node;
  double q = 0.5;
};

// Per-unit inclusion probability that makes the expected fraction of
// observed pairs equal q under the given scheme.
inline double q_to_p(Scheme scheme, double q) {
  if (!(q > 0.0) || q > 1.0) throw InvalidFraction("q must lie in (0,1], got " + std::to_string(q));
  switch (scheme) {
    case Scheme::node: return std::sqrt(q);
    case Scheme::row: return 1.0 - std::sqrt(1.0 - q);
    case Scheme::pair: return q;
  }
  throw ConfigError("bad scheme");
}

// ---- node sampling ----------------------------------------------------

struct NodeSample {
  Graph graph;            // induced subgraph, densely relabeled
  std::vector<int> kept;  // kept[new_id] = original id, strictly increasing
};

inline NodeSample node_sample_with_kept(const Graph& g, std::vector<int> kept) {
  NodeSample out;
  out.graph = induced_subgraph(g, kept);
  out.kept = std::move(kept);
  return out;
}

inline NodeSample node_sample(const Graph& g, const SamplingPlan& plan, const Stream& s) {
  if (plan.scheme != Scheme::node) throw ConfigError("node_sample needs a node-scheme plan");
  const double p = q_to_p(plan.scheme, plan.q);
  std::vector<int> kept;
  for (int v = 0; v < g.node_count(); ++v)
    if (s.uniform_at(static_cast<std::uint64_t>(v)) < p) kept.push_back(v);
  if (kept.empty()) throw EmptySample("node sample kept no nodes");
  return node_sample_with_kept(g, std::move(kept));
}

// ---- pair masks --------------------------------------------------------

// Bitset over the C(n,2) canonical pair ranks.
class PairMask {
 public:
  PairMask() = default;
  explicit PairMask(int n)
      : n_(n), bits_((static_cast<std::size_t>(pair_count(n)) + 63) / 64, 0) {}

  int parent_n() const { return n_; }
  std::int64_t total_pairs() const { return pair_count(n_); }

  void set(int i, int j) {
    const auto idx = static_cast<std::size_t>(pair_index(std::min(i, j), std::max(i, j), n_));
    auto& w = bits_[idx >> 6];
    const std::uint64_t bit = 1ULL << (idx & 63);
    count_ += !(w & bit);
    w |= bit;
  }
  bool test(int i, int j) const {
    if (i == j) return false;
    const auto idx = static_cast<std::size_t>(pair_index(std::min(i, j), std::max(i, j), n_));
    return (bits_[idx >> 6] >> (idx & 63)) & 1;
  }
  std::int64_t count() const { return count_; }

  // Visit observed pairs as (i,j), i<j, in canonical order. Canonical ranks
  // are lexicographic in (i,j), so one forward row cursor suffices.
  template <typename F>
  void for_each_pair(F&& f) const {
    const std::int64_t total = pair_count(n_);
    int i = 0;
    std::int64_t row_end = n_ - 1;  // rank one past row i
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int bit = std::countr_zero(word);
        word &= word - 1;
        const std::int64_t idx = static_cast<std::int64_t>(w) * 64 + bit;
        if (idx >= total) return;
        while (idx >= row_end) {
          ++i;
          row_end += n_ - 1 - i;
        }
        const std::int64_t row_start = row_end - (n_ - 1 - i);
        f(i, static_cast<int>(i + 1 + (idx - row_start)));
      }
    }
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> bits_;
  std::int64_t count_ = 0;
};

// ---- partial graphs (row / pair schemes) -------------------------------

struct PartialGraph {
  Scheme scheme = Scheme::row;
  int parent_n = 0;
  std::vector<int> row_set;         // row scheme: sampled node set S, sorted
  PairMask mask;                    // pair scheme
  std::vector<Edge> observed_edges; // canonical order

  bool pair_observed(int i, int j) const {
    if (i == j) return false;
    if (scheme == Scheme::row) return in_row_set(i) || in_row_set(j);
    return mask.test(i, j);
  }

  std::int64_t observed_pair_count() const {
    if (scheme == Scheme::row)
      return pair_count(parent_n) - pair_count(parent_n - static_cast<int>(row_set.size()));
    return mask.count();
  }

  bool in_row_set(int v) const {
    return std::binary_search(row_set.begin(), row_set.end(), v);
  }
};

inline PartialGraph row_sample_with_set(const Graph& g, std::vector<int> S) {
  PartialGraph pg;
  pg.scheme = Scheme::row;
  pg.parent_n = g.node_count();
  std::vector<char> in_set(g.node_count(), 0);
  for (int v : S) in_set[v] = 1;
  for (const auto& [a, b] : g.edges())
    if (in_set[a] || in_set[b]) pg.observed_edges.emplace_back(a, b);
  pg.row_set = std::move(S);
  return pg;
}

inline PartialGraph row_sample(const Graph& g, const SamplingPlan& plan, const Stream& s) {
  if (plan.scheme != Scheme::row) throw ConfigError("row_sample needs a row-scheme plan");
  const double p = q_to_p(plan.scheme, plan.q);
  std::vector<int> S;
  for (int v = 0; v < g.node_count(); ++v)
    if (s.uniform_at(static_cast<std::uint64_t>(v)) < p) S.push_back(v);
  if (S.empty()) throw EmptySample("row sample kept no rows");
  return row_sample_with_set(g, std::move(S));
}

inline PartialGraph pair_sample_with_mask(const Graph& g, PairMask mask) {
  PartialGraph pg;
  pg.scheme = Scheme::pair;
  pg.parent_n = g.node_count();
  for (const auto& [a, b] : g.edges())
    if (mask.test(a, b)) pg.observed_edges.emplace_back(a, b);
  pg.mask = std::move(mask);
  return pg;
}

inline PartialGraph pair_sample(const Graph& g, const SamplingPlan& plan, const Stream& s) {
  if (plan.scheme != Scheme::pair) throw ConfigError("pair_sample needs a pair-scheme plan");
  const double p = q_to_p(plan.scheme, plan.q);
  const int n = g.node_count();
  PairMask mask(n);
  std::int64_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++idx)
      if (s.uniform_at(static_cast<std::uint64_t>(idx)) < p) mask.set(i, j);
  if (mask.count() == 0) throw EmptySample("pair sample observed no pairs");
  return pair_sample_with_mask(g, std::move(mask));
}

}  // namespace netboot
