#pragma once

// Random-graph generators. Both draw one uniform per unordered pair in
// canonical (i<j) order from a counter-based stream, indexed by the pair's
// canonical rank, so the result depends only on (params, seed stream).

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/rng.hpp"

namespace netboot {

// Canonical rank of pair (i,j), i<j, among all C(n,2) pairs.
inline std::int64_t pair_index(std::int64_t i, std::int64_t j, std::int64_t n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

struct SbmParams {
  std::vector<int> block_sizes;  // one entry per block
  double rho = 0.1;              // expected overall edge density
  double t = 1.0;                // within/between connection ratio

  int total_nodes() const {
    return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
  }
};

struct SbmProbabilities {
  double within;   // rho * gamma1
  double between;  // rho * gamma2
};

// Calibrates (gamma1, gamma2) with gamma1 = t * gamma2 so the expected
// density over all pairs equals rho exactly for the given block sizes.
inline SbmProbabilities sbm_probabilities(const SbmParams& p) {
  if (p.rho < 0.0 || p.rho > 1.0) throw InvalidInput("rho must lie in [0,1]");
  if (p.t <= 0.0) throw InvalidInput("t must be positive");
  if (p.block_sizes.empty()) throw InvalidInput("need at least one block");
  const std::int64_t n = p.total_nodes();
  if (n < 1) throw InvalidInput("empty graph");
  std::int64_t within_pairs = 0;
  for (int b : p.block_sizes) {
    if (b < 0) throw InvalidInput("negative block size");
    within_pairs += pair_count(b);
  }
  const std::int64_t all_pairs = pair_count(n);
  if (all_pairs == 0) return {p.rho, p.rho};
  const double w = static_cast<double>(within_pairs);
  const double tot = static_cast<double>(all_pairs);
  const double gamma2 = tot / (p.t * w + (tot - w));
  const double gamma1 = p.t * gamma2;
  const SbmProbabilities probs{p.rho * gamma1, p.rho * gamma2};
  if (probs.within > 1.0 || probs.between > 1.0)
    throw InfeasibleDensity("rho*gamma exceeds 1 (rho=" + std::to_string(p.rho) +
                            ", t=" + std::to_string(p.t) + ")");
  return probs;
}

// Block label of each node; labels are assigned blockwise in order.
inline std::vector<int> sbm_labels(const SbmParams& p) {
  std::vector<int> lab;
  lab.reserve(p.total_nodes());
  for (std::size_t k = 0; k < p.block_sizes.size(); ++k)
    lab.insert(lab.end(), p.block_sizes[k], static_cast<int>(k));
  return lab;
}

inline Graph generate_sbm(const SbmParams& p, const Stream& s) {
  const auto probs = sbm_probabilities(p);
  const auto lab = sbm_labels(p);
  const int n = p.total_nodes();
  std::vector<Edge> edges;
  std::int64_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++idx) {
      const double pr = lab[i] == lab[j] ? probs.within : probs.between;
      if (s.uniform_at(static_cast<std::uint64_t>(idx)) < pr) edges.emplace_back(i, j);
    }
  return Graph::from_edges(n, std::move(edges));
}

inline Graph generate_er(int n, double rho, const Stream& s) {
  SbmParams p;
  p.block_sizes = {n};
  p.rho = rho;
  p.t = 1.0;
  return generate_sbm(p, s);
}

}  // namespace netboot
