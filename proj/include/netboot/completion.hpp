#pragma once

// One-shot low-rank completion of a partially observed adjacency matrix:
// rescale observed entries by the observed fraction, zero-fill the rest, and
// truncate the eigendecomposition at rank k (largest |eigenvalue| first).

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/sampling.hpp"

namespace netboot {

namespace completion_detail {

inline Eigen::MatrixXd rescaled_observation(const PartialGraph& pg) {
  const int n = pg.parent_n;
  const double q_hat = static_cast<double>(pg.observed_pair_count()) /
                       static_cast<double>(pair_count(n));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const double w = 1.0 / q_hat;
  for (const auto& [a, b] : pg.observed_edges) {
    m(a, b) = w;
    m(b, a) = w;
  }
  return m;
}

// Indices of eigenvalues sorted by decreasing magnitude.
inline std::vector<int> by_magnitude(const Eigen::VectorXd& evals) {
  std::vector<int> idx(evals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(evals[a]);
    const double mb = std::abs(evals[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  return idx;
}

}  // namespace completion_detail

// Rank-k score matrix for a partially observed graph.
inline Eigen::MatrixXd complete_low_rank(const PartialGraph& pg, int k) {
  const int n = pg.parent_n;
  if (k < 1 || k > n) throw InvalidRank("rank must lie in [1, n]");
  const Eigen::MatrixXd m = completion_detail::rescaled_observation(pg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const auto order = completion_detail::by_magnitude(eig.eigenvalues());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < k; ++r) {
    const int i = order[r];
    out.noalias() +=
        eig.eigenvalues()[i] * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).transpose();
  }
  return out;
}

}  // namespace netboot
