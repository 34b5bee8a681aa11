#pragma once

// Community-count estimators.
//
// bethe_hessian_k: K_hat = number of negative eigenvalues of the Bethe
// Hessian H(r) = (r^2 - 1) I - r A + D with r = sqrt(average degree).
// Dense eigensolve up to a size threshold, subspace iteration on the
// smallest eigenvalues above it.
//
// ecv_auc_k: rank selection by edge cross-validation. For k = 1..k_max,
// complete the observed entries at rank k and score the held-out pairs;
// K_hat maximizes the AUC against the parent's edges (smallest k on ties).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "netboot/completion.hpp"
#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/rng.hpp"
#include "netboot/sampling.hpp"

namespace netboot {

struct KEstimate {
  int k_hat = 0;
  std::string method;
  std::vector<double> diagnostics;  // BH: computed eigenvalues; ECV: AUC per rank
};

// Mann-Whitney AUC with ties scored half, computed from average ranks.
inline double auc(const std::vector<double>& scores, const std::vector<char>& labels) {
  if (scores.size() != labels.size()) throw InvalidInput("auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  std::int64_t n_pos = 0;
  for (char l : labels) n_pos += l != 0;
  const std::int64_t n_neg = static_cast<std::int64_t>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedAUC("auc needs both classes");
  double rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]]) rank_sum_pos += avg_rank;
    i = j;
  }
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace community_detail {

struct BetheHessian {
  double r = 0;
  const Graph* g = nullptr;

  // y = H x
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int n = g->node_count();
    const double c = r * r - 1.0;
    for (int i = 0; i < n; ++i) y[i] = (c + g->degree(i)) * x[i];
    for (const auto& [a, b] : g->edges()) {
      y[a] -= r * x[b];
      y[b] -= r * x[a];
    }
  }

  double inf_norm() const {
    const int n = g->node_count();
    double best = 0;
    for (int i = 0; i < n; ++i) {
      const double row = std::abs(r * r - 1.0 + g->degree(i)) + std::abs(r) * g->degree(i);
      best = std::max(best, row);
    }
    return best;
  }

  Eigen::MatrixXd dense() const {
    const int n = g->node_count();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = r * r - 1.0 + g->degree(i);
    for (const auto& [a, b] : g->edges()) {
      h(a, b) = -r;
      h(b, a) = -r;
    }
    return h;
  }
};

// Smallest `want` eigenvalues by subspace iteration on sigma*I - H, sigma a
// Gershgorin upper bound. Residual target 1e-6 * ||H||_inf per vector.
inline std::vector<double> smallest_eigenvalues_iterative(const BetheHessian& h, int want) {
  const int n = h.g->node_count();
  want = std::min(want, n);
  const int m = std::min(n, want + 8);
  double sigma = 0;
  for (int i = 0; i < n; ++i)
    sigma = std::max(sigma, h.r * h.r - 1.0 + h.g->degree(i) + std::abs(h.r) * h.g->degree(i));
  const double norm = h.inf_norm();
  const double tol = 1e-6 * std::max(norm, 1e-300);

  // Deterministic starting block, hash-spread.
  Eigen::MatrixXd q(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const auto u = rng_detail::mix64(static_cast<std::uint64_t>(i) * m + j + 1);
      q(i, j) = static_cast<double>(u >> 11) * 0x1.0p-53 - 0.5;
    }
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, m);

  std::vector<double> xv(n), yv(n);
  Eigen::MatrixXd z(n, m);
  Eigen::VectorXd ritz(m);
  for (int iter = 0; iter < 1000; ++iter) {
    // z = (sigma I - H) q
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) xv[i] = q(i, j);
      h.apply(xv, yv);
      for (int i = 0; i < n; ++i) z(i, j) = sigma * xv[i] - yv[i];
    }
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(n, m);

    // Rayleigh-Ritz on H restricted to the block.
    Eigen::MatrixXd hq(n, m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) xv[i] = q(i, j);
      h.apply(xv, yv);
      for (int i = 0; i < n; ++i) hq(i, j) = yv[i];
    }
    Eigen::MatrixXd small = q.transpose() * hq;
    small = 0.5 * (small + small.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(small);
    ritz = eig.eigenvalues();
    const Eigen::MatrixXd v = q * eig.eigenvectors();
    const Eigen::MatrixXd hv = hq * eig.eigenvectors();
    double worst = 0;
    for (int j = 0; j < want; ++j)
      worst = std::max(worst, (hv.col(j) - ritz[j] * v.col(j)).norm());
    if (worst <= tol) break;
  }
  std::vector<double> out(want);
  for (int j = 0; j < want; ++j) out[j] = ritz[j];
  return out;
}

}  // namespace community_detail

struct BetheHessianOptions {
  int k_max = 6;              // cap used only to size the iterative eigensolve
  int dense_threshold = 2000; // largest n solved densely
};

inline KEstimate bethe_hessian_k(const Graph& g, const BetheHessianOptions& opt = {}) {
  const int n = g.node_count();
  if (n < 1 || g.edge_count() == 0) throw NoEdges("Bethe Hessian needs at least one edge");
  community_detail::BetheHessian h;
  h.r = std::sqrt(2.0 * static_cast<double>(g.edge_count()) / n);
  h.g = &g;
  const double eps = 1e-8 * h.inf_norm();

  KEstimate est;
  est.method = "bethe_hessian";
  if (n <= opt.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.dense(), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
    int k = 0;
    const int keep = std::min<int>(n, 2 * opt.k_max);
    for (int i = 0; i < n; ++i) {
      if (eig.eigenvalues()[i] < -eps) ++k;
      if (i < keep) est.diagnostics.push_back(eig.eigenvalues()[i]);
    }
    est.k_hat = k;
  } else {
    const auto evs = community_detail::smallest_eigenvalues_iterative(h, 2 * opt.k_max);
    int k = 0;
    for (double ev : evs) {
      if (ev < -eps) ++k;
      est.diagnostics.push_back(ev);
    }
    est.k_hat = k;
  }
  return est;
}

struct EcvOptions {
  int k_max = 6;
};

// Rank selection on a pair-sampled partial graph; `parent` supplies the
// held-out labels. The per-rank scores are built incrementally from one
// eigendecomposition (ranks are nested), which matches scoring each rank
// with complete_low_rank.
inline KEstimate ecv_auc_k(const PartialGraph& pg, const Graph& parent, const EcvOptions& opt = {}) {
  if (pg.scheme != Scheme::pair) throw ConfigError("ecv needs a pair-sampled partial graph");
  if (pg.parent_n != parent.node_count()) throw InvalidInput("parent size mismatch");
  const int n = pg.parent_n;
  if (opt.k_max < 1 || opt.k_max > n) throw InvalidRank("k_max must lie in [1, n]");
  if (pg.mask.count() >= pair_count(n)) throw InvalidInput("mask holds out no pairs");

  // Held-out pairs and labels.
  std::vector<std::pair<int, int>> held;
  std::vector<char> labels;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!pg.mask.test(i, j)) {
        held.emplace_back(i, j);
        labels.push_back(parent.has_edge(i, j) ? 1 : 0);
      }

  const Eigen::MatrixXd m = completion_detail::rescaled_observation(pg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const auto order = completion_detail::by_magnitude(eig.eigenvalues());

  KEstimate est;
  est.method = "ecv_auc";
  std::vector<double> scores(held.size(), 0.0);
  int best_k = 1;
  double best_auc = -1;
  for (int k = 1; k <= opt.k_max; ++k) {
    const int idx = order[k - 1];
    const double lambda = eig.eigenvalues()[idx];
    const auto& vec = eig.eigenvectors().col(idx);
    for (std::size_t t = 0; t < held.size(); ++t)
      scores[t] += lambda * vec[held[t].first] * vec[held[t].second];
    const double a = auc(scores, labels);
    est.diagnostics.push_back(a);
    if (a > best_auc + 1e-15) {
      best_auc = a;
      best_k = k;
    }
  }
  est.k_hat = best_k;
  return est;
}

// Point estimate from repeated pair splits: average the per-rank AUC over
// `repeats` masks drawn at fraction q, pick the best rank (ties to the
// smallest). Splits whose held-out pairs are single-class are skipped.
inline KEstimate ecv_repeated_k(const Graph& g, double q, int repeats, const EcvOptions& opt,
                                const Stream& s) {
  if (repeats < 1) throw InvalidInput("need at least one split");
  std::vector<double> sum(static_cast<std::size_t>(opt.k_max), 0.0);
  int used = 0;
  for (int r = 0; r < repeats; ++r) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      try {
        const PartialGraph pg = pair_sample(g, {Scheme::pair, q}, s.child(r).child(attempt));
        const KEstimate one = ecv_auc_k(pg, g, opt);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += one.diagnostics[i];
        ++used;
      } catch (const EmptySample&) {
        continue;
      } catch (const UndefinedAUC&) {
      } catch (const InvalidInput&) {
      }
      break;
    }
  }
  if (used == 0) throw UndefinedAUC("no usable split in " + std::to_string(repeats) + " tries");

  KEstimate est;
  est.method = "ecv_auc";
  int best_k = 1;
  double best = -1;
  for (int k = 1; k <= opt.k_max; ++k) {
    const double mean = sum[static_cast<std::size_t>(k - 1)] / used;
    est.diagnostics.push_back(mean);
    if (mean > best + 1e-15) {
      best = mean;
      best_k = k;
    }
  }
  est.k_hat = best_k;
  return est;
}

}  // namespace netboot
