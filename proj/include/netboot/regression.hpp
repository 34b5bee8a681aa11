#pragma once

// Network-cohesion regression: per-node effects alpha smoothed by the graph
// Laplacian plus shared coefficients beta,
//   minimize ||Y - alpha - X beta||^2 + lambda1 * alpha' L alpha
// with an optional lasso penalty lambda2 * ||beta||_1 on the coefficients.
//
// Nodes without penalty edges decouple: their alpha absorbs the residual
// exactly, so the linear algebra runs on the penalized block only. Subsample
// refits pass a graph whose edges sit at the original node indices; dropped
// nodes simply have empty rows (zero-padded embedding). The kept-block
// variant instead pins alpha to zero outside an explicit support set.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/generators.hpp"
#include "netboot/graph.hpp"
#include "netboot/rng.hpp"

namespace netboot {

enum class EmbeddingMode { zero_pad, kept_only };

struct CohesionOptions {
  EmbeddingMode embedding = EmbeddingMode::zero_pad;
  // alpha support for kept_only (sorted original ids); ignored for zero_pad.
  std::optional<std::vector<int>> support;
  int max_sweeps = 10000;          // lasso only
  double objective_tol = 1e-10;    // lasso only: relative decrease cutoff
  bool freeze_alpha_at_zero = false;  // lasso only: skip alpha updates
};

struct CohesionFit {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double objective = 0.0;
  bool converged = true;               // false = sweep cap hit (lasso)
  int sweeps = 0;                      // lasso only
  std::vector<int> active_set;         // indices with beta_j != 0
  std::vector<double> objective_path;  // lasso only, one entry per sweep
};

namespace reg_detail {

// Index partition for the solver: `pen` nodes carry Laplacian coupling,
// `free` nodes have unconstrained alpha and no penalty, `zero` nodes have
// alpha pinned at 0 (kept_only embedding).
struct Partition {
  std::vector<int> pen, free_, zero;
  std::vector<Edge> pen_edges;  // relabeled into pen-local indices
};

inline Partition partition_nodes(const Graph& g, double lambda1, const CohesionOptions& opt) {
  const int n = g.node_count();
  std::vector<char> in_support(n, 1);
  if (opt.embedding == EmbeddingMode::kept_only) {
    if (!opt.support) throw ConfigError("kept_only embedding needs a support set");
    std::fill(in_support.begin(), in_support.end(), 0);
    for (int v : *opt.support) {
      if (v < 0 || v >= n) throw InvalidNode("support id out of range");
      in_support[v] = 1;
    }
  }
  std::vector<char> penalized(n, 0);
  std::vector<Edge> edges;
  if (lambda1 > 0.0) {
    for (const auto& [a, b] : g.edges())
      if (in_support[a] && in_support[b]) {
        penalized[a] = penalized[b] = 1;
        edges.emplace_back(a, b);
      }
  }
  Partition part;
  std::vector<int> local(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!in_support[v]) part.zero.push_back(v);
    else if (penalized[v]) {
      local[v] = static_cast<int>(part.pen.size());
      part.pen.push_back(v);
    } else part.free_.push_back(v);
  }
  part.pen_edges.reserve(edges.size());
  for (const auto& [a, b] : edges) part.pen_edges.emplace_back(local[a], local[b]);
  return part;
}

inline Eigen::MatrixXd rows(const Eigen::MatrixXd& x, const std::vector<int>& idx) {
  Eigen::MatrixXd out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = x.row(idx[i]);
  return out;
}
inline Eigen::VectorXd entries(const Eigen::VectorXd& y, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

// C = (1+delta) I + lambda1 L over the penalized block.
inline Eigen::MatrixXd penalized_system(const Partition& part, double lambda1, double delta) {
  const int m = static_cast<int>(part.pen.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) c(i, i) = 1.0 + delta;
  for (const auto& [a, b] : part.pen_edges) {
    c(a, a) += lambda1;
    c(b, b) += lambda1;
    c(a, b) -= lambda1;
    c(b, a) -= lambda1;
  }
  return c;
}

inline double penalty_quad(const Partition& part, const Eigen::VectorXd& alpha_pen) {
  double s = 0;
  for (const auto& [a, b] : part.pen_edges) {
    const double d = alpha_pen[a] - alpha_pen[b];
    s += d * d;
  }
  return s;
}

struct Assembled {
  Eigen::VectorXd alpha;  // full length n
  double penalty = 0;     // alpha' L alpha over penalty edges
};

inline Assembled assemble_alpha(const Partition& part, int n, const Eigen::VectorXd& alpha_pen,
                                const Eigen::VectorXd& alpha_free) {
  Assembled out;
  out.alpha = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < part.pen.size(); ++i) out.alpha[part.pen[i]] = alpha_pen[i];
  for (std::size_t i = 0; i < part.free_.size(); ++i) out.alpha[part.free_[i]] = alpha_free[i];
  out.penalty = penalty_quad(part, alpha_pen);
  return out;
}

}  // namespace reg_detail

inline double cohesion_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Graph& g, double lambda1, const Eigen::VectorXd& alpha,
                                 const Eigen::VectorXd& beta, double lambda2 = 0.0) {
  const Eigen::VectorXd r = y - alpha - x * beta;
  double pen = 0;
  for (const auto& [a, b] : g.edges()) {
    const double d = alpha[a] - alpha[b];
    pen += d * d;
  }
  return r.squaredNorm() + lambda1 * pen + lambda2 * beta.lpNorm<1>();
}

// Gradient of the smooth part (squared loss + Laplacian penalty) w.r.t.
// (alpha, beta); used by correctness checks.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> cohesion_gradient(
    const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Graph& g, double lambda1,
    const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd r = alpha + x * beta - y;
  Eigen::VectorXd ga = 2.0 * r;
  for (const auto& [a, b] : g.edges()) {
    ga[a] += 2.0 * lambda1 * (alpha[a] - alpha[b]);
    ga[b] += 2.0 * lambda1 * (alpha[b] - alpha[a]);
  }
  Eigen::VectorXd gb = 2.0 * x.transpose() * r;
  return {std::move(ga), std::move(gb)};
}

inline CohesionFit fit_cohesion(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Graph& g,
                                double lambda1, const CohesionOptions& opt = {}) {
  const int n = g.node_count();
  const int p = static_cast<int>(x.cols());
  if (x.rows() != n || y.size() != n) throw InvalidInput("X/Y size must match node count");
  if (lambda1 < 0.0) throw InvalidInput("lambda1 must be nonnegative");

  const auto part = reg_detail::partition_nodes(g, lambda1, opt);
  const Eigen::MatrixXd xa = reg_detail::rows(x, part.pen);
  const Eigen::MatrixXd xf = reg_detail::rows(x, part.free_);
  const Eigen::MatrixXd xd = reg_detail::rows(x, part.zero);
  const Eigen::VectorXd ya = reg_detail::entries(y, part.pen);
  const Eigen::VectorXd yf = reg_detail::entries(y, part.free_);
  const Eigen::VectorXd yd = reg_detail::entries(y, part.zero);

  const auto solve_with = [&](double delta) -> CohesionFit {
    Eigen::MatrixXd v;       // C^-1 X_A
    Eigen::VectorXd w;       // C^-1 Y_A
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!part.pen.empty()) {
      llt.compute(reg_detail::penalized_system(part, lambda1, delta));
      if (llt.info() != Eigen::Success) throw Error("penalized system not SPD");
      v = llt.solve(xa);
      w = llt.solve(ya);
    }
    const double shrink = 1.0 / (1.0 + delta);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    if (!part.pen.empty()) {
      s.noalias() += xa.transpose() * xa - xa.transpose() * v;
      rhs.noalias() += xa.transpose() * ya - xa.transpose() * w;
    }
    if (delta > 0.0 && !part.free_.empty()) {
      s.noalias() += (1.0 - shrink) * xf.transpose() * xf;
      rhs.noalias() += (1.0 - shrink) * xf.transpose() * yf;
    }
    if (!part.zero.empty()) {
      s.noalias() += xd.transpose() * xd;
      rhs.noalias() += xd.transpose() * yd;
    }
    s.diagonal().array() += delta;

    CohesionFit fit;
    if (p > 0) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
      const auto d = ldlt.vectorD();
      const double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
      const bool singular =
          ldlt.info() != Eigen::Success || d.size() == 0 || d.minCoeff() <= 1e-12 * std::max(dmax, 1e-300);
      if (singular && delta == 0.0) {
        CohesionFit failed;
        failed.converged = false;  // caller retries jittered
        return failed;
      }
      fit.beta = ldlt.solve(rhs);
    } else {
      fit.beta = Eigen::VectorXd(0);
    }

    Eigen::VectorXd alpha_pen =
        part.pen.empty() ? Eigen::VectorXd(0) : Eigen::VectorXd(w - v * fit.beta);
    Eigen::VectorXd alpha_free = shrink * (yf - xf * fit.beta);
    auto assembled = reg_detail::assemble_alpha(part, n, alpha_pen, alpha_free);
    fit.alpha = std::move(assembled.alpha);
    const Eigen::VectorXd resid = y - fit.alpha - x * fit.beta;
    fit.objective = resid.squaredNorm() + lambda1 * assembled.penalty;
    fit.converged = true;
    for (int j = 0; j < p; ++j)
      if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
    return fit;
  };

  CohesionFit fit = solve_with(0.0);
  if (!fit.converged) {
    const double trace =
        n + x.squaredNorm() + 2.0 * lambda1 * static_cast<double>(part.pen_edges.size());
    const double delta = 1e-8 * trace / static_cast<double>(n + p);
    fit = solve_with(delta);
  }
  return fit;
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

inline CohesionFit fit_cohesion_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Graph& g, double lambda1, double lambda2,
                                      const CohesionOptions& opt = {},
                                      const Eigen::VectorXd* beta_warm = nullptr) {
  const int n = g.node_count();
  const int p = static_cast<int>(x.cols());
  if (x.rows() != n || y.size() != n) throw InvalidInput("X/Y size must match node count");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw InvalidInput("penalties must be nonnegative");

  const auto part = reg_detail::partition_nodes(g, lambda1, opt);
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (!part.pen.empty()) {
    llt.compute(reg_detail::penalized_system(part, lambda1, 0.0));
    if (llt.info() != Eigen::Success) throw Error("penalized system not SPD");
  }
  const Eigen::MatrixXd xa = reg_detail::rows(x, part.pen);
  const Eigen::VectorXd ya = reg_detail::entries(y, part.pen);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (beta_warm && beta_warm->size() == p) beta = *beta_warm;
  Eigen::VectorXd col_sq(p);
  for (int j = 0; j < p; ++j) col_sq[j] = x.col(j).squaredNorm();

  CohesionFit fit;
  fit.converged = false;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  double prev_obj = std::numeric_limits<double>::infinity();
  double penalty = 0;

  const auto alpha_step = [&] {
    if (opt.freeze_alpha_at_zero) {
      alpha.setZero();
      penalty = 0;
      return;
    }
    Eigen::VectorXd alpha_pen = part.pen.empty()
                                    ? Eigen::VectorXd(0)
                                    : Eigen::VectorXd(llt.solve(ya - xa * beta));
    for (std::size_t i = 0; i < part.pen.size(); ++i) alpha[part.pen[i]] = alpha_pen[i];
    for (int v : part.free_) alpha[v] = y[v] - x.row(v).dot(beta);
    for (int v : part.zero) alpha[v] = 0.0;
    penalty = reg_detail::penalty_quad(part, alpha_pen);
  };

  alpha_step();
  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    Eigen::VectorXd r = y - alpha - x * beta;
    for (int j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) { beta[j] = 0.0; continue; }
      const double z = x.col(j).dot(r) + col_sq[j] * beta[j];
      const double nb = soft_threshold(z, lambda2 / 2.0) / col_sq[j];
      if (nb != beta[j]) {
        r.noalias() -= x.col(j) * (nb - beta[j]);
        beta[j] = nb;
      }
    }
    alpha_step();
    r = y - alpha - x * beta;
    const double obj = r.squaredNorm() + lambda1 * penalty + lambda2 * beta.lpNorm<1>();
    fit.objective_path.push_back(obj);

    double kkt = 0;
    for (int j = 0; j < p; ++j) {
      const double grad = 2.0 * x.col(j).dot(r);
      if (beta[j] > 0.0) kkt = std::max(kkt, std::abs(grad - lambda2));
      else if (beta[j] < 0.0) kkt = std::max(kkt, std::abs(grad + lambda2));
      else kkt = std::max(kkt, std::max(0.0, std::abs(grad) - lambda2));
    }
    const double scale = 1.0 + std::abs(obj);
    if (prev_obj - obj < opt.objective_tol * scale && kkt <= 1e-8 * (1.0 + lambda2 + obj)) {
      fit.converged = true;
      fit.objective = obj;
      ++sweep;
      break;
    }
    prev_obj = obj;
    fit.objective = obj;
  }
  fit.sweeps = sweep;
  fit.alpha = std::move(alpha);
  fit.beta = std::move(beta);
  for (int j = 0; j < p; ++j)
    if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
  return fit;
}

// ---- naive node bootstrap ------------------------------------------------

// Resample n nodes with replacement; the bootstrap graph connects i != j iff
// the drawn originals are adjacent or identical.
inline Graph naive_node_bootstrap_with_draws(const Graph& g, const std::vector<int>& draws) {
  const int n = g.node_count();
  if (static_cast<int>(draws.size()) != n) throw InvalidInput("need exactly n draws");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int u = draws[i];
      const int v = draws[j];
      if (u == v || g.has_edge(u, v)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

inline Graph naive_node_bootstrap(const Graph& g, Stream& s) {
  const int n = g.node_count();
  if (n == 0) throw EmptySample("empty graph");
  std::vector<int> draws(n);
  for (int i = 0; i < n; ++i)
    draws[i] = static_cast<int>(s.next_below(static_cast<std::uint64_t>(n)));
  return naive_node_bootstrap_with_draws(g, draws);
}

// ---- simulation design -----------------------------------------------------

// Blocked SBM with per-node effects spread around per-block centers
// (-1..1), coefficients centered at 1, unit noise.
struct DesignParams {
  int blocks = 3;
  int block_size = 200;
  double rho = 0.2;
  double t = 10.0;
  double sigma_alpha = 0.1;
  int p = 5;
  int support_size = -1;  // -1: all coefficients nonzero
};

struct DesignData {
  Graph graph;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd alpha_true;
  Eigen::VectorXd beta_true;
  std::vector<char> support;  // per coefficient
};

inline DesignData make_design(const DesignParams& dp, const Stream& s) {
  SbmParams sp;
  sp.block_sizes.assign(dp.blocks, dp.block_size);
  sp.rho = dp.rho;
  sp.t = dp.t;
  const int n = sp.total_nodes();
  DesignData d;
  d.graph = generate_sbm(sp, s.child(0));

  Stream xs = s.child(1);
  d.x.resize(n, dp.p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dp.p; ++j) d.x(i, j) = xs.next_normal();

  const int k_support = dp.support_size < 0 ? dp.p : dp.support_size;
  if (k_support > dp.p) throw InvalidInput("support larger than p");
  std::vector<int> idx(dp.p);
  std::iota(idx.begin(), idx.end(), 0);
  Stream sup = s.child(2);
  shuffle(idx, sup);
  d.support.assign(dp.p, 0);
  for (int j = 0; j < k_support; ++j) d.support[idx[j]] = 1;

  Stream bs = s.child(3);
  d.beta_true = Eigen::VectorXd::Zero(dp.p);
  for (int j = 0; j < dp.p; ++j)
    if (d.support[j]) d.beta_true[j] = 1.0 + bs.next_normal();

  Stream as = s.child(4);
  d.alpha_true.resize(n);
  const auto labels = sbm_labels(sp);
  for (int i = 0; i < n; ++i) {
    const double center =
        dp.blocks == 1 ? 0.0 : -1.0 + 2.0 * labels[i] / static_cast<double>(dp.blocks - 1);
    d.alpha_true[i] = center + dp.sigma_alpha * as.next_normal();
  }

  Stream es = s.child(5);
  d.y.resize(n);
  for (int i = 0; i < n; ++i)
    d.y[i] = d.alpha_true[i] + d.x.row(i).dot(d.beta_true) + es.next_normal();
  return d;
}

}  // namespace netboot
