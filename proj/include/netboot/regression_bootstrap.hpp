#pragma once

// Uncertainty quantification for cohesion-regression coefficients: interval
// construction under the three subsampling schemes or the naive node
// bootstrap, and lasso stability selection over node subsamples.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netboot/bootstrap.hpp"
#include "netboot/community.hpp"
#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/parallel.hpp"
#include "netboot/regression.hpp"
#include "netboot/rng.hpp"
#include "netboot/sampling.hpp"
#include "netboot/statistic.hpp"

namespace netboot {

enum class ResampleKind { node, row, pair, naive };

inline std::string to_string(ResampleKind k) {
  switch (k) {
    case ResampleKind::node: return "node";
    case ResampleKind::row: return "row";
    case ResampleKind::pair: return "pair";
    case ResampleKind::naive: return "naive";
  }
  return "?";
}

inline ResampleKind resample_from_string(const std::string& s) {
  if (s == "naive") return ResampleKind::naive;
  switch (scheme_from_string(s)) {
    case Scheme::node: return ResampleKind::node;
    case Scheme::row: return ResampleKind::row;
    case Scheme::pair: return ResampleKind::pair;
  }
  throw ConfigError("unknown resampling kind '" + s + "'");
}

struct BetaUncertainty {
  ResampleKind kind{};
  double q = 0.0;  // unused by the naive bootstrap
  std::size_t num_replicates = 0;
  double alpha = 0.0;

  std::vector<double> lower, upper;  // per coefficient
  double mean_width = 0.0;
  double max_width = 0.0;
  double min_width = 0.0;

  // Versus a reference coefficient vector, when one is supplied.
  double coverage = std::numeric_limits<double>::quiet_NaN();  // mean over coordinates
  double mse = std::numeric_limits<double>::quiet_NaN();       // of the replicate mean

  std::size_t num_undefined = 0;
  bool warning = false;
  bool degenerate_run = false;
};

namespace regboot_detail {

inline BetaUncertainty summarize(const BootstrapRun& run, ResampleKind kind,
                                 const Eigen::VectorXd* reference) {
  BetaUncertainty out;
  out.kind = kind;
  out.q = run.q;
  out.num_replicates = run.num_replicates;
  out.alpha = run.alpha;
  out.lower = run.lower;
  out.upper = run.upper;
  out.num_undefined = run.num_undefined;
  out.warning = run.warning;
  out.degenerate_run = run.degenerate_run;

  const int p = run.dim;
  out.max_width = 0.0;
  out.min_width = std::numeric_limits<double>::infinity();
  for (int d = 0; d < p; ++d) {
    const double w = run.width(d);
    out.mean_width += w;
    out.max_width = std::max(out.max_width, w);
    out.min_width = std::min(out.min_width, w);
  }
  out.mean_width /= static_cast<double>(p);

  if (reference) {
    if (reference->size() != p) throw InvalidInput("reference coefficient length mismatch");
    double hits = 0.0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (const auto& rep : run.replicates)
      for (int d = 0; d < p; ++d) mean[d] += rep[static_cast<std::size_t>(d)];
    mean /= static_cast<double>(run.num_replicates);
    for (int d = 0; d < p; ++d)
      if (run.covers((*reference)[d], d)) hits += 1.0;
    out.coverage = hits / static_cast<double>(p);
    out.mse = (mean - *reference).squaredNorm() / static_cast<double>(p);
  }
  return out;
}

}  // namespace regboot_detail

// Percentile intervals for every coefficient of the cohesion fit. Graph
// subsampling refits on the embedded subgraph; the naive bootstrap refits on
// the resampled-node graph (all nodes present, so embedding is moot there).
inline BetaUncertainty beta_uncertainty(const Graph& g, const Eigen::MatrixXd& x,
                                        const Eigen::VectorXd& y, double lambda1,
                                        ResampleKind kind, double q, std::size_t num_replicates,
                                        double alpha, const Stream& stream,
                                        const Eigen::VectorXd* reference = nullptr,
                                        EmbeddingMode embedding = EmbeddingMode::zero_pad,
                                        int threads = env_thread_count()) {
  const int p = static_cast<int>(x.cols());
  if (p == 0) throw InvalidInput("no coefficients to bootstrap");

  if (kind != ResampleKind::naive) {
    const Scheme scheme = kind == ResampleKind::node   ? Scheme::node
                          : kind == ResampleKind::row  ? Scheme::row
                                                       : Scheme::pair;
    const CohesionBetaStatistic stat(x, y, lambda1, embedding);
    const std::vector<int> ids = identity_ids(g.node_count());
    const BootstrapRun run =
        bootstrap_ci(GraphView{g, ids}, stat, {scheme, q}, num_replicates, alpha, stream, threads);
    return regboot_detail::summarize(run, kind, reference);
  }

  const CiIndices idx = percentile_indices(num_replicates, alpha);
  BootstrapRun run;
  run.scheme = Scheme::node;
  run.q = q;
  run.alpha = alpha;
  run.num_replicates = num_replicates;
  run.dim = p;
  run.replicates.assign(num_replicates, {});
  run.replicate_defined.assign(num_replicates, 1);
  parallel_for(num_replicates, threads, [&](std::size_t b) {
    Stream rs = stream.child(b);
    const Graph gb = naive_node_bootstrap(g, rs);
    const CohesionFit fit = fit_cohesion(x, y, gb, lambda1);
    run.replicates[b].assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
  });
  run.lower.resize(p);
  run.upper.resize(p);
  std::vector<double> column(num_replicates);
  for (int d = 0; d < p; ++d) {
    for (std::size_t b = 0; b < num_replicates; ++b)
      column[b] = run.replicates[b][static_cast<std::size_t>(d)];
    std::sort(column.begin(), column.end());
    run.lower[d] = column[idx.lower - 1];
    run.upper[d] = column[idx.upper - 1];
  }
  return regboot_detail::summarize(run, ResampleKind::naive, reference);
}

// ---- stability selection ---------------------------------------------------

// Descending log-spaced grid from ||X'Y||_inf down to 1% of it.
inline std::vector<double> lambda2_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        int points = 20) {
  if (points < 1) throw InvalidInput("need at least one grid point");
  const double lmax = (x.transpose() * y).cwiseAbs().maxCoeff();
  if (!(lmax > 0.0)) throw DegenerateDesign("X'Y vanishes; no meaningful lasso path");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lmax;
    return grid;
  }
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = lmax * std::pow(0.01, f);
  }
  return grid;
}

struct StabilitySelection {
  std::vector<double> lambda2_path;                  // descending
  std::vector<std::vector<double>> freq_by_lambda;   // [grid point][coefficient]
  std::vector<double> frequency;                     // per coefficient, max over the path
  std::size_t num_subsamples = 0;
};

// Node-subsample stability selection: refit the lasso on each subsample along
// the lambda2 path (warm starts, largest penalty first) and record how often
// each coefficient is active. A coefficient's score is its selection
// frequency maximized over the path. Passing an explicit lambda2 collapses
// the path to that single value.
inline StabilitySelection stability_selection(const Graph& g, const Eigen::MatrixXd& x,
                                              const Eigen::VectorXd& y, double lambda1, double q,
                                              std::size_t num_subsamples,
                                              std::optional<double> lambda2, const Stream& stream,
                                              int threads = env_thread_count()) {
  const int p = static_cast<int>(x.cols());
  if (p == 0) throw InvalidInput("no coefficients to select over");
  if (num_subsamples == 0) throw InvalidInput("need at least one subsample");
  q_to_p(Scheme::node, q);

  StabilitySelection sel;
  if (lambda2) {
    if (*lambda2 < 0.0) throw InvalidInput("lambda2 must be nonnegative");
    sel.lambda2_path = {*lambda2};
  } else {
    sel.lambda2_path = lambda2_grid(x, y);
  }
  sel.num_subsamples = num_subsamples;
  const std::size_t path_len = sel.lambda2_path.size();

  std::vector<std::vector<char>> active(num_subsamples,
                                        std::vector<char>(path_len * static_cast<std::size_t>(p), 0));
  parallel_for(num_subsamples, threads, [&](std::size_t b) {
    const Stream bs = stream.child(b);
    NodeSample ns;
    bool drew = false;
    for (int attempt = 0; attempt < boot_detail::kMaxResampleAttempts && !drew; ++attempt) {
      try {
        ns = node_sample(g, {Scheme::node, q}, bs.child(attempt));
        drew = true;
      } catch (const EmptySample&) {
      }
    }
    if (!drew) return;  // leaves this subsample's row all-inactive

    std::vector<Edge> edges;
    edges.reserve(ns.graph.edges().size());
    for (const auto& [a, b2] : ns.graph.edges()) edges.emplace_back(ns.kept[a], ns.kept[b2]);
    const Graph embedded = Graph::from_edges(g.node_count(), std::move(edges));

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < path_len; ++i) {
      const CohesionFit fit =
          fit_cohesion_lasso(x, y, embedded, lambda1, sel.lambda2_path[i], {}, &warm);
      warm = fit.beta;
      for (int j : fit.active_set) active[b][i * static_cast<std::size_t>(p) + j] = 1;
    }
  });

  sel.freq_by_lambda.assign(path_len, std::vector<double>(static_cast<std::size_t>(p), 0.0));
  for (std::size_t b = 0; b < num_subsamples; ++b)
    for (std::size_t i = 0; i < path_len; ++i)
      for (int j = 0; j < p; ++j)
        sel.freq_by_lambda[i][static_cast<std::size_t>(j)] +=
            active[b][i * static_cast<std::size_t>(p) + j];
  for (auto& row : sel.freq_by_lambda)
    for (double& f : row) f /= static_cast<double>(num_subsamples);

  sel.frequency.assign(static_cast<std::size_t>(p), 0.0);
  for (std::size_t i = 0; i < path_len; ++i)
    for (int j = 0; j < p; ++j)
      sel.frequency[static_cast<std::size_t>(j)] =
          std::max(sel.frequency[static_cast<std::size_t>(j)],
                   sel.freq_by_lambda[i][static_cast<std::size_t>(j)]);
  return sel;
}

// How well the selection frequencies rank true support over noise predictors.
inline double selection_auc(const std::vector<double>& frequency, const std::vector<char>& support) {
  return auc(frequency, support);
}

}  // namespace netboot
