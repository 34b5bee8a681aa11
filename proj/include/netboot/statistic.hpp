#pragma once

// Statistic interface used by the bootstrap engine. A statistic evaluates on
// a fully observed graph or on a partial observation (row / pair samples),
// returning a fixed-dimension value vector (dimension 1 for scalars) plus a
// defined flag; undefined evaluations become degenerate replicates.
//
// Evaluations carry a view mapping local node ids to the ids of the root
// graph the statistic was configured for. Graph statistics ignore it; the
// regression statistic uses it to embed a subsample's Laplacian alongside the
// full covariate matrix.

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "netboot/community.hpp"
#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/regression.hpp"
#include "netboot/sampling.hpp"
#include "netboot/stats.hpp"

namespace netboot {

struct GraphView {
  const Graph& g;
  std::span<const int> orig;  // orig[local id] = root id
};

struct StatSample {
  std::vector<double> values;
  bool defined = true;
};

class Statistic {
 public:
  virtual ~Statistic() = default;
  virtual std::string name() const = 0;
  virtual int dim() const { return 1; }
  virtual bool supports(Scheme) const { return true; }
  virtual StatSample on_graph(const GraphView& view) const = 0;
  virtual StatSample on_partial(const PartialGraph& pg, const GraphView& parent) const = 0;
};

inline std::vector<int> identity_ids(int n) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

namespace stat_detail {

inline StatSample scalar(double v, bool defined = true) { return {{v}, defined}; }

}  // namespace stat_detail

class EdgeDensityStatistic final : public Statistic {
 public:
  std::string name() const override { return "edge_density"; }
  StatSample on_graph(const GraphView& view) const override {
    return stat_detail::scalar(edge_density(view.g));
  }
  StatSample on_partial(const PartialGraph& pg, const GraphView&) const override {
    return stat_detail::scalar(partial_edge_density(pg));
  }
};

class TriangleDensityStatistic final : public Statistic {
 public:
  explicit TriangleDensityStatistic(PartialTriangleMode mode = PartialTriangleMode::mask_restricted)
      : mode_(mode) {}
  std::string name() const override { return "triangle_density"; }
  StatSample on_graph(const GraphView& view) const override {
    const auto v = normalized_triangle_density(view.g);
    return stat_detail::scalar(v.value, v.defined);
  }
  StatSample on_partial(const PartialGraph& pg, const GraphView&) const override {
    const auto v = partial_triangle_density(pg, mode_);
    return stat_detail::scalar(v.value, v.defined);
  }

 private:
  PartialTriangleMode mode_;
};

// Bethe-Hessian community count. Partial observations are scored on the
// observed-edge graph over all parent nodes (unobserved pairs as zeros).
class BetheHessianStatistic final : public Statistic {
 public:
  explicit BetheHessianStatistic(BetheHessianOptions opt = {}) : opt_(opt) {}
  std::string name() const override { return "num_communities_bh"; }
  StatSample on_graph(const GraphView& view) const override {
    return stat_detail::scalar(static_cast<double>(bethe_hessian_k(view.g, opt_).k_hat));
  }
  StatSample on_partial(const PartialGraph& pg, const GraphView&) const override {
    const Graph zero_filled = Graph::from_edges(pg.parent_n, pg.observed_edges);
    return stat_detail::scalar(static_cast<double>(bethe_hessian_k(zero_filled, opt_).k_hat));
  }

 private:
  BetheHessianOptions opt_;
};

// Cross-validated rank estimate; defined for pair sampling only (it needs a
// mask with held-out pairs and the parent's labels).
class EcvStatistic final : public Statistic {
 public:
  explicit EcvStatistic(EcvOptions opt = {}) : opt_(opt) {}
  std::string name() const override { return "num_communities_ecv"; }
  bool supports(Scheme s) const override { return s == Scheme::pair; }
  StatSample on_graph(const GraphView&) const override {
    throw ConfigError("num_communities_ecv has no full-graph value; use the pair scheme");
  }
  StatSample on_partial(const PartialGraph& pg, const GraphView& parent) const override {
    return stat_detail::scalar(static_cast<double>(ecv_auc_k(pg, parent.g, opt_).k_hat));
  }

 private:
  EcvOptions opt_;
};

// Cohesion-regression coefficients refit on subsampled graphs. X and Y stay
// full size; the subsample contributes its Laplacian at the original node
// indices.
class CohesionBetaStatistic final : public Statistic {
 public:
  CohesionBetaStatistic(Eigen::MatrixXd x, Eigen::VectorXd y, double lambda1,
                        EmbeddingMode embedding = EmbeddingMode::zero_pad)
      : x_(std::move(x)), y_(std::move(y)), lambda1_(lambda1), embedding_(embedding) {}

  std::string name() const override { return "cohesion_beta"; }
  int dim() const override { return static_cast<int>(x_.cols()); }

  StatSample on_graph(const GraphView& view) const override {
    std::vector<Edge> edges;
    edges.reserve(view.g.edges().size());
    for (const auto& [a, b] : view.g.edges()) edges.emplace_back(view.orig[a], view.orig[b]);
    CohesionOptions opt;
    opt.embedding = embedding_;
    if (embedding_ == EmbeddingMode::kept_only) {
      std::vector<int> support(view.orig.begin(), view.orig.end());
      std::sort(support.begin(), support.end());
      opt.support = std::move(support);
    }
    return fit_embedded(std::move(edges), opt);
  }

  StatSample on_partial(const PartialGraph& pg, const GraphView& parent) const override {
    if (embedding_ == EmbeddingMode::kept_only)
      throw ConfigError("kept-only embedding needs a node subsample");
    std::vector<Edge> edges;
    edges.reserve(pg.observed_edges.size());
    for (const auto& [a, b] : pg.observed_edges)
      edges.emplace_back(parent.orig[a], parent.orig[b]);
    return fit_embedded(std::move(edges), CohesionOptions{});
  }

 private:
  StatSample fit_embedded(std::vector<Edge> edges, const CohesionOptions& opt) const {
    const Graph embedded = Graph::from_edges(static_cast<int>(x_.rows()), std::move(edges));
    const CohesionFit fit = fit_cohesion(x_, y_, embedded, lambda1_, opt);
    StatSample out;
    out.values.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
    return out;
  }

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  double lambda1_;
  EmbeddingMode embedding_;
};

struct StatisticOptions {
  PartialTriangleMode triangle_mode = PartialTriangleMode::mask_restricted;
  BetheHessianOptions bh;
  EcvOptions ecv;
};

inline std::unique_ptr<Statistic> make_statistic(const std::string& id,
                                                 const StatisticOptions& opt = {}) {
  if (id == "edge_density") return std::make_unique<EdgeDensityStatistic>();
  if (id == "triangle_density") return std::make_unique<TriangleDensityStatistic>(opt.triangle_mode);
  if (id == "num_communities_bh") return std::make_unique<BetheHessianStatistic>(opt.bh);
  if (id == "num_communities_ecv") return std::make_unique<EcvStatistic>(opt.ecv);
  throw ConfigError("unknown statistic '" + id + "'");
}

}  // namespace netboot
