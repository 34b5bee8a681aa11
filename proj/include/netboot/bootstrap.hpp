#pragma once

// Percentile bootstrap over subsampled graphs, and the double-bootstrap
// search for the sampling fraction q.
//
// Replicate b of a run draws its randomness from stream.child(b), so results
// are independent of thread count and of the order replicates execute in.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "netboot/parallel.hpp"
#include "netboot/rng.hpp"
#include "netboot/sampling.hpp"
#include "netboot/statistic.hpp"

namespace netboot {

struct CiIndices {
  std::size_t lower;  // 1-based order-statistic ranks
  std::size_t upper;
};

// Ranks of the order statistics taken as interval endpoints. floor(alpha/2*B)
// can be 0 and ceil((1-alpha/2)*B) can exceed B at the extremes; both are
// clamped into [1, B].
inline CiIndices percentile_indices(std::size_t b, double alpha) {
  if (b == 0) throw InvalidInput("need at least one replicate");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must be inside (0,1)");
  auto lo = static_cast<std::size_t>(std::floor(alpha / 2.0 * static_cast<double>(b)));
  auto hi = static_cast<std::size_t>(std::ceil((1.0 - alpha / 2.0) * static_cast<double>(b)));
  lo = std::clamp<std::size_t>(lo, 1, b);
  hi = std::clamp<std::size_t>(hi, 1, b);
  return {lo, hi};
}

struct BootstrapRun {
  Scheme scheme{};
  double q = 0.0;
  double alpha = 0.0;
  std::size_t num_replicates = 0;
  int dim = 1;

  std::vector<std::vector<double>> replicates;  // [B][dim], zeros where undefined
  std::vector<char> replicate_defined;          // [B]
  std::vector<double> lower;                    // per coordinate
  std::vector<double> upper;

  std::size_t num_undefined = 0;
  bool warning = false;         // more than 10% of replicates undefined
  bool degenerate_run = false;  // at least half undefined

  double width(int d = 0) const { return upper[d] - lower[d]; }
  bool covers(double t, int d = 0) const { return lower[d] <= t && t <= upper[d]; }
};

namespace boot_detail {

constexpr int kMaxResampleAttempts = 100;

// One subsample draw + evaluation. Empty draws are retried with fresh
// randomness; statistics that cannot be computed on the draw yield an
// undefined replicate.
inline StatSample draw_replicate(const GraphView& view, const Statistic& stat,
                                 const SamplingPlan& plan, const Stream& rep_stream) {
  const auto undefined = [&] {
    return StatSample{std::vector<double>(static_cast<std::size_t>(stat.dim()), 0.0), false};
  };
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Stream draw = rep_stream.child(attempt);
    try {
      switch (plan.scheme) {
        case Scheme::node: {
          const NodeSample ns = node_sample(view.g, plan, draw);
          std::vector<int> orig(ns.kept.size());
          for (std::size_t i = 0; i < ns.kept.size(); ++i) orig[i] = view.orig[ns.kept[i]];
          return stat.on_graph(GraphView{ns.graph, orig});
        }
        case Scheme::row: {
          const PartialGraph pg = row_sample(view.g, plan, draw);
          return stat.on_partial(pg, view);
        }
        case Scheme::pair: {
          const PartialGraph pg = pair_sample(view.g, plan, draw);
          return stat.on_partial(pg, view);
        }
      }
      throw ConfigError("unreachable sampling scheme");
    } catch (const EmptySample&) {
      continue;  // nothing drawn; retry with the next attempt stream
    } catch (const Undefined&) {
      return undefined();
    } catch (const NoEdges&) {
      return undefined();
    } catch (const UndefinedAUC&) {
      return undefined();
    }
  }
  return undefined();
}

}  // namespace boot_detail

// Percentile bootstrap: B subsample replicates of the statistic, interval
// endpoints are the clamped order statistics per coordinate. Undefined
// replicates enter the order statistics as zeros.
inline BootstrapRun bootstrap_ci(const GraphView& view, const Statistic& stat,
                                 const SamplingPlan& plan, std::size_t num_replicates,
                                 double alpha, const Stream& stream,
                                 int threads = env_thread_count()) {
  q_to_p(plan.scheme, plan.q);  // validates q
  if (!stat.supports(plan.scheme))
    throw ConfigError(stat.name() + " does not support the " + to_string(plan.scheme) + " scheme");
  const CiIndices idx = percentile_indices(num_replicates, alpha);
  const int dim = stat.dim();

  BootstrapRun run;
  run.scheme = plan.scheme;
  run.q = plan.q;
  run.alpha = alpha;
  run.num_replicates = num_replicates;
  run.dim = dim;
  run.replicates.assign(num_replicates, {});
  run.replicate_defined.assign(num_replicates, 0);

  parallel_for(num_replicates, threads, [&](std::size_t b) {
    const StatSample s = boot_detail::draw_replicate(view, stat, plan, stream.child(b));
    run.replicates[b] = s.values;
    run.replicate_defined[b] = s.defined ? 1 : 0;
  });

  for (char d : run.replicate_defined)
    if (!d) ++run.num_undefined;
  run.warning = run.num_undefined * 10 > num_replicates;
  run.degenerate_run = run.num_undefined * 2 >= num_replicates;

  run.lower.resize(dim);
  run.upper.resize(dim);
  std::vector<double> column(num_replicates);
  for (int d = 0; d < dim; ++d) {
    for (std::size_t b = 0; b < num_replicates; ++b) column[b] = run.replicates[b][d];
    std::sort(column.begin(), column.end());
    run.lower[d] = column[idx.lower - 1];
    run.upper[d] = column[idx.upper - 1];
  }
  return run;
}

struct QSelection {
  std::vector<double> candidates;
  std::vector<double> coverages;             // estimated coverage per candidate
  std::vector<double> degenerate_fractions;  // fraction of inner runs degenerate
  double alpha = 0.0;
  std::size_t chosen_index = 0;
  double chosen_q = 0.0;
};

// Double bootstrap for the sampling fraction. For every candidate q and every
// outer round the node set is split in half at random; the statistic on one
// half acts as the target, a bootstrap interval built on the other half at
// that q either covers it or not. The candidate whose empirical coverage sits
// closest to the nominal level wins, ties to the smaller q. Coverage of a
// vector statistic is averaged over coordinates.
inline QSelection choose_q(const GraphView& view, const Statistic& stat, Scheme scheme,
                           const std::vector<double>& candidates, std::size_t outer_rounds,
                           std::size_t inner_replicates, double alpha, const Stream& stream,
                           int threads = env_thread_count()) {
  if (candidates.empty()) throw ConfigError("no candidate fractions");
  for (double q : candidates) q_to_p(scheme, q);
  if (!stat.supports(scheme))
    throw ConfigError(stat.name() + " does not support the " + to_string(scheme) + " scheme");
  const int n = view.g.node_count();
  if (n < 4) throw ConfigError("graph too small to split for fraction selection");
  if (outer_rounds == 0) throw InvalidInput("need at least one outer round");
  percentile_indices(inner_replicates, alpha);

  const std::size_t num_candidates = candidates.size();
  const int dim = stat.dim();
  std::vector<double> round_coverage(num_candidates * outer_rounds, 0.0);
  std::vector<char> round_degenerate(num_candidates * outer_rounds, 0);

  parallel_for(num_candidates * outer_rounds, threads, [&](std::size_t task) {
    const std::size_t j = task / outer_rounds;
    const std::size_t b = task % outer_rounds;
    Stream task_stream = stream.child(j, b);

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Stream split_stream = task_stream.child(0);
    shuffle(perm, split_stream);
    const std::size_t half = static_cast<std::size_t>((n + 1) / 2);
    std::vector<int> first(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<int> second(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());

    const Graph g1 = induced_subgraph(view.g, first);
    std::vector<int> orig1(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) orig1[i] = view.orig[first[i]];
    const Graph g2 = induced_subgraph(view.g, second);
    std::vector<int> orig2(second.size());
    for (std::size_t i = 0; i < second.size(); ++i) orig2[i] = view.orig[second[i]];

    StatSample target;
    try {
      target = stat.on_graph(GraphView{g1, orig1});
    } catch (const Undefined&) {
      target.defined = false;
    } catch (const NoEdges&) {
      target.defined = false;
    }

    const BootstrapRun run = bootstrap_ci(GraphView{g2, orig2}, stat, {scheme, candidates[j]},
                                          inner_replicates, alpha, task_stream.child(1), 1);
    round_degenerate[task] = run.degenerate_run ? 1 : 0;
    if (!target.defined) return;  // counts as a miss
    double hits = 0.0;
    for (int d = 0; d < dim; ++d)
      if (run.covers(target.values[static_cast<std::size_t>(d)], d)) hits += 1.0;
    round_coverage[task] = hits / static_cast<double>(dim);
  });

  QSelection sel;
  sel.candidates = candidates;
  sel.alpha = alpha;
  sel.coverages.resize(num_candidates);
  sel.degenerate_fractions.resize(num_candidates);
  bool all_degenerate = true;
  for (std::size_t j = 0; j < num_candidates; ++j) {
    double cov = 0.0;
    std::size_t bad = 0;
    for (std::size_t b = 0; b < outer_rounds; ++b) {
      cov += round_coverage[j * outer_rounds + b];
      bad += round_degenerate[j * outer_rounds + b];
    }
    sel.coverages[j] = cov / static_cast<double>(outer_rounds);
    sel.degenerate_fractions[j] = static_cast<double>(bad) / static_cast<double>(outer_rounds);
    if (bad * 2 <= outer_rounds) all_degenerate = false;
  }
  if (all_degenerate)
    throw SelectionFailed("every candidate fraction produced mostly degenerate runs");

  const double nominal = 1.0 - alpha;
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < num_candidates; ++j) {
    const double loss = (sel.coverages[j] - nominal) * (sel.coverages[j] - nominal);
    const bool better = loss < best_loss - 1e-15 ||
                        (std::abs(loss - best_loss) <= 1e-15 && candidates[j] < candidates[best]);
    if (better) {
      best_loss = loss;
      best = j;
    }
  }
  sel.chosen_index = best;
  sel.chosen_q = candidates[best];
  return sel;
}

struct CoverageRow {
  double q = 0.0;
  double mean_width = 0.0;
  double coverage = 0.0;
  double frac_degenerate = 0.0;  // mean fraction of undefined replicates
};

// Monte Carlo coverage of the percentile interval for a scalar statistic:
// `reps` fresh graphs from `generate`, one bootstrap run per grid point each,
// scored against that graph's own full-sample statistic.
inline std::vector<CoverageRow> coverage_experiment(
    const std::function<Graph(const Stream&)>& generate, const Statistic& stat, Scheme scheme,
    const std::vector<double>& q_grid, std::size_t num_replicates, double alpha, std::size_t reps,
    const Stream& stream, int threads = env_thread_count()) {
  if (stat.dim() != 1) throw ConfigError("coverage experiment needs a scalar statistic");
  if (q_grid.empty()) throw ConfigError("empty q grid");
  if (reps == 0) throw InvalidInput("need at least one repetition");

  struct Cell {
    double width = 0.0;
    bool covered = false;
    double frac_undefined = 0.0;
    bool truth_defined = false;
  };
  std::vector<Cell> cells(reps * q_grid.size());

  parallel_for(reps, threads, [&](std::size_t r) {
    const Graph parent = generate(stream.child(0, r));
    const std::vector<int> ids = identity_ids(parent.node_count());
    const GraphView view{parent, ids};
    StatSample truth;
    try {
      truth = stat.on_graph(view);
    } catch (const Undefined&) {
      truth.defined = false;
    } catch (const NoEdges&) {
      truth.defined = false;
    }
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
      const BootstrapRun run = bootstrap_ci(view, stat, {scheme, q_grid[i]}, num_replicates,
                                            alpha, stream.child(1, r, i), 1);
      Cell& cell = cells[r * q_grid.size() + i];
      cell.width = run.width();
      cell.frac_undefined =
          static_cast<double>(run.num_undefined) / static_cast<double>(num_replicates);
      cell.truth_defined = truth.defined;
      cell.covered = truth.defined && run.covers(truth.values[0]);
    }
  });

  std::vector<CoverageRow> rows(q_grid.size());
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    CoverageRow& row = rows[i];
    row.q = q_grid[i];
    for (std::size_t r = 0; r < reps; ++r) {
      const Cell& cell = cells[r * q_grid.size() + i];
      row.mean_width += cell.width;
      row.coverage += cell.covered ? 1.0 : 0.0;
      row.frac_degenerate += cell.frac_undefined;
    }
    row.mean_width /= static_cast<double>(reps);
    row.coverage /= static_cast<double>(reps);
    row.frac_degenerate /= static_cast<double>(reps);
  }
  return rows;
}

}  // namespace netboot
