#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "netboot/community.hpp"
#include "netboot/errors.hpp"
#include "netboot/generators.hpp"
#include "netboot/graph.hpp"
#include "netboot/sampling.hpp"

using netboot::auc;
using netboot::bethe_hessian_k;
using netboot::BetheHessianOptions;
using netboot::ecv_auc_k;
using netboot::EcvOptions;
using netboot::Graph;
using netboot::Scheme;
using netboot::Stream;

namespace {

Graph two_cliques(int size) {
  std::vector<netboot::Edge> edges;
  for (int block = 0; block < 2; ++block) {
    const int base = block * size;
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) edges.emplace_back(base + i, base + j);
  }
  return Graph::from_edges(2 * size, std::move(edges));
}

Graph planted_sbm(const Stream& s) {
  return netboot::generate_sbm({{40, 40}, 0.15, 6.0}, s);
}

}  // namespace

TEST_CASE("auc matches hand-worked rankings", "[community]") {
  REQUIRE(auc({0.9, 0.8, 0.1}, {1, 1, 0}) == 1.0);
  REQUIRE(auc({0.9, 0.8, 0.1}, {0, 0, 1}) == 0.0);
  // one concordant, one discordant pair
  REQUIRE(auc({0.3, 0.2, 0.4}, {1, 0, 0}) == 0.5);
  // all scores tied: every pair scores half
  REQUIRE(auc({1.0, 1.0, 1.0, 1.0}, {1, 0, 1, 0}) == 0.5);
  // one tie between a positive and a negative among distinct values:
  // pairs (pos .5 vs neg .5) = 0.5, (pos .5 vs neg .1) = 1 -> 0.75
  REQUIRE(auc({0.5, 0.5, 0.1}, {1, 0, 0}) == 0.75);
  REQUIRE_THROWS_AS(auc({0.5, 0.6}, {1, 1}), netboot::UndefinedAUC);
  REQUIRE_THROWS_AS(auc({0.5, 0.6}, {0, 0}), netboot::UndefinedAUC);
  REQUIRE_THROWS_AS(auc({0.5}, {1, 0}), netboot::InvalidInput);
}

TEST_CASE("two disjoint cliques give two negative eigenvalues", "[community]") {
  // K20 + K20: every degree is 19, r = sqrt(19), H = 37 I - sqrt(19) A.
  // A's spectrum is {19, 19, -1 x 38}, so H has exactly two eigenvalues at
  // 37 - 19 sqrt(19) and the rest at 37 + sqrt(19).
  const Graph g = two_cliques(20);
  const auto est = bethe_hessian_k(g);
  REQUIRE(est.k_hat == 2);
  REQUIRE(est.method == "bethe_hessian");
  const double lo = 37.0 - 19.0 * std::sqrt(19.0);
  const double hi = 37.0 + std::sqrt(19.0);
  REQUIRE(est.diagnostics.size() == 12);  // 2 * k_max of them kept
  REQUIRE(est.diagnostics[0] == Catch::Approx(lo).margin(1e-6));
  REQUIRE(est.diagnostics[1] == Catch::Approx(lo).margin(1e-6));
  REQUIRE(est.diagnostics[2] == Catch::Approx(hi).margin(1e-6));
}

TEST_CASE("a single clique gives one negative eigenvalue", "[community]") {
  std::vector<netboot::Edge> edges;
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j) edges.emplace_back(i, j);
  const auto est = bethe_hessian_k(Graph::from_edges(20, std::move(edges)));
  REQUIRE(est.k_hat == 1);
  REQUIRE(est.diagnostics[0] == Catch::Approx(37.0 - 19.0 * std::sqrt(19.0)).margin(1e-6));
}

TEST_CASE("graphs without edges have no Bethe Hessian", "[community]") {
  REQUIRE_THROWS_AS(bethe_hessian_k(Graph::from_edges(5, {})), netboot::NoEdges);
}

TEST_CASE("iterative eigensolve agrees with the dense path", "[community]") {
  BetheHessianOptions dense_opt;
  BetheHessianOptions iter_opt;
  iter_opt.dense_threshold = 10;  // force subspace iteration

  const Graph cliques = two_cliques(20);
  const auto d = bethe_hessian_k(cliques, dense_opt);
  const auto it = bethe_hessian_k(cliques, iter_opt);
  REQUIRE(it.k_hat == d.k_hat);
  REQUIRE(it.diagnostics.size() == d.diagnostics.size());
  for (std::size_t i = 0; i < d.diagnostics.size(); ++i)
    REQUIRE(it.diagnostics[i] ==
            Catch::Approx(d.diagnostics[i]).margin(1e-4 * (1.0 + std::abs(d.diagnostics[i]))));

  const Graph er = netboot::generate_er(300, 0.1, Stream::root(51));
  REQUIRE(bethe_hessian_k(er, iter_opt).k_hat == bethe_hessian_k(er, dense_opt).k_hat);
}

TEST_CASE("cross-validated rank recovers a planted two-block graph", "[community]") {
  const Graph g = planted_sbm(Stream::root(53));
  const auto pg = netboot::pair_sample(g, {Scheme::pair, 0.8}, Stream::root(54));
  const auto est = ecv_auc_k(pg, g);
  REQUIRE(est.method == "ecv_auc");
  REQUIRE(est.diagnostics.size() == 6);  // one AUC per candidate rank
  for (double a : est.diagnostics) {
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
  }
  // the second eigenvector carries the block split
  REQUIRE(est.diagnostics[1] > est.diagnostics[0]);
  REQUIRE(est.k_hat == 2);
}

TEST_CASE("repeated splits average the per-rank scores", "[community]") {
  const Graph g = planted_sbm(Stream::root(59));
  const auto est = netboot::ecv_repeated_k(g, 0.8, 5, {}, Stream::root(60));
  REQUIRE(est.k_hat == 2);
  REQUIRE(est.diagnostics.size() == 6);
  REQUIRE(est.diagnostics[1] > est.diagnostics[0]);

  const auto again = netboot::ecv_repeated_k(g, 0.8, 5, {}, Stream::root(60));
  REQUIRE(again.k_hat == est.k_hat);
  REQUIRE(again.diagnostics == est.diagnostics);
}

TEST_CASE("cross-validation rejects unusable inputs", "[community]") {
  const Graph g = planted_sbm(Stream::root(61));

  const auto row_pg = netboot::row_sample(g, {Scheme::row, 0.5}, Stream::root(62));
  REQUIRE_THROWS_AS(ecv_auc_k(row_pg, g), netboot::ConfigError);

  netboot::PairMask full(g.node_count());
  for (int i = 0; i < g.node_count(); ++i)
    for (int j = i + 1; j < g.node_count(); ++j) full.set(i, j);
  const auto full_pg = netboot::pair_sample_with_mask(g, std::move(full));
  REQUIRE_THROWS_AS(ecv_auc_k(full_pg, g), netboot::InvalidInput);

  const auto pg = netboot::pair_sample(g, {Scheme::pair, 0.8}, Stream::root(63));
  const Graph wrong_parent = netboot::generate_er(10, 0.5, Stream::root(64));
  REQUIRE_THROWS_AS(ecv_auc_k(pg, wrong_parent), netboot::InvalidInput);

  EcvOptions bad;
  bad.k_max = 0;
  REQUIRE_THROWS_AS(ecv_auc_k(pg, g, bad), netboot::InvalidRank);
}
