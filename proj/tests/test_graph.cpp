#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "netboot/errors.hpp"
#include "netboot/graph.hpp"
#include "oracles.hpp"

using netboot::Edge;
using netboot::Graph;

namespace {
std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("from_edges canonicalizes, sorts and deduplicates", "[graph]") {
  const Graph g = Graph::from_edges(4, {{2, 0}, {0, 2}, {3, 1}, {0, 1}, {1, 0}});
  REQUIRE(g.node_count() == 4);
  REQUIRE(g.edge_count() == 3);
  const std::vector<Edge> want{{0, 1}, {0, 2}, {1, 3}};
  REQUIRE(g.edges() == want);
  REQUIRE(g.has_edge(2, 0));
  REQUIRE(!g.has_edge(2, 3));
  REQUIRE(!g.has_edge(1, 1));
}

TEST_CASE("from_edges rejects bad input", "[graph]") {
  REQUIRE_THROWS_AS(Graph::from_edges(3, {{0, 3}}), netboot::InvalidNode);
  REQUIRE_THROWS_AS(Graph::from_edges(3, {{-1, 0}}), netboot::InvalidNode);
  REQUIRE_THROWS_AS(Graph::from_edges(3, {{1, 1}}), netboot::SelfLoopRejected);
  REQUIRE_THROWS_AS(Graph::from_edges(-1, {}), netboot::InvalidInput);
}

TEST_CASE("neighbor lists are sorted and degrees match", "[graph]") {
  const auto s = netboot::Stream::root(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(25, 0.3, s.child(trial));
    for (int v = 0; v < g.node_count(); ++v) {
      const auto nb = g.neighbors(v);
      REQUIRE(g.degree(v) == static_cast<int>(nb.size()));
      for (std::size_t i = 0; i + 1 < nb.size(); ++i) REQUIRE(nb[i] < nb[i + 1]);
      for (int u : nb) REQUIRE(g.has_edge(u, v));
    }
    std::int64_t degree_sum = 0;
    for (int v = 0; v < g.node_count(); ++v) degree_sum += g.degree(v);
    REQUIRE(degree_sum == 2 * g.edge_count());
  }
}

TEST_CASE("induced subgraph relabels densely", "[graph]") {
  const Graph g = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {1, 4}});
  const std::vector<int> kept{1, 2, 4};
  const Graph h = netboot::induced_subgraph(g, kept);
  REQUIRE(h.node_count() == 3);
  // surviving edges: (1,2) -> (0,1), (1,4) -> (0,2)
  const std::vector<Edge> want{{0, 1}, {0, 2}};
  REQUIRE(h.edges() == want);

  // membership oracle on random graphs
  const auto s = netboot::Stream::root(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph r = oracle::random_graph(18, 0.4, s.child(trial));
    const std::vector<int> keep{0, 3, 4, 7, 11, 12, 17};
    const Graph sub = netboot::induced_subgraph(r, keep);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = a + 1; b < keep.size(); ++b)
        REQUIRE(sub.has_edge(static_cast<int>(a), static_cast<int>(b)) ==
                r.has_edge(keep[a], keep[b]));
  }
}

TEST_CASE("laplacian matches the path-graph matrix", "[graph]") {
  // P4: L = [[1,-1,0,0],[-1,2,-1,0],[0,-1,2,-1],[0,0,-1,1]]
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto l = netboot::laplacian(g);
  const std::vector<std::vector<double>> want{
      {1, -1, 0, 0}, {-1, 2, -1, 0}, {0, -1, 2, -1}, {0, 0, -1, 1}};
  for (int col = 0; col < 4; ++col) {
    std::vector<double> e(4, 0.0), y(4, 0.0);
    e[col] = 1.0;
    l.apply(e, y);
    for (int row = 0; row < 4; ++row) REQUIRE(y[row] == want[row][col]);
  }
  const std::vector<double> x{1.0, 2.0, 4.0, 7.0};
  // quad form: (1-2)^2 + (2-4)^2 + (4-7)^2 = 1 + 4 + 9
  REQUIRE(l.quad_form(x) == 14.0);
}

TEST_CASE("edge list round trip with header", "[graph]") {
  const auto s = netboot::Stream::root(31);
  const Graph g = oracle::random_graph(20, 0.25, s);
  const std::string path = temp_file("netboot_roundtrip.edges");
  netboot::write_edge_list(g, path);
  const Graph back = netboot::read_edge_list(path);
  REQUIRE(back == g);
  std::remove(path.c_str());
}

TEST_CASE("edge list reader handles headers, blanks and 1-based ids", "[graph]") {
  const std::string path = temp_file("netboot_reader.edges");
  {
    std::ofstream out(path);
    out << "n 5\n\n0 1\n\n2 3\n";
  }
  const Graph g = netboot::read_edge_list(path);
  REQUIRE(g.node_count() == 5);
  REQUIRE(g.edge_count() == 2);

  {
    std::ofstream out(path);
    out << "1 2\n4 5\n";
  }
  const Graph one_based = netboot::read_edge_list(path, true);
  REQUIRE(one_based.node_count() == 5);
  REQUIRE(one_based.has_edge(0, 1));
  REQUIRE(one_based.has_edge(3, 4));

  // without a header the node count is the largest id plus one
  const Graph zero_based = netboot::read_edge_list(path, false);
  REQUIRE(zero_based.node_count() == 6);
  std::remove(path.c_str());
}

TEST_CASE("edge list parse errors carry line numbers", "[graph]") {
  const std::string path = temp_file("netboot_bad.edges");
  {
    std::ofstream out(path);
    out << "0 1\n2 x\n";
  }
  try {
    netboot::read_edge_list(path);
    FAIL("expected a parse error");
  } catch (const netboot::ParseError& e) {
    REQUIRE(e.line == 2);
  }
  {
    std::ofstream out(path);
    out << "0 1 7\n";
  }
  REQUIRE_THROWS_AS(netboot::read_edge_list(path), netboot::ParseError);
  {
    std::ofstream out(path);
    out << "0 1\nn 4\n";  // header after data is just a bad edge line
  }
  REQUIRE_THROWS_AS(netboot::read_edge_list(path), netboot::ParseError);
  std::remove(path.c_str());
}
