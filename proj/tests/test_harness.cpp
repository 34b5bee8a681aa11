#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netboot/generators.hpp"
#include "netboot/graph.hpp"
#include "netboot/harness.hpp"
#include "netboot/io.hpp"
#include "netboot/rng.hpp"

using netboot::Json;
using netboot::ols_fit;
using netboot::run_experiment;
using netboot::Stream;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_same_csvs(const fs::path& a, const fs::path& b,
                       const std::vector<std::string>& outputs) {
  for (const auto& f : outputs) {
    if (f == "manifest.json") continue;  // carries wall time
    INFO("comparing " << f);
    REQUIRE(slurp(a / f) == slurp(b / f));
  }
}

}  // namespace

TEST_CASE("least squares matches hand-worked numbers", "[harness]") {
  const auto fit = ols_fit({1, 2, 3}, {2, 4, 6});
  REQUIRE(fit.slope == Catch::Approx(2.0));
  REQUIRE(fit.intercept == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(fit.r2 == Catch::Approx(1.0));
  for (double r : fit.residuals) REQUIRE(std::abs(r) < 1e-12);

  // residuals of any fit are orthogonal to the predictor and sum to zero
  const std::vector<double> x{0.5, 1.5, 2.0, 4.0, 5.5};
  const std::vector<double> y{1.0, 0.2, 3.4, 2.2, 5.1};
  const auto f2 = ols_fit(x, y);
  double sum = 0, dot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += f2.residuals[i];
    dot += f2.residuals[i] * x[i];
  }
  REQUIRE(std::abs(sum) < 1e-9);
  REQUIRE(std::abs(dot) < 1e-9);
  REQUIRE(f2.r2 <= 1.0);

  REQUIRE_THROWS_AS(ols_fit({1, 1, 1}, {2, 3, 4}), netboot::DegenerateDesign);
  REQUIRE_THROWS_AS(ols_fit({1}, {2}), netboot::DegenerateDesign);
  REQUIRE_THROWS_AS(ols_fit({1, 2}, {2}), netboot::InvalidInput);
}

TEST_CASE("csv writer and reader round trip", "[harness]") {
  REQUIRE(netboot::format_number(0.5) == "0.5");
  REQUIRE(netboot::format_number(-3.0) == "-3");
  REQUIRE(netboot::csv_escape("plain") == "plain");
  REQUIRE(netboot::csv_escape("a,b") == "\"a,b\"");
  REQUIRE(netboot::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");

  const fs::path dir = fresh_dir("netboot_io_test");
  const std::string path = (dir / "numbers.csv").string();
  netboot::write_csv(path, {"a", "b"},
                     {{netboot::format_number(1.25), netboot::format_number(-0.125)},
                      {netboot::format_number(1e-9), netboot::format_number(3)}});
  const auto back = netboot::read_numeric_csv(path);
  REQUIRE(back.header == std::vector<std::string>{"a", "b"});
  REQUIRE(back.rows.size() == 2);
  REQUIRE(back.rows[0][0] == 1.25);
  REQUIRE(back.rows[0][1] == -0.125);
  REQUIRE(back.rows[1][0] == 1e-9);
  REQUIRE(back.rows[1][1] == 3.0);

  REQUIRE_THROWS_AS(netboot::write_csv(path, {"a", "b"}, {{"only-one"}}), netboot::InvalidInput);

  {
    std::ofstream bad(dir / "bad.csv");
    bad << "a,b\n1,2\n1,oops\n";
  }
  try {
    netboot::read_numeric_csv((dir / "bad.csv").string());
    FAIL("expected a parse error");
  } catch (const netboot::ParseError& e) {
    REQUIRE(e.line == 3);
  }

  {
    std::ofstream bad(dir / "ragged.csv");
    bad << "a,b\n1,2,3\n";
  }
  REQUIRE_THROWS_AS(netboot::read_numeric_csv((dir / "ragged.csv").string()), netboot::ParseError);

  {
    std::ofstream empty(dir / "empty.csv");
  }
  REQUIRE_THROWS_AS(netboot::read_numeric_csv((dir / "empty.csv").string()), netboot::ParseError);
}

TEST_CASE("coverage task writes one deterministic table per scheme", "[harness]") {
  Json cfg;
  cfg["task"] = "triangle";
  cfg["seed"] = 5;
  cfg["graph"] = {{"type", "er"}, {"n", 40}, {"rho", 0.3}};
  cfg["q_grid"] = {0.5, 0.8};
  cfg["num_replicates"] = 20;
  cfg["reps"] = 2;
  cfg["schemes"] = {"node", "row", "pair"};

  const fs::path a = fresh_dir("netboot_tri_a");
  const auto res = run_experiment(cfg, a.string(), 1);
  REQUIRE(res.outputs == std::vector<std::string>{"triangle_node.csv", "triangle_row.csv",
                                                  "triangle_pair.csv", "manifest.json"});
  for (const char* f : {"triangle_node.csv", "triangle_row.csv", "triangle_pair.csv"}) {
    const auto table = netboot::read_numeric_csv((a / f).string());
    REQUIRE(table.header ==
            std::vector<std::string>{"q", "mean_width", "coverage", "frac_degenerate"});
    REQUIRE(table.rows.size() == 2);
    REQUIRE(table.rows[0][0] == 0.5);
    REQUIRE(table.rows[1][0] == 0.8);
    for (const auto& row : table.rows) {
      REQUIRE(row[1] >= 0.0);
      REQUIRE(row[2] >= 0.0);
      REQUIRE(row[2] <= 1.0);
      REQUIRE(row[3] >= 0.0);
      REQUIRE(row[3] <= 1.0);
    }
  }

  const Json manifest = Json::parse(slurp(a / "manifest.json"));
  REQUIRE(manifest.at("task") == "triangle");
  REQUIRE(manifest.at("seed") == 5);
  REQUIRE(manifest.at("config").at("graph").at("n") == 40);
  REQUIRE(manifest.contains("wall_ms"));

  // same seed, fresh directory, more threads: identical CSV bytes
  const fs::path b = fresh_dir("netboot_tri_b");
  const auto res4 = run_experiment(cfg, b.string(), 4);
  REQUIRE(res4.outputs == res.outputs);
  require_same_csvs(a, b, res.outputs);

  // an edge-density run names its files after the statistic
  cfg["statistic"] = "edge_density";
  cfg["schemes"] = {"node"};
  const fs::path c = fresh_dir("netboot_tri_c");
  const auto res_ed = run_experiment(cfg, c.string(), 1);
  REQUIRE(res_ed.outputs.front() == "edge_density_node.csv");
}

TEST_CASE("community task summarizes recovery per fraction", "[harness]") {
  Json cfg;
  cfg["task"] = "communities";
  cfg["seed"] = 7;
  cfg["method"] = "bh";
  cfg["graph"] = {{"type", "sbm"}, {"blocks", 2}, {"block_size", 15}, {"rho", 0.25}, {"t", 6.0}};
  cfg["q_grid"] = {0.7};
  cfg["num_replicates"] = 10;
  cfg["reps"] = 2;

  const fs::path a = fresh_dir("netboot_comm_a");
  const auto res = run_experiment(cfg, a.string(), 1);
  REQUIRE(res.outputs ==
          std::vector<std::string>{"communities_bh_pair.csv", "manifest.json"});
  const auto table = netboot::read_numeric_csv((a / "communities_bh_pair.csv").string());
  REQUIRE(table.header == std::vector<std::string>{"q", "mean_k_hat", "match_rate", "coverage",
                                                   "frac_degenerate"});
  REQUIRE(table.rows.size() == 1);
  REQUIRE(table.rows[0][0] == 0.7);
  REQUIRE(table.rows[0][1] >= 1.0);
  REQUIRE(table.rows[0][2] >= 0.0);
  REQUIRE(table.rows[0][2] <= 1.0);

  const Json manifest = Json::parse(slurp(a / "manifest.json"));
  REQUIRE(manifest.at("true_k") == 2.0);

  const fs::path b = fresh_dir("netboot_comm_b");
  run_experiment(cfg, b.string(), 4);
  require_same_csvs(a, b, res.outputs);

  Json bad = cfg;
  bad["method"] = "ecv";
  bad["scheme"] = "node";
  REQUIRE_THROWS_AS(run_experiment(bad, fresh_dir("netboot_comm_bad").string(), 1),
                    netboot::ConfigError);
}

TEST_CASE("regression task emits one row per kind and fraction", "[harness]") {
  Json cfg;
  cfg["task"] = "regression";
  cfg["seed"] = 11;
  cfg["design"] = {{"blocks", 2}, {"block_size", 15}, {"rho", 0.3}, {"t", 8.0}, {"p", 2}};
  cfg["lambda1"] = 1.0;
  cfg["q_grid"] = {0.5};
  cfg["num_replicates"] = 10;
  cfg["reps"] = 1;
  cfg["kinds"] = {"node", "naive"};

  const fs::path a = fresh_dir("netboot_reg_a");
  const auto res = run_experiment(cfg, a.string(), 1);
  REQUIRE(res.outputs == std::vector<std::string>{"regression.csv", "manifest.json"});

  std::ifstream in(a / "regression.csv");
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "kind,q,coverage,mean_width,max_width,min_width,mse");
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].rfind("node,0.5,", 0) == 0);
  REQUIRE(rows[1].rfind("naive,1,", 0) == 0);

  const fs::path b = fresh_dir("netboot_reg_b");
  run_experiment(cfg, b.string(), 4);
  require_same_csvs(a, b, res.outputs);
}

TEST_CASE("stability task reports frequencies and ranking quality", "[harness]") {
  Json cfg;
  cfg["task"] = "stabsel";
  cfg["seed"] = 13;
  cfg["design"] = {{"blocks", 2}, {"block_size", 10}, {"rho", 0.3},
                   {"t", 6.0},    {"p", 3},           {"support_size", 2}};
  cfg["lambda1"] = 1.0;
  cfg["q"] = 0.7;
  cfg["num_subsamples"] = 5;

  const fs::path a = fresh_dir("netboot_stab_a");
  const auto res = run_experiment(cfg, a.string(), 1);
  REQUIRE(res.outputs == std::vector<std::string>{"stabsel.csv", "manifest.json"});
  const auto table = netboot::read_numeric_csv((a / "stabsel.csv").string());
  REQUIRE(table.header == std::vector<std::string>{"predictor", "frequency", "true_support"});
  REQUIRE(table.rows.size() == 3);
  int in_support = 0;
  for (const auto& row : table.rows) {
    REQUIRE(row[1] >= 0.0);
    REQUIRE(row[1] <= 1.0);
    in_support += row[2] == 1.0;
  }
  REQUIRE(in_support == 2);

  const Json manifest = Json::parse(slurp(a / "manifest.json"));
  REQUIRE(manifest.contains("stabsel_auc"));
  REQUIRE(manifest.at("lambda2_path").size() == 20);

  Json single = cfg;
  single["lambda2"] = 2.0;
  const fs::path b = fresh_dir("netboot_stab_b");
  run_experiment(single, b.string(), 1);
  const Json m2 = Json::parse(slurp(b / "manifest.json"));
  REQUIRE(m2.at("lambda2_path").size() == 1);
  REQUIRE(m2.at("lambda2_path")[0] == 2.0);
}

TEST_CASE("real-data task selects a fraction per network", "[harness]") {
  const fs::path dir = fresh_dir("netboot_real");
  const auto g1 = netboot::generate_er(60, 0.2, Stream::root(17));
  const auto g2 = netboot::generate_er(80, 0.12, Stream::root(18));
  netboot::write_edge_list(g1, (dir / "one.edges").string());
  netboot::write_edge_list(g2, (dir / "two.edges").string());

  Json cfg;
  cfg["task"] = "realdata";
  cfg["seed"] = 19;
  cfg["statistic"] = "edge_density";
  cfg["networks"] = Json::array();
  cfg["networks"].push_back({{"name", "one"}, {"path", (dir / "one.edges").string()}});
  cfg["networks"].push_back({{"name", "two"}, {"path", (dir / "two.edges").string()}});
  cfg["candidates"] = {0.5, 0.8};
  cfg["outer_rounds"] = 4;
  cfg["inner_replicates"] = 20;
  cfg["num_replicates"] = 20;
  cfg["schemes"] = {"node"};

  const fs::path out = fresh_dir("netboot_real_out");
  const auto res = run_experiment(cfg, out.string(), 1);
  REQUIRE(res.outputs == std::vector<std::string>{"realdata.csv", "realdata_ols.csv",
                                                  "manifest.json"});

  std::ifstream in(out / "realdata.csv");
  std::string line;
  std::getline(in, line);
  REQUIRE(line ==
          "name,num_nodes,edge_density,scheme,chosen_q,estimate,ci_lower,ci_upper,"
          "frac_degenerate");
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].rfind("one,60,", 0) == 0);
  REQUIRE(rows[1].rfind("two,80,", 0) == 0);

  // the first two columns are labels, so read this one as text
  std::ifstream ols(out / "realdata_ols.csv");
  std::string ols_header;
  std::getline(ols, ols_header);
  REQUIRE(ols_header == "scheme,predictor,slope,intercept,r2");
  int ols_rows = 0;
  while (std::getline(ols, line))
    if (!line.empty()) {
      REQUIRE(line.rfind("node,", 0) == 0);
      std::istringstream cells(line.substr(line.find(',', 5) + 1));
      std::string cell;
      while (std::getline(cells, cell, ',')) REQUIRE_NOTHROW(std::stod(cell));
      ++ols_rows;
    }
  REQUIRE(ols_rows == 2);

  const Json manifest = Json::parse(slurp(out / "manifest.json"));
  const auto& chosen = manifest.at("chosen_q");
  const double q_one = chosen.at("one").at("node").get<double>();
  REQUIRE((q_one == 0.5 || q_one == 0.8));
  REQUIRE(chosen.contains("two"));
}

TEST_CASE("config errors are reported before any work runs", "[harness]") {
  const fs::path dir = fresh_dir("netboot_cfg_err");
  Json cfg;
  cfg["task"] = "does_not_exist";
  REQUIRE_THROWS_AS(run_experiment(cfg, dir.string(), 1), netboot::ConfigError);

  Json tri;
  tri["task"] = "triangle";
  REQUIRE_THROWS_AS(run_experiment(tri, dir.string(), 1), netboot::ConfigError);

  tri["graph"] = {{"type", "lattice"}};
  tri["q_grid"] = {0.5};
  tri["num_replicates"] = 5;
  tri["reps"] = 1;
  tri["schemes"] = {"node"};
  REQUIRE_THROWS_AS(run_experiment(tri, dir.string(), 1), netboot::ConfigError);

  Json fraction = tri;
  fraction["graph"] = {{"type", "er"}, {"n", 20}, {"rho", 0.5}};
  fraction["q_grid"] = {1.7};
  REQUIRE_THROWS_AS(run_experiment(fraction, dir.string(), 1), netboot::InvalidFraction);
}

TEST_CASE("command line drives the library end to end", "[harness]") {
  const char* cli = std::getenv("NETBOOT_CLI");
  REQUIRE(cli != nullptr);
  const fs::path dir = fresh_dir("netboot_cli_smoke");
  const std::string graph_path = (dir / "er.edges").string();

  const std::string gen = std::string(cli) + " generate --type er --n 50 --rho 0.3 --seed 4 --out " +
                          graph_path + " > " + (dir / "gen.txt").string();
  REQUIRE(std::system(gen.c_str()) == 0);
  REQUIRE(netboot::read_edge_list(graph_path).node_count() == 50);

  const std::string ci = std::string(cli) + " ci --graph " + graph_path +
                         " --stat edge_density --scheme pair --q 0.5 --B 50 --seed 3 > " +
                         (dir / "ci.txt").string();
  REQUIRE(std::system(ci.c_str()) == 0);
  const std::string ci_out = slurp(dir / "ci.txt");
  REQUIRE(ci_out.find("ci=[") != std::string::npos);

  Json cfg;
  cfg["task"] = "triangle";
  cfg["seed"] = 23;
  cfg["graph"] = {{"type", "er"}, {"n", 30}, {"rho", 0.3}};
  cfg["q_grid"] = {0.6};
  cfg["num_replicates"] = 10;
  cfg["reps"] = 1;
  cfg["schemes"] = {"node"};
  {
    std::ofstream out(dir / "cfg.json");
    out << cfg.dump(2) << "\n";
  }
  const std::string exp = std::string(cli) + " experiment --config " + (dir / "cfg.json").string() +
                          " --out-dir " + (dir / "exp").string() + " > " +
                          (dir / "exp.txt").string();
  REQUIRE(std::system(exp.c_str()) == 0);
  REQUIRE(fs::exists(dir / "exp" / "triangle_node.csv"));
  REQUIRE(fs::exists(dir / "exp" / "manifest.json"));

  const std::string bad = std::string(cli) + " ci --graph " + (dir / "missing.edges").string() +
                          " --stat edge_density --scheme pair --q 0.5 --B 10 2> " +
                          (dir / "err.txt").string();
  REQUIRE(std::system(bad.c_str()) != 0);
}
