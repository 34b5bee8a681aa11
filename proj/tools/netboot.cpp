// Command-line front end: graph generation, bootstrap intervals, fraction
// selection, community counts, cohesion regression, stability selection, and
// the JSON-configured experiment runner.
//
// Exit codes: 0 success, 2 configuration or input errors, 3 degenerate
// results (always for failed fraction selection; for warnings only with
// --strict).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netboot/bootstrap.hpp"
#include "netboot/community.hpp"
#include "netboot/harness.hpp"
#include "netboot/io.hpp"
#include "netboot/regression_bootstrap.hpp"

namespace {

using netboot::Json;

struct DataMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> names;  // covariate column names
};

// Regression data files: header row, response in the first column.
DataMatrix load_data(const std::string& path) {
  const netboot::NumericCsv csv = netboot::read_numeric_csv(path);
  if (csv.header.size() < 2)
    throw netboot::ConfigError("data file needs a response column plus covariates");
  DataMatrix d;
  const auto n = static_cast<Eigen::Index>(csv.rows.size());
  const auto p = static_cast<Eigen::Index>(csv.header.size() - 1);
  d.x.resize(n, p);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.y[i] = csv.rows[static_cast<std::size_t>(i)][0];
    for (Eigen::Index j = 0; j < p; ++j)
      d.x(i, j) = csv.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
  }
  d.names.assign(csv.header.begin() + 1, csv.header.end());
  return d;
}

netboot::EmbeddingMode embedding_from_string(const std::string& s) {
  if (s == "zero_pad") return netboot::EmbeddingMode::zero_pad;
  if (s == "kept_only") return netboot::EmbeddingMode::kept_only;
  throw netboot::ConfigError("unknown embedding '" + s + "' (want zero_pad|kept_only)");
}

Json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw netboot::InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw netboot::ConfigError(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

struct CiOpts {
  std::string graph_path, stat = "triangle_density", scheme, data_path, triangle_mode =
      "mask_restricted", embedding = "zero_pad";
  bool one_based = false, strict = false;
  double q = 0.5, alpha = 0.1, lambda1 = 0.0;
  std::size_t num_replicates = 1000;
  std::uint64_t seed = 1;
  int k_max = 6;
};

std::unique_ptr<netboot::Statistic> build_statistic(const CiOpts& o) {
  if (o.stat == "cohesion_beta") {
    if (o.data_path.empty()) throw netboot::ConfigError("cohesion_beta needs --data");
    DataMatrix d = load_data(o.data_path);
    return std::make_unique<netboot::CohesionBetaStatistic>(
        std::move(d.x), std::move(d.y), o.lambda1, embedding_from_string(o.embedding));
  }
  netboot::StatisticOptions opt;
  opt.triangle_mode = [&] {
    if (o.triangle_mode == "mask_restricted") return netboot::PartialTriangleMode::mask_restricted;
    if (o.triangle_mode == "completed_by_zero")
      return netboot::PartialTriangleMode::completed_by_zero;
    throw netboot::ConfigError("unknown triangle mode '" + o.triangle_mode + "'");
  }();
  opt.bh.k_max = o.k_max;
  opt.ecv.k_max = o.k_max;
  return netboot::make_statistic(o.stat, opt);
}

int run_ci(const CiOpts& o) {
  const netboot::Graph g = netboot::read_edge_list(o.graph_path, o.one_based);
  const auto stat = build_statistic(o);
  const std::vector<int> ids = netboot::identity_ids(g.node_count());
  const netboot::GraphView view{g, ids};
  const netboot::Scheme scheme = netboot::scheme_from_string(o.scheme);

  const netboot::BootstrapRun run = netboot::bootstrap_ci(
      view, *stat, {scheme, o.q}, o.num_replicates, o.alpha, netboot::Stream::root(o.seed));

  std::printf("statistic=%s scheme=%s q=%s B=%zu alpha=%s\n", stat->name().c_str(),
              netboot::to_string(scheme).c_str(), netboot::format_number(o.q).c_str(),
              o.num_replicates, netboot::format_number(o.alpha).c_str());
  bool have_full = false;
  netboot::StatSample full;
  try {
    full = stat->on_graph(view);
    have_full = full.defined;
  } catch (const netboot::Error&) {
  }
  for (int d = 0; d < run.dim; ++d) {
    std::printf("[%d] ci=[%s, %s]", d, netboot::format_number(run.lower[d]).c_str(),
                netboot::format_number(run.upper[d]).c_str());
    if (have_full)
      std::printf(" full_sample=%s",
                  netboot::format_number(full.values[static_cast<std::size_t>(d)]).c_str());
    std::printf("\n");
  }
  std::printf("undefined_replicates=%zu/%zu\n", run.num_undefined, run.num_replicates);
  if (run.warning)
    std::fprintf(stderr, "warning: more than 10%% of replicates were degenerate\n");
  if (run.degenerate_run) std::fprintf(stderr, "warning: run is degenerate\n");
  if (o.strict && (run.warning || run.degenerate_run)) return 3;
  return 0;
}

int run_choose_q(const CiOpts& o, const std::vector<double>& candidates, std::size_t outer,
                 std::size_t inner) {
  const netboot::Graph g = netboot::read_edge_list(o.graph_path, o.one_based);
  const auto stat = build_statistic(o);
  const std::vector<int> ids = netboot::identity_ids(g.node_count());
  const netboot::Scheme scheme = netboot::scheme_from_string(o.scheme);
  const netboot::QSelection sel =
      netboot::choose_q(netboot::GraphView{g, ids}, *stat, scheme, candidates, outer, inner,
                        o.alpha, netboot::Stream::root(o.seed));
  std::printf("q,coverage,frac_degenerate\n");
  for (std::size_t j = 0; j < sel.candidates.size(); ++j)
    std::printf("%s,%s,%s\n", netboot::format_number(sel.candidates[j]).c_str(),
                netboot::format_number(sel.coverages[j]).c_str(),
                netboot::format_number(sel.degenerate_fractions[j]).c_str());
  std::printf("chosen_q=%s\n", netboot::format_number(sel.chosen_q).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"network bootstrap toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a random graph as an edge list");
  std::string gen_type = "er", gen_out;
  int gen_n = 100, gen_blocks = 0, gen_block_size = 0;
  std::vector<int> gen_block_sizes;
  double gen_rho = 0.1, gen_t = 1.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--type", gen_type, "er|sbm")->check(CLI::IsMember({"er", "sbm"}));
  gen->add_option("--n", gen_n, "node count (er)");
  gen->add_option("--rho", gen_rho, "expected edge density")->required();
  gen->add_option("--t", gen_t, "within/between ratio (sbm)");
  gen->add_option("--blocks", gen_blocks, "number of equal blocks (sbm)");
  gen->add_option("--block-size", gen_block_size, "nodes per block (sbm)");
  gen->add_option("--block-sizes", gen_block_sizes, "explicit block sizes (sbm)")
      ->delimiter(',');
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output edge-list path")->required();

  // shared options for ci / choose-q
  CiOpts ci_opts;
  auto* ci = app.add_subcommand("ci", "bootstrap confidence interval for a statistic");
  auto add_stat_opts = [](CLI::App* cmd, CiOpts& o) {
    cmd->add_option("--graph", o.graph_path, "edge-list path")->required();
    cmd->add_flag("--one-based", o.one_based, "edge list uses 1-based ids");
    cmd->add_option("--stat", o.stat,
                    "edge_density|triangle_density|num_communities_bh|num_communities_ecv|"
                    "cohesion_beta");
    cmd->add_option("--scheme", o.scheme, "node|row|pair")->required();
    cmd->add_option("--alpha", o.alpha, "miscoverage level");
    cmd->add_option("--seed", o.seed, "rng seed");
    cmd->add_option("--k-max", o.k_max, "community count cap");
    cmd->add_option("--triangle-mode", o.triangle_mode, "mask_restricted|completed_by_zero");
    cmd->add_option("--data", o.data_path, "regression data csv (response first)");
    cmd->add_option("--lambda1", o.lambda1, "cohesion penalty");
    cmd->add_option("--embedding", o.embedding, "zero_pad|kept_only");
  };
  add_stat_opts(ci, ci_opts);
  ci->add_option("--q", ci_opts.q, "sampling fraction")->required();
  ci->add_option("--B", ci_opts.num_replicates, "bootstrap replicates");
  ci->add_flag("--strict", ci_opts.strict, "exit 3 on degenerate results");

  CiOpts cq_opts;
  std::vector<double> cq_candidates;
  std::size_t cq_outer = 50, cq_inner = 50;
  auto* cq = app.add_subcommand("choose-q", "pick the sampling fraction by double bootstrap");
  add_stat_opts(cq, cq_opts);
  cq->add_option("--candidates", cq_candidates, "candidate fractions")
      ->required()
      ->delimiter(',');
  cq->add_option("--outer", cq_outer, "outer rounds");
  cq->add_option("--inner", cq_inner, "inner replicates");

  // community
  auto* com = app.add_subcommand("community", "estimate the number of communities");
  std::string com_graph, com_method = "bh";
  bool com_one_based = false;
  int com_k_max = 6, com_repeats = 5;
  double com_q = 0.9;
  std::uint64_t com_seed = 1;
  com->add_option("--graph", com_graph, "edge-list path")->required();
  com->add_flag("--one-based", com_one_based, "edge list uses 1-based ids");
  com->add_option("--method", com_method, "bh|ecv")->check(CLI::IsMember({"bh", "ecv"}));
  com->add_option("--k-max", com_k_max, "largest count considered");
  com->add_option("--q", com_q, "pair fraction per split (ecv)");
  com->add_option("--repeats", com_repeats, "number of splits (ecv)");
  com->add_option("--seed", com_seed, "rng seed (ecv)");

  // regress
  auto* reg = app.add_subcommand("regress", "fit the cohesion regression");
  std::string reg_graph, reg_data, reg_out;
  bool reg_one_based = false;
  double reg_lambda1 = 0.0, reg_lambda2 = -1.0;
  reg->add_option("--graph", reg_graph, "edge-list path")->required();
  reg->add_flag("--one-based", reg_one_based, "edge list uses 1-based ids");
  reg->add_option("--data", reg_data, "data csv (response first)")->required();
  reg->add_option("--lambda1", reg_lambda1, "cohesion penalty")->required();
  reg->add_option("--lambda2", reg_lambda2, "lasso penalty (omit for none)");
  reg->add_option("--out", reg_out, "write coefficients csv here");

  // stabsel
  auto* st = app.add_subcommand("stabsel", "stability selection over node subsamples");
  std::string st_graph, st_data, st_out;
  bool st_one_based = false;
  double st_lambda1 = 0.0, st_lambda2 = -1.0, st_q = 0.5;
  std::size_t st_subsamples = 50;
  std::uint64_t st_seed = 1;
  st->add_option("--graph", st_graph, "edge-list path")->required();
  st->add_flag("--one-based", st_one_based, "edge list uses 1-based ids");
  st->add_option("--data", st_data, "data csv (response first)")->required();
  st->add_option("--lambda1", st_lambda1, "cohesion penalty")->required();
  st->add_option("--lambda2", st_lambda2, "fixed lasso penalty (omit for a path)");
  st->add_option("--q", st_q, "node fraction per subsample");
  st->add_option("--subsamples", st_subsamples, "number of subsamples");
  st->add_option("--seed", st_seed, "rng seed");
  st->add_option("--out", st_out, "write frequencies csv here");

  // experiment / realdata
  auto* ex = app.add_subcommand("experiment", "run a JSON-configured experiment");
  std::string ex_config, ex_out_dir;
  bool ex_strict = false;
  ex->add_option("--config", ex_config, "config json path")->required();
  ex->add_option("--out-dir", ex_out_dir, "output directory")->required();
  ex->add_flag("--strict", ex_strict, "exit 3 when any run is degenerate");

  auto* rd = app.add_subcommand("realdata", "per-network fraction selection and intervals");
  std::string rd_config, rd_out_dir;
  bool rd_strict = false;
  rd->add_option("--config", rd_config, "config json path")->required();
  rd->add_option("--out-dir", rd_out_dir, "output directory")->required();
  rd->add_flag("--strict", rd_strict, "exit 3 when any run is degenerate");

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      Json cfg;
      cfg["type"] = gen_type;
      cfg["rho"] = gen_rho;
      if (gen_type == "er") cfg["n"] = gen_n;
      else {
        cfg["t"] = gen_t;
        if (!gen_block_sizes.empty()) cfg["block_sizes"] = gen_block_sizes;
        else {
          if (gen_blocks <= 0 || gen_block_size <= 0)
            throw netboot::ConfigError("sbm needs --block-sizes or --blocks with --block-size");
          cfg["blocks"] = gen_blocks;
          cfg["block_size"] = gen_block_size;
        }
      }
      const netboot::Graph g = netboot::graph_from_config(cfg, netboot::Stream::root(gen_seed));
      netboot::write_edge_list(g, gen_out);
      std::printf("n=%d edges=%lld density=%s\n", g.node_count(),
                  static_cast<long long>(g.edge_count()),
                  g.node_count() >= 2 ? netboot::format_number(netboot::edge_density(g)).c_str()
                                      : "0");
      return 0;
    }
    if (ci->parsed()) return run_ci(ci_opts);
    if (cq->parsed()) return run_choose_q(cq_opts, cq_candidates, cq_outer, cq_inner);

    if (com->parsed()) {
      const netboot::Graph g = netboot::read_edge_list(com_graph, com_one_based);
      netboot::KEstimate est;
      if (com_method == "bh") {
        netboot::BetheHessianOptions opt;
        opt.k_max = com_k_max;
        est = netboot::bethe_hessian_k(g, opt);
      } else {
        netboot::EcvOptions opt;
        opt.k_max = com_k_max;
        est = netboot::ecv_repeated_k(g, com_q, com_repeats, opt, netboot::Stream::root(com_seed));
      }
      std::printf("k_hat=%d method=%s\n", est.k_hat, est.method.c_str());
      std::printf("diagnostics=");
      for (std::size_t i = 0; i < est.diagnostics.size(); ++i)
        std::printf("%s%s", i ? "," : "", netboot::format_number(est.diagnostics[i]).c_str());
      std::printf("\n");
      return 0;
    }

    if (reg->parsed()) {
      const netboot::Graph g = netboot::read_edge_list(reg_graph, reg_one_based);
      DataMatrix d = load_data(reg_data);
      const netboot::CohesionFit fit =
          reg_lambda2 >= 0.0
              ? netboot::fit_cohesion_lasso(d.x, d.y, g, reg_lambda1, reg_lambda2)
              : netboot::fit_cohesion(d.x, d.y, g, reg_lambda1);
      std::printf("objective=%s converged=%d active=%zu\n",
                  netboot::format_number(fit.objective).c_str(), fit.converged ? 1 : 0,
                  fit.active_set.size());
      std::vector<std::vector<std::string>> rows;
      for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
        std::printf("%s=%s\n", d.names[static_cast<std::size_t>(j)].c_str(),
                    netboot::format_number(fit.beta[j]).c_str());
        rows.push_back({d.names[static_cast<std::size_t>(j)],
                        netboot::format_number(fit.beta[j])});
      }
      if (!reg_out.empty()) netboot::write_csv(reg_out, {"predictor", "beta"}, rows);
      return 0;
    }

    if (st->parsed()) {
      const netboot::Graph g = netboot::read_edge_list(st_graph, st_one_based);
      DataMatrix d = load_data(st_data);
      std::optional<double> lambda2;
      if (st_lambda2 >= 0.0) lambda2 = st_lambda2;
      const netboot::StabilitySelection sel = netboot::stability_selection(
          g, d.x, d.y, st_lambda1, st_q, st_subsamples, lambda2, netboot::Stream::root(st_seed));
      std::vector<std::vector<std::string>> rows;
      for (std::size_t j = 0; j < sel.frequency.size(); ++j) {
        std::printf("%s=%s\n", d.names[j].c_str(), netboot::format_number(sel.frequency[j]).c_str());
        rows.push_back({d.names[j], netboot::format_number(sel.frequency[j])});
      }
      if (!st_out.empty()) netboot::write_csv(st_out, {"predictor", "frequency"}, rows);
      return 0;
    }

    if (ex->parsed() || rd->parsed()) {
      const std::string path = ex->parsed() ? ex_config : rd_config;
      const std::string out_dir = ex->parsed() ? ex_out_dir : rd_out_dir;
      const bool strict = ex->parsed() ? ex_strict : rd_strict;
      Json cfg = read_config(path);
      if (rd->parsed()) {
        if (cfg.contains("task") && cfg.at("task") != "realdata")
          throw netboot::ConfigError("realdata subcommand needs a realdata task config");
        cfg["task"] = "realdata";
      }
      const netboot::ExperimentResult res = netboot::run_experiment(cfg, out_dir);
      for (const std::string& f : res.outputs) std::printf("wrote %s/%s\n", out_dir.c_str(), f.c_str());
      if (res.any_warning) {
        std::fprintf(stderr, "warning: some runs were degenerate\n");
        if (strict) return 3;
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const netboot::SelectionFailed& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const netboot::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
