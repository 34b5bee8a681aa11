#pragma once

// JSON-configured experiment runner. Each task writes CSV files plus a
// manifest.json into an output directory. CSV bytes depend only on the config
// and seed, never on the thread count; the manifest additionally records wall
// time, so byte comparisons should skip it.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netboot/bootstrap.hpp"
#include "netboot/community.hpp"
#include "netboot/errors.hpp"
#include "netboot/generators.hpp"
#include "netboot/graph.hpp"
#include "netboot/io.hpp"
#include "netboot/parallel.hpp"
#include "netboot/regression.hpp"
#include "netboot/regression_bootstrap.hpp"
#include "netboot/rng.hpp"
#include "netboot/sampling.hpp"
#include "netboot/statistic.hpp"
#include "netboot/stats.hpp"

namespace netboot {

using Json = nlohmann::json;

// ---- ordinary least squares (used by the real-data summaries) -------------

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals;
};

inline OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("ols: size mismatch");
  const std::size_t m = x.size();
  if (m < 2) throw DegenerateDesign("ols needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DegenerateDesign("ols: constant predictor");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.resize(m);
  double ssres = 0;
  for (std::size_t i = 0; i < m; ++i) {
    fit.residuals[i] = y[i] - fit.intercept - fit.slope * x[i];
    ssres += fit.residuals[i] * fit.residuals[i];
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssres / syy : (ssres == 0.0 ? 1.0 : 0.0);
  return fit;
}

// ---- config helpers --------------------------------------------------------

namespace harness_detail {

inline const Json& require_key(const Json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("expected an object carrying '" + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing config key '" + key + "'");
  return *it;
}

inline double num(const Json& j, const std::string& key) {
  const Json& v = require_key(j, key);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

inline double num_or(const Json& j, const std::string& key, double def) {
  if (!j.is_object() || !j.contains(key)) return def;
  return num(j, key);
}

inline std::int64_t integer(const Json& j, const std::string& key) {
  const Json& v = require_key(j, key);
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t int_or(const Json& j, const std::string& key, std::int64_t def) {
  if (!j.is_object() || !j.contains(key)) return def;
  return integer(j, key);
}

inline std::string str(const Json& j, const std::string& key) {
  const Json& v = require_key(j, key);
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::string str_or(const Json& j, const std::string& key, const std::string& def) {
  if (!j.is_object() || !j.contains(key)) return def;
  return str(j, key);
}

inline bool bool_or(const Json& j, const std::string& key, bool def) {
  if (!j.is_object() || !j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::vector<double> num_array(const Json& j, const std::string& key) {
  const Json& v = require_key(j, key);
  if (!v.is_array() || v.empty()) throw ConfigError("'" + key + "' must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    if (!e.is_number()) throw ConfigError("'" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<std::string> str_array(const Json& j, const std::string& key) {
  const Json& v = require_key(j, key);
  if (!v.is_array() || v.empty()) throw ConfigError("'" + key + "' must be a non-empty array");
  std::vector<std::string> out;
  for (const Json& e : v) {
    if (!e.is_string()) throw ConfigError("'" + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline PartialTriangleMode triangle_mode_from_string(const std::string& s) {
  if (s == "mask_restricted") return PartialTriangleMode::mask_restricted;
  if (s == "completed_by_zero") return PartialTriangleMode::completed_by_zero;
  throw ConfigError("unknown triangle mode '" + s + "'");
}

inline std::uint64_t scheme_ordinal(Scheme s) { return static_cast<std::uint64_t>(s); }

}  // namespace harness_detail

inline Graph graph_from_config(const Json& cfg, const Stream& s) {
  namespace hd = harness_detail;
  const std::string type = hd::str(cfg, "type");
  if (type == "er")
    return generate_er(static_cast<int>(hd::integer(cfg, "n")), hd::num(cfg, "rho"), s);
  if (type == "sbm") {
    SbmParams p;
    if (cfg.contains("block_sizes")) {
      for (const Json& e : hd::require_key(cfg, "block_sizes")) {
        if (!e.is_number_integer()) throw ConfigError("'block_sizes' must hold integers");
        p.block_sizes.push_back(e.get<int>());
      }
      if (p.block_sizes.empty()) throw ConfigError("'block_sizes' must be non-empty");
    } else {
      p.block_sizes.assign(static_cast<std::size_t>(hd::integer(cfg, "blocks")),
                           static_cast<int>(hd::integer(cfg, "block_size")));
    }
    p.rho = hd::num(cfg, "rho");
    p.t = hd::num_or(cfg, "t", 1.0);
    return generate_sbm(p, s);
  }
  throw ConfigError("unknown graph type '" + type + "' (want er|sbm)");
}

inline int config_num_blocks(const Json& cfg) {
  namespace hd = harness_detail;
  if (hd::str(cfg, "type") != "sbm") return 1;
  if (cfg.contains("block_sizes")) return static_cast<int>(cfg.at("block_sizes").size());
  return static_cast<int>(hd::integer(cfg, "blocks"));
}

inline DesignParams design_from_config(const Json& cfg) {
  namespace hd = harness_detail;
  DesignParams dp;
  dp.blocks = static_cast<int>(hd::int_or(cfg, "blocks", dp.blocks));
  dp.block_size = static_cast<int>(hd::int_or(cfg, "block_size", dp.block_size));
  dp.rho = hd::num_or(cfg, "rho", dp.rho);
  dp.t = hd::num_or(cfg, "t", dp.t);
  dp.sigma_alpha = hd::num_or(cfg, "sigma_alpha", dp.sigma_alpha);
  dp.p = static_cast<int>(hd::int_or(cfg, "p", dp.p));
  dp.support_size = static_cast<int>(hd::int_or(cfg, "support_size", dp.support_size));
  return dp;
}

inline std::unique_ptr<Statistic> statistic_from_config(const Json& cfg,
                                                        const std::string& fallback) {
  namespace hd = harness_detail;
  StatisticOptions opt;
  opt.triangle_mode =
      hd::triangle_mode_from_string(hd::str_or(cfg, "triangle_mode", "mask_restricted"));
  opt.bh.k_max = static_cast<int>(hd::int_or(cfg, "k_max", opt.bh.k_max));
  opt.ecv.k_max = opt.bh.k_max;
  return make_statistic(hd::str_or(cfg, "statistic", fallback), opt);
}

// ---- experiment tasks ------------------------------------------------------

struct ExperimentResult {
  std::vector<std::string> outputs;  // file names inside out_dir, CSVs first
  Json manifest;
  bool any_warning = false;
};

namespace harness_detail {

struct TaskOutput {
  std::vector<std::string> files;
  Json extra;
  bool any_warning = false;
};

inline TaskOutput run_triangle_task(const Json& cfg, const std::string& out_dir,
                                    const Stream& master, int threads) {
  const Json& gcfg = require_key(cfg, "graph");
  const auto stat = statistic_from_config(cfg, "triangle_density");
  if (stat->dim() != 1) throw ConfigError("coverage task needs a scalar statistic");
  const auto q_grid = num_array(cfg, "q_grid");
  const auto B = static_cast<std::size_t>(integer(cfg, "num_replicates"));
  const double alpha = num_or(cfg, "alpha", 0.10);
  const auto reps = static_cast<std::size_t>(integer(cfg, "reps"));
  const std::string stat_id = str_or(cfg, "statistic", "triangle_density");
  const std::string prefix = stat_id == "triangle_density" ? "triangle" : stat_id;

  TaskOutput out;
  const auto gen = [&gcfg](const Stream& s) { return graph_from_config(gcfg, s); };
  for (const std::string& name : str_array(cfg, "schemes")) {
    const Scheme scheme = scheme_from_string(name);
    const auto rows = coverage_experiment(gen, *stat, scheme, q_grid, B, alpha, reps,
                                          master.child(scheme_ordinal(scheme)), threads);
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
      cells.push_back({format_number(r.q), format_number(r.mean_width),
                       format_number(r.coverage), format_number(r.frac_degenerate)});
      if (r.frac_degenerate > 0.10) out.any_warning = true;
    }
    const std::string file = prefix + "_" + name + ".csv";
    write_csv(out_dir + "/" + file, {"q", "mean_width", "coverage", "frac_degenerate"}, cells);
    out.files.push_back(file);
  }
  return out;
}

inline TaskOutput run_communities_task(const Json& cfg, const std::string& out_dir,
                                       const Stream& master, int threads) {
  const Json& gcfg = require_key(cfg, "graph");
  const std::string method = str(cfg, "method");
  const Scheme scheme = scheme_from_string(str_or(cfg, "scheme", "pair"));
  StatisticOptions sopt;
  sopt.bh.k_max = static_cast<int>(int_or(cfg, "k_max", sopt.bh.k_max));
  sopt.ecv.k_max = sopt.bh.k_max;
  std::unique_ptr<Statistic> stat;
  if (method == "bh") stat = std::make_unique<BetheHessianStatistic>(sopt.bh);
  else if (method == "ecv") stat = std::make_unique<EcvStatistic>(sopt.ecv);
  else throw ConfigError("unknown community method '" + method + "' (want bh|ecv)");
  if (!stat->supports(scheme))
    throw ConfigError("method '" + method + "' does not support the " + to_string(scheme) +
                      " scheme");

  const auto q_grid = num_array(cfg, "q_grid");
  const auto B = static_cast<std::size_t>(integer(cfg, "num_replicates"));
  const double alpha = num_or(cfg, "alpha", 0.10);
  const auto reps = static_cast<std::size_t>(integer(cfg, "reps"));
  const double true_k =
      static_cast<double>(int_or(cfg, "true_k", config_num_blocks(gcfg)));

  struct Cell {
    double k_sum = 0.0;
    std::size_t defined = 0;
    std::size_t matches = 0;
    bool covered = false;
    double frac_undefined = 0.0;
  };
  std::vector<Cell> cells(reps * q_grid.size());
  parallel_for(reps, threads, [&](std::size_t r) {
    const Graph parent = graph_from_config(gcfg, master.child(0, r));
    const std::vector<int> ids = identity_ids(parent.node_count());
    const GraphView view{parent, ids};
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
      const BootstrapRun run =
          bootstrap_ci(view, *stat, {scheme, q_grid[i]}, B, alpha, master.child(1, r, i), 1);
      Cell& cell = cells[r * q_grid.size() + i];
      for (std::size_t b = 0; b < B; ++b) {
        if (!run.replicate_defined[b]) continue;
        ++cell.defined;
        cell.k_sum += run.replicates[b][0];
        if (run.replicates[b][0] == true_k) ++cell.matches;
      }
      cell.covered = run.covers(true_k);
      cell.frac_undefined = static_cast<double>(run.num_undefined) / static_cast<double>(B);
    }
  });

  TaskOutput out;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    double k_sum = 0, frac_undef = 0;
    std::size_t defined = 0, matches = 0, covered = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Cell& c = cells[r * q_grid.size() + i];
      k_sum += c.k_sum;
      defined += c.defined;
      matches += c.matches;
      covered += c.covered ? 1 : 0;
      frac_undef += c.frac_undefined;
    }
    const double mean_k = defined ? k_sum / static_cast<double>(defined)
                                  : std::numeric_limits<double>::quiet_NaN();
    const double match_rate =
        defined ? static_cast<double>(matches) / static_cast<double>(defined) : 0.0;
    frac_undef /= static_cast<double>(reps);
    if (frac_undef > 0.10) out.any_warning = true;
    rows.push_back({format_number(q_grid[i]), format_number(mean_k), format_number(match_rate),
                    format_number(static_cast<double>(covered) / static_cast<double>(reps)),
                    format_number(frac_undef)});
  }
  const std::string file = "communities_" + method + "_" + to_string(scheme) + ".csv";
  write_csv(out_dir + "/" + file, {"q", "mean_k_hat", "match_rate", "coverage", "frac_degenerate"},
            rows);
  out.files.push_back(file);
  out.extra["true_k"] = true_k;
  return out;
}

inline TaskOutput run_regression_task(const Json& cfg, const std::string& out_dir,
                                      const Stream& master, int threads) {
  const DesignParams dp = design_from_config(require_key(cfg, "design"));
  const double lambda1 = num(cfg, "lambda1");
  const auto q_grid = num_array(cfg, "q_grid");
  const auto B = static_cast<std::size_t>(integer(cfg, "num_replicates"));
  const double alpha = num_or(cfg, "alpha", 0.10);
  const auto reps = static_cast<std::size_t>(integer(cfg, "reps"));
  std::vector<ResampleKind> kinds;
  for (const std::string& name : str_array(cfg, "kinds"))
    kinds.push_back(resample_from_string(name));

  struct Cell {
    double coverage = 0, mean_w = 0, max_w = 0, min_w = 0, mse = 0;
    bool warning = false;
  };
  // naive contributes one row; schemes contribute one per grid point
  std::vector<double> row_q;
  std::vector<ResampleKind> row_kind;
  for (ResampleKind k : kinds) {
    if (k == ResampleKind::naive) {
      row_kind.push_back(k);
      row_q.push_back(1.0);
    } else
      for (double q : q_grid) {
        row_kind.push_back(k);
        row_q.push_back(q);
      }
  }
  std::vector<Cell> cells(reps * row_q.size());

  parallel_for(reps, threads, [&](std::size_t r) {
    const DesignData d = make_design(dp, master.child(0, r));
    for (std::size_t i = 0; i < row_q.size(); ++i) {
      const auto kind_ord = static_cast<std::uint64_t>(row_kind[i]);
      const BetaUncertainty bu =
          beta_uncertainty(d.graph, d.x, d.y, lambda1, row_kind[i], row_q[i], B, alpha,
                           master.child(1, r).child(kind_ord, i), &d.beta_true,
                           EmbeddingMode::zero_pad, 1);
      Cell& cell = cells[r * row_q.size() + i];
      cell.coverage = bu.coverage;
      cell.mean_w = bu.mean_width;
      cell.max_w = bu.max_width;
      cell.min_w = bu.min_width;
      cell.mse = bu.mse;
      cell.warning = bu.warning;
    }
  });

  TaskOutput out;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < row_q.size(); ++i) {
    Cell sum;
    for (std::size_t r = 0; r < reps; ++r) {
      const Cell& c = cells[r * row_q.size() + i];
      sum.coverage += c.coverage;
      sum.mean_w += c.mean_w;
      sum.max_w += c.max_w;
      sum.min_w += c.min_w;
      sum.mse += c.mse;
      if (c.warning) out.any_warning = true;
    }
    const auto m = static_cast<double>(reps);
    rows.push_back({to_string(row_kind[i]), format_number(row_q[i]),
                    format_number(sum.coverage / m), format_number(sum.mean_w / m),
                    format_number(sum.max_w / m), format_number(sum.min_w / m),
                    format_number(sum.mse / m)});
  }
  write_csv(out_dir + "/regression.csv",
            {"kind", "q", "coverage", "mean_width", "max_width", "min_width", "mse"}, rows);
  out.files.push_back("regression.csv");
  return out;
}

inline TaskOutput run_stabsel_task(const Json& cfg, const std::string& out_dir,
                                   const Stream& master, int threads) {
  const DesignParams dp = design_from_config(require_key(cfg, "design"));
  const double lambda1 = num(cfg, "lambda1");
  const double q = num(cfg, "q");
  const auto subsamples = static_cast<std::size_t>(integer(cfg, "num_subsamples"));
  std::optional<double> lambda2;
  if (cfg.contains("lambda2") && !cfg.at("lambda2").is_null()) lambda2 = num(cfg, "lambda2");

  const DesignData d = make_design(dp, master.child(0));
  const StabilitySelection sel =
      stability_selection(d.graph, d.x, d.y, lambda1, q, subsamples, lambda2, master.child(1),
                          threads);

  TaskOutput out;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < sel.frequency.size(); ++j)
    rows.push_back({std::to_string(j), format_number(sel.frequency[j]),
                    d.support[j] ? "1" : "0"});
  write_csv(out_dir + "/stabsel.csv", {"predictor", "frequency", "true_support"}, rows);
  out.files.push_back("stabsel.csv");

  try {
    out.extra["stabsel_auc"] = selection_auc(sel.frequency, d.support);
  } catch (const UndefinedAUC&) {
    out.extra["stabsel_auc"] = nullptr;
  }
  Json path = Json::array();
  for (double l : sel.lambda2_path) path.push_back(l);
  out.extra["lambda2_path"] = std::move(path);
  return out;
}

inline TaskOutput run_realdata_task(const Json& cfg, const std::string& out_dir,
                                    const Stream& master, int threads) {
  const Json& nets = require_key(cfg, "networks");
  if (!nets.is_array() || nets.empty()) throw ConfigError("'networks' must be a non-empty array");
  const auto stat = statistic_from_config(cfg, "triangle_density");
  if (stat->dim() != 1) throw ConfigError("real-data task needs a scalar statistic");
  const auto candidates = num_array(cfg, "candidates");
  const auto outer = static_cast<std::size_t>(integer(cfg, "outer_rounds"));
  const auto inner = static_cast<std::size_t>(integer(cfg, "inner_replicates"));
  const auto B = static_cast<std::size_t>(integer(cfg, "num_replicates"));
  const double alpha = num_or(cfg, "alpha", 0.10);
  const bool include_log_n = bool_or(cfg, "include_log_n", false);

  std::vector<Scheme> schemes;
  for (const std::string& name : str_array(cfg, "schemes"))
    schemes.push_back(scheme_from_string(name));

  struct NetRow {
    std::string name;
    int n = 0;
    double density = 0;
    double chosen_q = 0;
    double estimate = 0;
    double lo = 0, hi = 0;
    double frac_undefined = 0;
    bool warning = false;
  };
  std::vector<std::vector<NetRow>> table(schemes.size());  // [scheme][network]
  TaskOutput out;
  Json chosen = Json::object();

  for (std::size_t ni = 0; ni < nets.size(); ++ni) {
    const Json& ncfg = nets[ni];
    const std::string name = str(ncfg, "name");
    const Graph g = read_edge_list(str(ncfg, "path"), bool_or(ncfg, "one_based", false));
    const std::vector<int> ids = identity_ids(g.node_count());
    const GraphView view{g, ids};
    const double density = g.node_count() >= 2 ? edge_density(g) : 0.0;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    try {
      const StatSample full = stat->on_graph(view);
      if (full.defined) estimate = full.values[0];
    } catch (const Undefined&) {
    } catch (const NoEdges&) {
    }

    for (std::size_t si = 0; si < schemes.size(); ++si) {
      const Scheme scheme = schemes[si];
      const QSelection sel = choose_q(view, *stat, scheme, candidates, outer, inner, alpha,
                                      master.child(0, ni, scheme_ordinal(scheme)), threads);
      const BootstrapRun run =
          bootstrap_ci(view, *stat, {scheme, sel.chosen_q}, B, alpha,
                       master.child(1, ni, scheme_ordinal(scheme)), threads);
      NetRow row;
      row.name = name;
      row.n = g.node_count();
      row.density = density;
      row.chosen_q = sel.chosen_q;
      row.estimate = estimate;
      row.lo = run.lower[0];
      row.hi = run.upper[0];
      row.frac_undefined = static_cast<double>(run.num_undefined) / static_cast<double>(B);
      row.warning = run.warning;
      if (run.warning) out.any_warning = true;
      table[si].push_back(row);
      chosen[name][to_string(scheme)] = sel.chosen_q;
    }
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t si = 0; si < schemes.size(); ++si)
    for (const NetRow& r : table[si])
      rows.push_back({r.name, std::to_string(r.n), format_number(r.density),
                      to_string(schemes[si]), format_number(r.chosen_q),
                      format_number(r.estimate), format_number(r.lo), format_number(r.hi),
                      format_number(r.frac_undefined)});
  write_csv(out_dir + "/realdata.csv",
            {"name", "num_nodes", "edge_density", "scheme", "chosen_q", "estimate", "ci_lower",
             "ci_upper", "frac_degenerate"},
            rows);
  out.files.push_back("realdata.csv");

  if (nets.size() >= 2) {
    std::vector<std::vector<std::string>> ols_rows;
    for (std::size_t si = 0; si < schemes.size(); ++si) {
      std::vector<double> est, xn, xld, xln;
      for (const NetRow& r : table[si]) {
        if (std::isnan(r.estimate) || r.density <= 0.0) continue;
        est.push_back(r.estimate);
        xn.push_back(static_cast<double>(r.n));
        xld.push_back(std::log(r.density));
        xln.push_back(std::log(static_cast<double>(r.n)));
      }
      std::vector<std::pair<std::string, const std::vector<double>*>> predictors = {
          {"num_nodes", &xn}, {"log_density", &xld}};
      if (include_log_n) predictors.emplace_back("log_num_nodes", &xln);
      for (const auto& [pname, xs] : predictors) {
        try {
          const OlsFit fit = ols_fit(*xs, est);
          ols_rows.push_back({to_string(schemes[si]), pname, format_number(fit.slope),
                              format_number(fit.intercept), format_number(fit.r2)});
        } catch (const DegenerateDesign&) {
          // skipped: fewer than two usable networks or constant predictor
        }
      }
    }
    if (!ols_rows.empty()) {
      write_csv(out_dir + "/realdata_ols.csv",
                {"scheme", "predictor", "slope", "intercept", "r2"}, ols_rows);
      out.files.push_back("realdata_ols.csv");
    }
  }
  out.extra["chosen_q"] = std::move(chosen);
  return out;
}

}  // namespace harness_detail

inline ExperimentResult run_experiment(const Json& config, const std::string& out_dir,
                                       int threads = env_thread_count()) {
  namespace hd = harness_detail;
  const auto start = std::chrono::steady_clock::now();
  const std::string task = hd::str(config, "task");
  const auto seed = static_cast<std::uint64_t>(hd::int_or(config, "seed", 1));
  const Stream master = Stream::root(seed);
  std::filesystem::create_directories(out_dir);

  hd::TaskOutput t;
  if (task == "triangle") t = hd::run_triangle_task(config, out_dir, master, threads);
  else if (task == "communities") t = hd::run_communities_task(config, out_dir, master, threads);
  else if (task == "regression") t = hd::run_regression_task(config, out_dir, master, threads);
  else if (task == "stabsel") t = hd::run_stabsel_task(config, out_dir, master, threads);
  else if (task == "realdata") t = hd::run_realdata_task(config, out_dir, master, threads);
  else throw ConfigError("unknown task '" + task + "'");

  ExperimentResult res;
  res.outputs = t.files;
  res.any_warning = t.any_warning;
  res.manifest["version"] = "0.1.0";
  res.manifest["task"] = task;
  res.manifest["seed"] = seed;
  res.manifest["threads"] = threads;
  res.manifest["config"] = config;
  res.manifest["outputs"] = t.files;
  res.manifest["any_warning"] = t.any_warning;
  for (auto& [k, v] : t.extra.items()) res.manifest[k] = v;
  const auto end = std::chrono::steady_clock::now();
  res.manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();

  std::ofstream mf(out_dir + "/manifest.json");
  if (!mf) throw InvalidInput("cannot write manifest in " + out_dir);
  mf << res.manifest.dump(2) << "\n";
  res.outputs.push_back("manifest.json");
  return res;
}

}  // namespace netboot
