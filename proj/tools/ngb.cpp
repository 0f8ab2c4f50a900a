/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/driver.hpp>
#include <ngb/mps.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

struct solve_flags_t {
  std::string mps;
  std::optional<std::string> criterion, postwin, pseudo, node_select, accept;
  std::optional<double> p, lambda, w1, w2, v, beta, vlim, max_time, eps;
  std::optional<int> lookahead, lim, d0, multi_tree, dval_approach, clist;
  std::optional<long> max_nodes;
  std::optional<std::uint64_t> seed;
  bool d2_mode = false, straddle = false, refset = false, reversals = false, integral_objective = false;
  std::string trace;
};

template <class T>
void put(json& j, const char* key, const std::optional<T>& v)
{
  if (v) { j[key] = *v; }
}

json options_of(const solve_flags_t& f)
{
  json j = json::object();
  put(j, "criterion", f.criterion);
  put(j, "p", f.p);
  put(j, "lambda", f.lambda);
  put(j, "w1", f.w1);
  put(j, "w2", f.w2);
  put(j, "lookahead", f.lookahead);
  put(j, "postwin", f.postwin);
  put(j, "lim", f.lim);
  put(j, "d0", f.d0);
  put(j, "v", f.v);
  put(j, "multi-tree", f.multi_tree);
  put(j, "pseudo", f.pseudo);
  put(j, "beta", f.beta);
  put(j, "node-select", f.node_select);
  put(j, "dval-approach", f.dval_approach);
  put(j, "clist", f.clist);
  put(j, "vlim", f.vlim);
  put(j, "max-nodes", f.max_nodes);
  put(j, "max-time", f.max_time);
  put(j, "eps", f.eps);
  put(j, "seed", f.seed);
  put(j, "accept", f.accept);
  if (f.d2_mode) { j["d2-mode"] = true; }
  if (f.straddle) { j["straddle"] = true; }
  if (f.refset) { j["refset"] = true; }
  if (f.reversals) { j["reversals"] = true; }
  if (f.integral_objective && !f.eps) { j["eps"] = 1.0; }
  return j;
}

int run_solve(const solve_flags_t& f)
{
  auto problem = ngb::read_mps(f.mps);
  auto config  = ngb::config_from_json(options_of(f));
  config.validate();
  spdlog::info("solving {} ({} columns, {} rows)", problem.name, problem.lp.num_cols, problem.lp.num_rows);
  auto r = ngb::solve_mip(problem, config);

  std::cout << "status     " << ngb::to_string(r.status) << "\n";
  if (r.incumbent.has_solution()) {
    std::cout << "objective  " << std::setprecision(12) << r.incumbent.objective << "\n";
  }
  std::cout << "bound      " << r.bound << "\n";
  const auto& c = r.trace.counters;
  std::cout << "nodes      " << c.nodes << "\n"
            << "lp solves  " << c.lp_solves << "\n"
            << "pivots     " << c.pivots << "\n"
            << "first opt  " << r.nodes_to_first_optimal << "\n"
            << "seconds    " << std::setprecision(3) << r.seconds << "\n";
  if (r.incumbent.has_solution()) {
    for (int j = 0; j < problem.lp.num_cols; ++j) {
      if (r.incumbent.x[j] != 0) {
        const auto& name = j < static_cast<int>(problem.col_names.size()) ? problem.col_names[j] : "c" + std::to_string(j);
        std::cout << "  " << name << " = " << std::setprecision(12) << r.incumbent.x[j] << "\n";
      }
    }
  }
  if (!f.trace.empty()) {
    std::ofstream out(f.trace);
    if (!out) { throw std::runtime_error("cannot write " + f.trace); }
    out << ngb::trace_to_json(r.trace, &r).dump(2) << "\n";
  }
  return r.status == ngb::solve_status_t::optimal || r.status == ngb::solve_status_t::infeasible ? 0 : 2;
}

int run_bench(const std::string& dir, const std::string& configs, const std::string& json_out)
{
  std::vector<ngb::bench_strategy_t> matrix;
  if (configs.empty()) {
    matrix = ngb::default_matrix();
  } else {
    std::ifstream in(configs);
    if (!in) { throw std::runtime_error("cannot read " + configs); }
    matrix = ngb::matrix_from_json(json::parse(in));
  }
  auto report = ngb::run_benchmark(dir, matrix);
  std::cout << ngb::report_table(report);
  if (!json_out.empty()) {
    std::ofstream(json_out) << ngb::report_to_json(report).dump(2) << "\n";
  }
  if (report.rows.empty()) {
    spdlog::error("no readable .mps instances in {}", dir);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"narrow-gauge branch and bound"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  solve_flags_t f;
  auto* solve = app.add_subcommand("solve", "solve one MPS instance");
  solve->add_option("file", f.mps, "MPS file")->required()->check(CLI::ExistingFile);
  solve->add_option("--criterion", f.criterion, "C1|C2a|C2b|C3|C4|C5|C6|C7|vote");
  solve->add_option("--p", f.p);
  solve->add_option("--lambda", f.lambda);
  solve->add_option("--w1", f.w1);
  solve->add_option("--w2", f.w2);
  solve->add_option("--lookahead", f.lookahead, "tree depth D; 0 disables look-ahead");
  solve->add_option("--postwin", f.postwin, "off|2a|2b|2c");
  solve->add_option("--lim", f.lim);
  solve->add_option("--d0", f.d0);
  solve->add_flag("--d2-mode", f.d2_mode, "depth-2 budgeted trees");
  solve->add_option("--v", f.v, "n20/n21 ratio in [1, 2]");
  solve->add_option("--multi-tree", f.multi_tree);
  solve->add_flag("--straddle", f.straddle);
  solve->add_option("--pseudo", f.pseudo, "off|classic|analytical");
  solve->add_flag("--refset", f.refset);
  solve->add_flag("--reversals", f.reversals);
  solve->add_option("--beta", f.beta);
  solve->add_option("--node-select", f.node_select, "dfs|dval");
  solve->add_option("--dval-approach", f.dval_approach, "1|2");
  solve->add_option("--clist", f.clist, "fix candidates to the top N at each tree root");
  solve->add_option("--vlim", f.vlim, "v_lim multiplier");
  solve->add_option("--accept", f.accept, "first|path");
  solve->add_option("--max-nodes", f.max_nodes);
  solve->add_option("--max-time", f.max_time, "seconds");
  solve->add_option("--eps", f.eps);
  solve->add_flag("--integral-objective", f.integral_objective, "use eps = 1");
  solve->add_option("--seed", f.seed);
  solve->add_option("--trace", f.trace, "write the JSON trace here");

  std::string bench_dir, bench_configs, bench_json;
  auto* bench = app.add_subcommand("bench", "run a strategy matrix over a directory of MPS files");
  bench->add_option("dir", bench_dir)->required();
  bench->add_option("--configs", bench_configs, "JSON array of {name, options}");
  bench->add_option("--json", bench_json, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));
  try {
    if (*solve) { return run_solve(f); }
    return run_bench(bench_dir, bench_configs, bench_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
