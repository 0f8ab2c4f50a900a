/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/cost_memory.hpp>
#include <ngb/criteria.hpp>
#include <ngb/lookahead.hpp>
#include <ngb/mip.hpp>
#include <ngb/winnow.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ngb {

enum class node_select_t { depth_first, best_dval };
enum class pseudo_mode_t { off, classic, analytical };
enum class solve_status_t { optimal, feasible, infeasible, limit_hit };

std::string_view to_string(node_select_t m);
std::string_view to_string(pseudo_mode_t m);
std::string_view to_string(solve_status_t s);

struct solve_config_t {
  // branching strategy
  winnow_params_t winnow;  // used when look-ahead is off
  bool lookahead = true;
  lookahead_config_t tree;
  std::optional<double> d2_v;  // depth-2 budgeting mode with ratio v
  int multi_tree = 1;
  bool straddle  = false;
  pseudo_mode_t pseudo = pseudo_mode_t::off;
  analytical_thresholds_t analytical;
  bool refset          = false;
  double refset_theta  = 0.5;
  int refset_capacity  = 10;
  double refset_p      = 0.5;

  node_select_t node_select     = node_select_t::depth_first;
  dval_approach_t dval_approach = dval_approach_t::one;

  long max_nodes   = 200000;
  double max_time  = 60.0;  // seconds
  int max_restarts = 20;

  bool reversals = false;
  double beta    = 0.5;

  double epsilon     = 1e-6;
  std::uint64_t seed = 0;

  // Depth-first, D = 3 with 2a (Lim = 3, d0 = 2), C2a (p = 1) throughout.
  static solve_config_t defaults();
  void validate() const;
};

// Config keys mirror the long CLI options (`criterion`, `lookahead`, `postwin`, ...).
solve_config_t config_from_json(const nlohmann::json& j, solve_config_t base = solve_config_t::defaults());

struct trace_node_t {
  int id     = 0;
  int parent = -1;
  int depth  = 0;
  std::optional<branch_t> branch;
  double objective = inf;
  std::string status;  // open | branched | integral | infeasible | cutoff | pruned | limit
  std::vector<std::pair<int, double>> scores;  // (var, criterion score) at branching time
  std::string prune_reason;
};

struct incumbent_event_t {
  int node        = -1;
  long nodes_seen = 0;
  double objective = inf;
  std::string source;  // bnb | lookahead
};

struct reversal_event_t {
  int node       = -1;  // B&B node whose tree produced the leaf
  int var        = -1;
  double rc      = 0;
  double before  = 0;
  double after   = inf;
  double threshold = 0;
  std::string status;
};

struct symdif_event_t {
  int u = -1;
  int v_parent = -1;
  int var      = -1;
  branch_dir_t dir = branch_dir_t::up;
  symdif_t metrics;
};

struct error_stats_t {
  double sum_abs = 0;
  long count     = 0;
  double mae() const { return count ? sum_abs / count : 0.0; }
};

struct run_counters_t {
  long nodes       = 0;
  long lp_solves   = 0;
  long pivots      = 0;
  long probes      = 0;
  long estimates   = 0;
  long compulsory  = 0;
  long tree_builds = 0;
  error_stats_t analytical_error;
  error_stats_t classic_error;
};

struct ext_dump_t {
  int id;
  int parent;
  std::optional<branch_t> branch;
  bool tentative;
  int compulsory;
  std::optional<double> uc;
};

struct run_trace_t {
  std::string instance;
  std::vector<trace_node_t> nodes;
  std::vector<incumbent_event_t> incumbents;
  std::vector<reversal_event_t> reversals;
  std::vector<symdif_event_t> symdif;
  std::vector<ext_dump_t> extended_tree;
  run_counters_t counters;
  solve_status_t status = solve_status_t::infeasible;
};

struct solve_result_t {
  solve_status_t status = solve_status_t::infeasible;
  incumbent_t incumbent;
  double bound = -inf;  // best remaining lower bound (x_o* when optimal)
  long nodes_to_first_optimal = -1;
  double seconds = 0;  // wall time, never serialized
  run_trace_t trace;
};

solve_result_t solve_mip(const mip_problem_t& problem, const solve_config_t& config);

// Schema "ngb-trace/1". Contains no timing data.
nlohmann::json trace_to_json(const run_trace_t& trace, const solve_result_t* result = nullptr);

// Rebuilds the extended tree from a serialized trace and re-evaluates its SymDif queries.
std::vector<symdif_t> replay_symdif(const nlohmann::json& trace);

struct open_summary_t {
  int depth         = 0;
  long seq          = 0;  // creation order
  double objective  = 0;
  double parent_obj = 0;
  double min_cost   = 0;
};

// Index of the node to expand next.
size_t select_open_node(std::span<const open_summary_t> open, node_select_t mode, const dval_table_t& dval);

// T = beta * mean + (1 - beta) * max over the given |RC| values.
double reversal_threshold(std::span<const double> abs_rc, double beta);

struct reversal_outcome_t {
  int leaf = -1;
  int var  = -1;
  branch_dir_t reversed = branch_dir_t::up;  // direction of the original branch
  double rc        = 0;
  double threshold = 0;
  double before    = 0;
  lp_solution_t after;
  std::vector<double> lower, upper;  // structural bounds of the reversed node
};

/**
 * Reverses the most resistant look-ahead branch at a depth-D leaf, dropping
 * restrictions implied below it. nullopt when nothing reaches the threshold.
 */
std::optional<reversal_outcome_t> try_reversal(const lookahead_result_t& tree,
                                               const mip_problem_t& problem,
                                               int depth,
                                               double beta);

struct bench_strategy_t {
  std::string name;
  solve_config_t config;
};

struct bench_row_t {
  std::string instance;
  std::string strategy;
  solve_status_t status = solve_status_t::infeasible;
  double objective      = inf;
  long nodes_to_first_optimal = -1;
  long nodes     = 0;
  long lp_solves = 0;
  long pivots    = 0;
  double seconds = 0;
  std::vector<incumbent_event_t> timeline;
};

struct bench_report_t {
  std::vector<bench_row_t> rows;
  std::vector<std::string> skipped;
};

std::vector<bench_strategy_t> default_matrix();
std::vector<bench_strategy_t> matrix_from_json(const nlohmann::json& j);

// Solves every .mps file in `dir` (sorted by name) under each strategy.
bench_report_t run_benchmark(const std::filesystem::path& dir, std::span<const bench_strategy_t> matrix);
nlohmann::json report_to_json(const bench_report_t& report);
std::string report_table(const bench_report_t& report);

}  // namespace ngb
