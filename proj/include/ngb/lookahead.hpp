/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/criteria.hpp>
#include <ngb/dual_simplex.hpp>
#include <ngb/mip.hpp>
#include <ngb/winnow.hpp>

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

namespace ngb {

enum class post_winnow_t { off, keep_pairs, best_sibling, single_stream };
enum class accept_mode_t { first_branch, full_path };
enum class traversal_t { breadth_first, depth_first };

std::string_view to_string(post_winnow_t m);
std::optional<post_winnow_t> post_winnow_from_string(std::string_view s);

struct lookahead_config_t {
  int depth = 3;
  winnow_params_t winnow;
  // per-depth override of winnow.criterion; the last entry covers deeper levels
  std::vector<criterion_spec_t> criterion_by_depth;
  criterion_spec_t leaf_criterion;  // C2a, p = 1
  double fractionality_weight = 0;  // <= 0, added to leaf evals times sum min(f+, f-)

  post_winnow_t post_winnow = post_winnow_t::off;
  std::vector<int> lim{3};  // Lim(d); the last entry covers deeper levels
  int d0          = 2;
  bool early_exit = true;

  accept_mode_t accept  = accept_mode_t::first_branch;
  traversal_t traversal = traversal_t::breadth_first;
  int trees             = 1;  // n'
  bool straddle         = false;

  int step2_max_pivots = 1000;
  int step2_max_stall  = 0;
  int max_restarts     = 20;  // compulsory absorptions per tree node
  // stand-in gap for a missing leaf before any incumbent exists
  double missing_gap = 1e3;

  double attract_threshold = inf;
  bool attract_half_tree   = false;

  const criterion_spec_t& criterion_at(int d) const;
  int lim_at(int d) const;
  void validate() const;
};

// n2(1) = round(|F| / (v + 2)), n2(0) = v * n2(1), so n2(0) + 2 n2(1) ~ |F|.
std::pair<int, int> d2_budget(int num_fractional, double v);

// Depth-2 tree with pass-through winnowing and a C7 second level.
lookahead_config_t d2_config(const lookahead_config_t& base, int num_fractional, double v);

enum class tree_node_status_t { open, expanded, leaf, terminal, missing, discarded };
std::string_view to_string(tree_node_status_t s);

enum class missing_reason_t { none, infeasible, cutoff, mip_feasible, pruned, node_infeasible };
std::string_view to_string(missing_reason_t r);

struct tree_node_t {
  int id     = 0;
  int parent = -1;
  int depth  = 0;
  int tree   = 0;
  int half   = 0;  // +1 under the root's up child, -1 under its down child
  int var    = -1;  // branch that created this node
  branch_dir_t dir = branch_dir_t::up;
  double bound     = 0;
  int child_up   = -1;
  int child_down = -1;
  tree_node_status_t status = tree_node_status_t::open;
  missing_reason_t reason   = missing_reason_t::none;
  double objective          = inf;
  std::vector<double> lower;  // structural bounds
  std::vector<double> upper;
  std::vector<bound_change_t> implied;
  std::optional<branch_eval_t> step2_eval;  // eval of the pair this node generated
  std::vector<int> excluded;
  int z_rows = 0;

  std::optional<dual_simplex_t> lp;
  std::vector<fractional_t> fractional;
  std::shared_ptr<unit_costs_t> unit_costs;
};

struct prune_record_t {
  int node;
  double bound;
  double incumbent;
};

struct attract_counters_t {
  std::map<int, int> up;
  std::map<int, int> down;
  std::map<int, int> up_plus, down_plus;    // root plus the up half-tree
  std::map<int, int> up_minus, down_minus;  // root plus the down half-tree

  void reset() { *this = {}; }
  void add(int var, branch_dir_t dir, int half);
  // (var, dir, value) with the largest max(Up, Down) among `vars`; half 0 reads the global counts
  std::optional<std::tuple<int, branch_dir_t, int>> best(std::span<const int> vars, int half) const;
};

// Overrides the chosen branch when the best AttractValue exceeds the threshold.
std::optional<branch_t> attract_override(const attract_counters_t& counters,
                                         std::span<const int> root_f2,
                                         int half,
                                         double threshold);

/**
 * Leaf-pair evaluation against the root objective. A missing child (nullopt)
 * takes `missing_obj`; penalties apply to existing children only.
 */
branch_eval_t leaf_pair_eval(int var,
                             double root_obj,
                             double x_value,
                             std::optional<double> up_obj,
                             std::optional<double> down_obj,
                             double missing_obj,
                             double penalty_up   = 0,
                             double penalty_down = 0);

enum class lookahead_outcome_t { branch, integral, node_infeasible };

struct lookahead_stats_t {
  int nodes_generated = 0;  // tree nodes counted by the post-winnow conventions
  int lp_solves       = 0;
  int pivots          = 0;
  int restarts        = 0;
  int incumbents      = 0;
  bool early_exit     = false;
  int max_z_rows      = 0;
  int estimates       = 0;  // Stage-2 probes answered by `estimate`
};

struct lookahead_result_t {
  lookahead_outcome_t outcome = lookahead_outcome_t::branch;
  std::vector<branch_t> path;  // first entry is the depth-0 branch
  std::vector<bound_change_t> root_changes;
  std::optional<branch_t> attract_choice;
  int winning_pair_parent = -1;
  std::deque<tree_node_t> nodes;
  std::vector<prune_record_t> prunes;
  attract_counters_t attract;
  std::vector<int> root_f2;
  std::vector<branch_eval_t> root_evals;  // step-2 evals at the root, aligned with root_f2
  lookahead_stats_t stats;

  const branch_t& choice() const { return path.front(); }
};

// Cheap stand-in for a pair of child solves; nullopt means solve instead.
using estimate_fn = std::function<std::optional<branch_eval_t>(const dual_simplex_t&, int var, int depth)>;

struct lookahead_context_t {
  double avg_solve_pivots = 0;
  const unit_costs_t* root_unit_costs = nullptr;
  estimate_fn estimate;  // consulted for Stage-2 screening
};

/**
 * Builds the look-ahead tree from a solved node and returns the depth-0 branch
 * (or the whole path). New incumbents found inside the tree are installed.
 */
lookahead_result_t build_tree(const dual_simplex_t& root,
                              const mip_problem_t& problem,
                              const lookahead_config_t& cfg,
                              incumbent_t& incumbent,
                              const lookahead_context_t& ctx = {});

lookahead_result_t build_d2_tree(const dual_simplex_t& root,
                                 const mip_problem_t& problem,
                                 const lookahead_config_t& base,
                                 double v,
                                 incumbent_t& incumbent,
                                 const lookahead_context_t& ctx = {});

// build_tree with cfg.trees = n' lexicographically ordered trees.
lookahead_result_t build_multi_trees(const dual_simplex_t& root,
                                     const mip_problem_t& problem,
                                     const lookahead_config_t& cfg,
                                     int n_prime,
                                     incumbent_t& incumbent,
                                     const lookahead_context_t& ctx = {});

// Share of synthetic paths where one of the first `depth` nodes rates the correct branch best.
double idealized_path_correctness(double p, int depth, int trials, std::mt19937_64& rng);

}  // namespace ngb
