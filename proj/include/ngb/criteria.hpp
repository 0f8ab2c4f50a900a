/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/dual_simplex.hpp>
#include <ngb/mip.hpp>
#include <ngb/types.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ngb {

enum class criterion_t { c0_convex, c1_product, c2a, c2b, c3_threshold, c4, c5, c6, c7, vote };
enum class eval_flavor_t { plain, d1d2, d3d4 };

std::string_view to_string(criterion_t c);
std::optional<criterion_t> criterion_from_string(std::string_view s);

struct branch_eval_t {
  int var           = -1;
  double parent_obj = 0;
  double obj_up     = inf;
  double obj_down   = inf;
  double eval_up    = 0;
  double eval_down  = 0;
  double infeas_up   = 0;
  double infeas_down = 0;
  bool infeasible_up   = false;
  bool infeasible_down = false;
  double f_up   = 0;
  double f_down = 0;
  double uc_up   = 0;
  double uc_down = 0;
  std::vector<fractional_t> frac_up;
  std::vector<fractional_t> frac_down;
  eval_flavor_t flavor = eval_flavor_t::plain;

  double max() const { return std::max(eval_up, eval_down); }
  double min() const { return std::min(eval_up, eval_down); }
  double spread() const { return std::abs(eval_up - eval_down); }
  branch_dir_t preferred() const { return eval_up < eval_down ? branch_dir_t::up : branch_dir_t::down; }
};

// Builds an eval from child objectives; infeasible children take x_o* when known.
branch_eval_t make_eval(int var, double parent_obj, double f_up, double f_down,
                        double obj_up, double obj_down, double incumbent_obj);

struct criterion_spec_t {
  criterion_t id         = criterion_t::c2a;
  double p               = 1.0;
  double lambda          = 0.75;
  double w1              = 100.0;
  double w2              = 10.0;
  double mu              = 1.0 / 6.0;
  bool max_power_variant = false;
  double zero_substitute = 1e-6;
  std::optional<int> mincost_top_k;
  std::vector<criterion_spec_t> voters;

  // defaults per criterion (C5 uses p = 0.3)
  static criterion_spec_t of(criterion_t id);
  bool minimizes() const { return id == criterion_t::c6 || id == criterion_t::c7; }
  eval_flavor_t required_flavor() const;
  void validate() const;
};

struct selection_t {
  size_t index     = 0;
  int var          = -1;
  branch_dir_t dir = branch_dir_t::up;
  std::vector<double> scores;
};

// Raw score of each eval; larger is better unless the criterion minimizes.
std::vector<double> score(std::span<const branch_eval_t> evals, const criterion_spec_t& spec);

// Indices of evals, best first, ties to the lowest variable index.
std::vector<size_t> rank(std::span<const branch_eval_t> evals, const criterion_spec_t& spec);

selection_t select(std::span<const branch_eval_t> evals, const criterion_spec_t& spec);

// Plurality over the voters' winners; direction by majority of their directions.
selection_t vote(std::span<const branch_eval_t> evals, std::span<const criterion_spec_t> specs);

/**
 * UC lookup for MinCost terms: own probes first, then an optional parent
 * table, then |RC_i| of this node's LP.
 */
class unit_costs_t {
 public:
  unit_costs_t() = default;
  explicit unit_costs_t(std::vector<double> abs_reduced_costs, const unit_costs_t* parent = nullptr)
    : rc_(std::move(abs_reduced_costs)), parent_(parent)
  {
  }
  void set(int var, double up, double down) { table_[var] = {up, down}; }
  bool has(int var) const;
  std::pair<double, double> get(int var) const;

 private:
  std::unordered_map<int, std::pair<double, double>> table_;
  std::vector<double> rc_;
  const unit_costs_t* parent_ = nullptr;
};

struct eval_weights_t {
  double w1 = 100.0;
  double w2 = 10.0;
  std::optional<int> top_k;
};

// D1/D2 (fraction sums) or D3/D4 (MinCost sums) evaluations from a plain eval.
branch_eval_t eval_weighted(const branch_eval_t& base,
                            eval_flavor_t flavor,
                            const eval_weights_t& weights,
                            const unit_costs_t* unit_costs = nullptr);

enum class signal_t { none, compulsory, node_infeasible };

struct branch_signal_t {
  signal_t kind        = signal_t::none;
  int var              = -1;
  branch_dir_t forced  = branch_dir_t::up;
};

branch_signal_t signal_of(const branch_eval_t& e);

struct child_lp_t {
  dual_simplex_t lp;
  lp_solution_t sol;
};

struct branch_probe_t {
  branch_eval_t eval;
  std::optional<child_lp_t> up;
  std::optional<child_lp_t> down;
  int pivots = 0;
};

/**
 * Solves both children of x_j under `budget` (truncated when max_pivots is set)
 * and fills objective, infeasibility and fractional data.
 */
branch_probe_t eval_plain(const dual_simplex_t& node,
                          const mip_problem_t& problem,
                          int j,
                          const pivot_budget_t& budget,
                          double incumbent_obj,
                          bool keep_children);

}  // namespace ngb
