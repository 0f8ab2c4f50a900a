/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/mip.hpp>
#include <ngb/types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ngb {

// ---------------------------------------------------------------- pseudo-costs

class pseudo_cost_table_t {
 public:
  // Infeasible solves are ignored.
  void update(int var, branch_dir_t dir, double uc, bool lp_feasible);
  double pseudo_cost(int var, branch_dir_t dir) const;  // 0 without history
  int count(int var, branch_dir_t dir) const;
  double pseudo_eval(int var, branch_dir_t dir, double f) const { return pseudo_cost(var, dir) * f; }

 private:
  struct entry_t {
    double sum = 0;
    int n      = 0;
  };
  std::map<int, entry_t> up_, down_;
};

// ------------------------------------------------------------- extended tree

struct ext_ref_t {
  std::uint64_t session = 0;
  int id                = -1;
  bool operator==(const ext_ref_t&) const = default;
};

struct ext_record_t {
  int id     = 0;
  int parent = -1;
  int depth  = 0;  // edges from the root, compulsory edges included
  std::optional<branch_t> branch;
  bool tentative = false;
  std::vector<bound_change_t> compulsory;  // absorbed on the edge into this node
  std::optional<double> uc;                // UC for `branch`, when its LP was feasible
  long seq = 0;                            // creation order of the UC value
};

struct symdif_t {
  int intersect = 0;
  int symdif    = 0;
  double ratio() const { return symdif > 0 ? static_cast<double>(intersect) / symdif : inf; }
};

struct analytical_thresholds_t {
  int max_symdif      = 8;
  int min_intersect   = 3;
  double min_ratio    = 1.0;
  // disabled when depth(v) > late_fraction * depth of the deepest incumbent so far
  double late_fraction = 0.8;
  bool fast_path      = false;  // consult only the most recent record per (var, dir)

  void validate() const;
};

struct analytical_pick_t {
  ext_ref_t source;
  double uc = 0;
  symdif_t metrics;
};

class extended_tree_t {
 public:
  extended_tree_t();

  ext_ref_t root() const { return {session_, 0}; }
  std::uint64_t session() const { return session_; }
  const ext_record_t& at(ext_ref_t r) const;
  int size() const { return static_cast<int>(records_.size()); }

  // A child edge from `parent`. Tentative children record evaluated but untaken branches.
  ext_ref_t add_child(ext_ref_t parent, const branch_t& b, bool tentative, std::optional<double> uc);
  // Marks an existing tentative child as taken, or adds a taken child.
  ext_ref_t take(ext_ref_t parent, const branch_t& b, std::optional<double> uc);
  void add_compulsory(ext_ref_t node, const bound_change_t& c);

  int path_length(ext_ref_t u) const;
  // Metrics between two recorded nodes.
  symdif_t metrics(ext_ref_t u, ext_ref_t v) const;
  // Metrics between u and a prospective child of `v_parent` (one more edge).
  symdif_t metrics_prospective(ext_ref_t u, ext_ref_t v_parent) const;

  // Records carrying a UC value for (var, dir), oldest first.
  std::vector<ext_ref_t> uc_sources(int var, branch_dir_t dir) const;

  /**
   * Picks the UC value for branching x_var in `dir` at a child of `v_parent`, or
   * nullopt when an LP solve should be used instead.
   */
  std::optional<analytical_pick_t> analytical_uc(int var,
                                                 branch_dir_t dir,
                                                 ext_ref_t v_parent,
                                                 const analytical_thresholds_t& th,
                                                 std::optional<int> incumbent_depth = std::nullopt) const;

  int max_depth() const { return max_depth_; }

 private:
  void check(ext_ref_t r) const;
  int lca(int a, int b) const;

  std::uint64_t session_;
  std::vector<ext_record_t> records_;
  std::vector<std::vector<int>> children_;
  std::map<std::pair<int, int>, std::vector<int>> by_branch_;  // (var, dir) -> record ids with UC
  long seq_      = 0;
  int max_depth_ = 0;
};

// Hypothesis-1 dominance: a dominates b when I(a) >= I(b), S(a) <= S(b), one strict.
bool dominates(const symdif_t& a, const symdif_t& b);

// ----------------------------------------------------------------- Dval

enum class dval_approach_t { one = 1, two = 2 };

struct dval_point_t {
  int depth        = 0;
  double objective = 0;  // LP objective of the path node
  double min_cost  = 0;  // sum of MinCost over its fractional variables
};

struct dval_weights_t {
  double w_o = 1;
  double w_1 = 1;
};

// w(d) = (x_o* - x_o0) / Eval.
double single_weight(double x_star, double x_root, double eval);

// Solves a1 w_o + b1 w_1 = c1, a2 w_o + b2 w_1 = c2; nullopt when singular.
std::optional<dval_weights_t> solve_weights(double a1, double b1, double c1, double a2, double b2, double c2);

class dval_table_t {
 public:
  explicit dval_table_t(dval_approach_t approach = dval_approach_t::one) : approach_(approach) {}

  /**
   * Calibrates from the root-to-incumbent path (points ordered by depth 0..d*)
   * and averages the result into the table.
   */
  void calibrate(std::span<const dval_point_t> path, double x_star);
  // Weights computed by the most recent calibration, by depth.
  const std::map<int, dval_weights_t>& last() const { return last_; }

  dval_weights_t weights(int d) const;
  // w_o(d) (x_oj - x_o0) + w_1(d) sum MinCost, d being the depth of the evaluating parent.
  double dval(int d, double child_obj, double parent_obj, double min_cost) const;
  bool calibrated() const { return !sum_.empty(); }
  dval_approach_t approach() const { return approach_; }

  static std::map<int, dval_weights_t> approach_one(std::span<const dval_point_t> path, double x_star);
  static std::map<int, dval_weights_t> approach_two(std::span<const dval_point_t> path, double x_star);

 private:
  dval_approach_t approach_;
  std::map<int, std::pair<dval_weights_t, int>> sum_;
  std::map<int, dval_weights_t> last_;
};

// ----------------------------------------------------------- reference set

inline constexpr double large_cost = 1e30;

struct ref_branch_t {
  int var;
  bool compulsory = false;
};

struct ref_solution_t {
  std::vector<double> x;
  double objective = 0;
  std::vector<int> necessary;  // N(r), sorted
  double avg_cng = 0;
  std::map<int, double> delta;  // Delta_j(r) for j in N(r)
};

struct ref_direction_stats_t {
  double guc = large_cost;
  int n      = 0;
  double gc  = large_cost;
  std::optional<double> min_bd, max_bd, mean_bd;
};

class reference_set_t {
 public:
  reference_set_t(std::vector<double> root_x, double root_obj, int capacity = 10, double p = 0.5,
                  bool gap_normalized = false);

  // Returns false for duplicates and for solutions worse than a full set's worst.
  bool add(std::span<const double> x, double objective, std::span<const ref_branch_t> path);

  const std::vector<ref_solution_t>& solutions() const { return sols_; }
  bool empty() const { return sols_.empty(); }
  const ref_direction_stats_t& stats(int var, branch_dir_t dir) const;
  double guc(int var, branch_dir_t dir, const ref_solution_t& r) const;

  /**
   * Branching-distance rationing: allowed iff the accumulated shift is within
   * theta MinBD + (1 - theta) MaxBD. Binary variables and directions without
   * distance data are always allowed.
   */
  bool gate(int var, branch_dir_t dir, double accumulated, bool binary, double theta = 0.5) const;

 private:
  void recompute();

  std::vector<double> root_x_;
  double root_obj_;
  int capacity_;
  double p_;
  bool gap_normalized_;
  std::vector<ref_solution_t> sols_;
  std::map<int, ref_direction_stats_t> up_, down_;
};

}  // namespace ngb
