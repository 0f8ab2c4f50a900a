/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/dual_simplex.hpp>
#include <ngb/lp_model.hpp>
#include <ngb/types.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ngb {

struct mip_problem_t {
  std::string name;
  lp_model_t lp;
  std::vector<char> is_integer;
  std::vector<std::string> col_names;
  std::vector<std::string> row_names;
  std::string objective_name = "obj";

  int num_integer() const;
  // rounds integer bounds inward
  void tighten_integer_bounds();
  void validate() const;

  bool operator==(const mip_problem_t&) const = default;
};

struct fractional_t {
  int var;
  double value;
  double f_up;
  double f_down;
};

std::vector<fractional_t> detect_fractional(std::span<const double> x, const mip_problem_t& problem);

bool is_mip_feasible(std::span<const double> x, const mip_problem_t& problem, double tol = 1e-6);

struct incumbent_t {
  std::vector<double> x;
  double objective = inf;
  double epsilon   = 1e-6;
  int depth        = -1;
  int node         = -1;

  bool has_solution() const { return !x.empty(); }
  // LP objectives at or above this value are infeasible for improvement
  double cutoff() const { return objective - epsilon + 1e-9 * (1.0 + std::abs(objective)); }
  bool improves(double obj) const { return obj < cutoff(); }
};

struct incumbent_update_t {
  bool updated           = false;
  double prune_threshold = inf;
};

// Installs x when it improves on the incumbent. Throws when x is not MIP feasible.
incumbent_update_t update_incumbent(incumbent_t& inc,
                                    const mip_problem_t& problem,
                                    std::span<const double> x,
                                    int depth,
                                    int node);

struct bound_change_t {
  int var;
  double lower;
  double upper;
  bool compulsory = false;
};

struct branch_t {
  int var          = -1;
  branch_dir_t dir = branch_dir_t::up;
  double bound     = 0;
};

struct node_state_t {
  int id     = 0;
  int parent = -1;
  int depth  = 0;
  std::optional<branch_t> branch;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bound_change_t> implied;
  std::optional<lp_solution_t> lp;
  std::vector<fractional_t> fractional;

  static node_state_t root(const mip_problem_t& problem);
  bool bounds_consistent() const;
  // records a compulsory restriction and tightens the local bounds
  void absorb(const bound_change_t& change);
};

// Child bounds for branching x_var (currently at `value`) in `dir`.
node_state_t make_child(const node_state_t& parent, int id, int var, branch_dir_t dir, double value);

}  // namespace ngb
