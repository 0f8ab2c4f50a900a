/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/criteria.hpp>
#include <ngb/dual_simplex.hpp>
#include <ngb/mip.hpp>

#include <vector>

namespace ngb {

/**
 * Nonbasic term of x_j's tableau row, written
 *   x_j + sum a_i (x_i - b_i) = x_j0
 * with b_i the bound x_i rests on. r = a - floor(a), s = ceil(a) - a.
 */
struct straddle_term_t {
  int var       = -1;
  double a      = 0;
  double r      = 0;
  double s      = 0;
  double bound  = 0;
  bool at_upper = false;
  bool nb1      = false;
};

/**
 * Derivative variable z = x_j + sum_{NB1} floor(a_i)(x_i - b_i)
 *                             + sum_{NB2} ceil(a_i)(x_i - b_i),
 * which is integral at every MIP-feasible point. The branch is z >= ceil(x_j0)
 * (up) or z <= floor(x_j0) (down).
 */
struct straddle_row_t {
  int source      = -1;
  branch_dir_t dir = branch_dir_t::up;
  double value    = 0;  // x_j0
  double r_o      = 0;  // f_j-
  double s_o      = 0;  // f_j+
  std::vector<straddle_term_t> integer_terms;  // NB(x); integral a_i omitted
  std::vector<std::pair<int, double>> continuous_terms;  // (k, d_jk) for NB(y)

  // The branch as `coefs . x >= rhs` over structural columns.
  std::vector<double> coefs;
  double rhs = 0;

  // constant of the S-B row in translated form: -s_o (up) or -r_o (down)
  double constant() const { return dir == branch_dir_t::up ? -s_o : -r_o; }
};

// Rows whose surplus takes integral values at every MIP-feasible point.
std::vector<char> integral_surplus(const lp_model_t& model, const std::vector<char>& is_integer);

straddle_row_t make_straddle(const dual_simplex_t& node,
                             const mip_problem_t& problem,
                             int j,
                             branch_dir_t dir);

struct straddle_child_t {
  dual_simplex_t lp;
  lp_solution_t sol;
  int z_row = -1;
};

// Copies the node engine, appends the z row and solves under `budget`.
straddle_child_t straddle_child(const dual_simplex_t& node,
                                const mip_problem_t& problem,
                                int j,
                                branch_dir_t dir,
                                const pivot_budget_t& budget);

// One-pivot objective increase for the z branches (up, down).
std::pair<double, double> straddle_single_pivot(const dual_simplex_t& node,
                                                const mip_problem_t& problem,
                                                int j);

// eval_plain with both children built from z branches.
branch_probe_t straddle_probe(const dual_simplex_t& node,
                              const mip_problem_t& problem,
                              int j,
                              const pivot_budget_t& budget,
                              double incumbent_obj,
                              bool keep_children);

/**
 * Removes appended z rows (index >= base_rows) whose surplus is nonbasic.
 * Returns how many went; the engine then restarts from its slack basis.
 */
int drop_nonbasic_z_rows(dual_simplex_t& lp, int base_rows);

}  // namespace ngb
