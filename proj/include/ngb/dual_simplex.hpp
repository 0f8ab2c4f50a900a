/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/lp_model.hpp>
#include <ngb/types.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ngb {

enum class lp_status_t { optimal, infeasible, cutoff_infeasible, pivot_limit, unbounded };

std::string_view to_string(lp_status_t s);

enum class var_status_t : std::uint8_t { basic, at_lower, at_upper };

// Variables are indexed structurals first, then one surplus per row:
// row r reads a_r.x - s_r = b_r with s_r >= 0.
struct basis_t {
  std::vector<int> head;
  std::vector<var_status_t> status;

  bool operator==(const basis_t&) const = default;
};

struct pivot_budget_t {
  int max_pivots   = 0;  // 0: no cap
  int max_stall    = 0;  // consecutive non-improving pivots, 0: no cap
  double cutoff    = inf;
  double v_lim     = 0;  // stop once the largest violation drops below this, 0: off

  static pivot_budget_t with_cutoff(double c)
  {
    pivot_budget_t b;
    b.cutoff = c;
    return b;
  }
};

struct lp_solution_t {
  lp_status_t status = lp_status_t::infeasible;
  double objective   = inf;  // +inf unless optimal or pivot-limited
  double dual_bound  = -inf;  // objective of the last dual iterate
  std::vector<double> x;
  std::vector<double> slack;
  std::vector<double> reduced_cost;
  basis_t basis;
  double infeasibility = 0;
  double max_violation = 0;
  int pivots           = 0;

  bool lp_feasible() const
  {
    return status == lp_status_t::optimal || status == lp_status_t::pivot_limit;
  }
};

struct lp_settings_t {
  double feasibility_tol = ngb::feasibility_tol;
  double dual_tol        = 1e-9;
  double pivot_tol       = 1e-9;
  double virtual_bound   = 1e6;
  int refactor_interval  = 50;
  int default_max_pivots = 20000;
};

/**
 * Dense bounded dual simplex over a full tableau B^-1 [A | -I].
 *
 * Nonbasic variables sit at a bound. Reported "translated" quantities follow
 * the shift/complement convention: a variable at its upper bound is measured
 * as u - x, which flips the sign of its reduced cost and tableau column.
 * Infinite bounds a nonbasic variable must rest on are replaced by a large
 * virtual bound; an optimum resting on one with nonzero cost is unbounded.
 */
class dual_simplex_t {
 public:
  explicit dual_simplex_t(lp_model_t model, lp_settings_t settings = {});

  const lp_model_t& model() const { return model_; }
  const lp_settings_t& settings() const { return settings_; }
  int num_structural() const { return n_; }
  int num_rows() const { return m_; }
  int num_vars() const { return n_ + m_; }

  double lower(int k) const { return lo_[k]; }
  double upper(int k) const { return hi_[k]; }
  void set_bounds(int j, double lo, double hi);

  void install_basis(const basis_t& b);
  void reset_basis();
  basis_t basis() const;

  // appends `coefs . x >= rhs` with its surplus basic
  int add_row(std::span<const double> coefs, double rhs);
  // drops rows; the remaining rows restart from the slack basis
  void remove_rows(std::span<const int> rows);

  lp_solution_t solve(const pivot_budget_t& budget);
  lp_solution_t solution() const;
  lp_status_t last_status() const { return last_status_; }

  var_status_t status(int k) const { return status_[k]; }
  bool is_basic(int k) const { return pos_[k] >= 0; }
  int basic_row(int k) const { return pos_[k]; }
  int basic_var(int row) const { return head_[row]; }
  bool can_move(int k) const { return lo_[k] < hi_[k]; }
  double value(int k) const { return x_[k]; }
  double reduced_cost(int k) const { return d_[k]; }
  double translated_reduced_cost(int k) const;
  double tableau(int row, int k) const { return t_(row, k); }
  // coefficient of nonbasic k in row `row` after complementing at-upper columns
  double translated_tableau(int row, int k) const;
  double objective() const { return obj_; }
  bool at_virtual_bound(int k) const;
  double max_violation() const;

  // value of the basic variable in `row` minus the violated bound side
  double row_violation(int row) const;

  // reversal support: moves nonbasic k to `new_value` on the given side
  void move_nonbasic(int k, var_status_t side, double new_lo, double new_hi);

 private:
  void build_full_matrix();
  bool refactor();
  void recompute_primal();
  void recompute_objective();
  void make_dual_feasible();
  double nonbasic_value(int k) const;
  int choose_leaving() const;
  int choose_entering(int row, bool increase) const;
  void pivot(int row, int q, bool to_lower);
  bool bounds_crossed() const;

  lp_model_t model_;
  lp_settings_t settings_;
  int n_ = 0;
  int m_ = 0;

  using row_matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  row_matrix full_;  // [A | -I]
  row_matrix t_;     // B^-1 [A | -I]
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<var_status_t> status_;
  double obj_ = 0;
  int since_refactor_ = 0;
  int last_pivots_    = 0;
  lp_status_t last_status_ = lp_status_t::infeasible;
};

// One-shot solve; the basis, if given, seeds the iteration.
lp_solution_t solve(const lp_model_t& model,
                    const std::optional<basis_t>& warm_basis,
                    const pivot_budget_t& budget);

/**
 * Objective increase predicted by a single dual pivot on x_j's row after
 * branching `dir`: smallest eligible |d'_k / a_jk| times f+ or f-.
 * Returns +inf when nothing can enter. Throws when x_j is nonbasic or integral.
 */
double probe_single_pivot(const dual_simplex_t& lp, int j, branch_dir_t dir);

// Same ratio test on an explicit row given in translated coordinates.
double single_pivot_value(const dual_simplex_t& lp,
                          std::span<const std::pair<int, double>> row,
                          double infeasibility);

// Tightens x_j's bound for the branch and returns the imposed bound.
double apply_branch(dual_simplex_t& lp, int j, branch_dir_t dir);

/**
 * Reverses the branch that left x_j nonbasic at a bound. At lower L the
 * domain becomes [antecedent, L-1]; at upper U it becomes [U+1, antecedent].
 * The basic values are shifted by x_j's column and x_j rests on the new
 * opposite side. Returns the new bound.
 */
double apply_reversal_update(dual_simplex_t& lp, int j, double antecedent);

}  // namespace ngb
