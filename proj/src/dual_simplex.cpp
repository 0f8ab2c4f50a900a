/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/dual_simplex.hpp>
#include <ngb/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace ngb {

std::string_view to_string(lp_status_t s)
{
  switch (s) {
    case lp_status_t::optimal: return "optimal";
    case lp_status_t::infeasible: return "infeasible";
    case lp_status_t::cutoff_infeasible: return "cutoff_infeasible";
    case lp_status_t::pivot_limit: return "pivot_limit";
    case lp_status_t::unbounded: return "unbounded";
  }
  return "unknown";
}

dual_simplex_t::dual_simplex_t(lp_model_t model, lp_settings_t settings)
  : model_(std::move(model)), settings_(settings)
{
  model_.validate();
  n_ = model_.num_cols;
  m_ = model_.num_rows;
  build_full_matrix();
  cost_.assign(n_ + m_, 0.0);
  std::copy(model_.objective.begin(), model_.objective.end(), cost_.begin());
  lo_.resize(n_ + m_);
  hi_.resize(n_ + m_);
  for (int j = 0; j < n_; ++j) {
    lo_[j] = model_.lower[j];
    hi_[j] = model_.upper[j];
  }
  for (int r = 0; r < m_; ++r) {
    lo_[n_ + r] = 0.0;
    hi_[n_ + r] = inf;
  }
  reset_basis();
}

void dual_simplex_t::build_full_matrix()
{
  full_.setZero(m_, n_ + m_);
  for (int r = 0; r < m_; ++r) {
    for (int j = 0; j < n_; ++j) { full_(r, j) = model_.coef(r, j); }
    full_(r, n_ + r) = -1.0;
  }
}

double dual_simplex_t::nonbasic_value(int k) const
{
  if (status_[k] == var_status_t::at_upper) {
    return std::isfinite(hi_[k]) ? hi_[k] : settings_.virtual_bound;
  }
  return std::isfinite(lo_[k]) ? lo_[k] : -settings_.virtual_bound;
}

bool dual_simplex_t::at_virtual_bound(int k) const
{
  if (status_[k] == var_status_t::basic) { return false; }
  return status_[k] == var_status_t::at_upper ? !std::isfinite(hi_[k]) : !std::isfinite(lo_[k]);
}

double dual_simplex_t::translated_reduced_cost(int k) const
{
  return status_[k] == var_status_t::at_upper ? -d_[k] : d_[k];
}

double dual_simplex_t::translated_tableau(int row, int k) const
{
  return status_[k] == var_status_t::at_upper ? -t_(row, k) : t_(row, k);
}

void dual_simplex_t::reset_basis()
{
  const int nv = n_ + m_;
  head_.resize(m_);
  pos_.assign(nv, -1);
  status_.assign(nv, var_status_t::at_lower);
  for (int j = 0; j < n_; ++j) {
    // cheapest finite side first; make_dual_feasible settles the rest
    if (!std::isfinite(lo_[j]) && std::isfinite(hi_[j])) { status_[j] = var_status_t::at_upper; }
  }
  for (int r = 0; r < m_; ++r) {
    head_[r]       = n_ + r;
    pos_[n_ + r]   = r;
    status_[n_ + r] = var_status_t::basic;
  }
  if (!refactor()) { throw numeric_error("slack basis is singular"); }
}

basis_t dual_simplex_t::basis() const { return basis_t{head_, status_}; }

void dual_simplex_t::install_basis(const basis_t& b)
{
  const int nv = n_ + m_;
  if (static_cast<int>(b.head.size()) != m_ || static_cast<int>(b.status.size()) != nv) {
    throw model_error("basis dimensions do not match the model");
  }
  std::vector<int> pos(nv, -1);
  for (int r = 0; r < m_; ++r) {
    int k = b.head[r];
    if (k < 0 || k >= nv || pos[k] >= 0 || b.status[k] != var_status_t::basic) {
      throw model_error("basis head is inconsistent with its status vector");
    }
    pos[k] = r;
  }
  head_   = b.head;
  pos_    = std::move(pos);
  status_ = b.status;
  for (int k = 0; k < nv; ++k) {
    if (pos_[k] < 0 && status_[k] == var_status_t::basic) { status_[k] = var_status_t::at_lower; }
  }
  if (!refactor()) { reset_basis(); }
}

bool dual_simplex_t::refactor()
{
  const int nv = n_ + m_;
  since_refactor_ = 0;
  if (m_ == 0) {
    t_.resize(0, nv);
    d_.assign(cost_.begin(), cost_.end());
    recompute_primal();
    return true;
  }
  Eigen::MatrixXd b(m_, m_);
  for (int r = 0; r < m_; ++r) { b.col(r) = full_.col(head_[r]); }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  if (!(lu.rcond() > 1e-13)) { return false; }
  t_ = lu.solve(Eigen::MatrixXd(full_));
  d_.assign(nv, 0.0);
  for (int k = 0; k < nv; ++k) {
    if (pos_[k] >= 0) { continue; }
    double s = cost_[k];
    for (int r = 0; r < m_; ++r) { s -= cost_[head_[r]] * t_(r, k); }
    d_[k] = s;
  }
  recompute_primal();
  return true;
}

void dual_simplex_t::recompute_primal()
{
  const int nv = n_ + m_;
  x_.assign(nv, 0.0);
  Eigen::VectorXd rhs(m_);
  for (int r = 0; r < m_; ++r) { rhs(r) = model_.rhs[r]; }
  for (int k = 0; k < nv; ++k) {
    if (pos_[k] >= 0) { continue; }
    x_[k] = nonbasic_value(k);
    if (x_[k] != 0.0) { rhs -= full_.col(k) * x_[k]; }
  }
  if (m_ > 0) {
    Eigen::MatrixXd b(m_, m_);
    for (int r = 0; r < m_; ++r) { b.col(r) = full_.col(head_[r]); }
    Eigen::VectorXd xb = b.partialPivLu().solve(rhs);
    for (int r = 0; r < m_; ++r) { x_[head_[r]] = xb(r); }
  }
  recompute_objective();
}

void dual_simplex_t::recompute_objective()
{
  double s = model_.objective_offset;
  for (int j = 0; j < n_; ++j) { s += cost_[j] * x_[j]; }
  obj_ = s;
}

void dual_simplex_t::make_dual_feasible()
{
  bool moved = false;
  const double tol = settings_.dual_tol;
  for (int k = 0; k < n_ + m_; ++k) {
    if (pos_[k] >= 0 || !can_move(k)) { continue; }
    if (status_[k] == var_status_t::at_lower && d_[k] < -tol) {
      status_[k] = var_status_t::at_upper;
      moved      = true;
    } else if (status_[k] == var_status_t::at_upper && d_[k] > tol) {
      status_[k] = var_status_t::at_lower;
      moved      = true;
    }
  }
  if (moved) { recompute_primal(); }
}

void dual_simplex_t::set_bounds(int j, double lo, double hi)
{
  if (j < 0 || j >= n_) { throw model_error("bound change on unknown column " + std::to_string(j)); }
  lo_[j] = lo;
  hi_[j] = hi;
  if (pos_[j] >= 0) { return; }
  double old = x_[j];
  double now = nonbasic_value(j);
  double dx  = now - old;
  if (dx == 0.0 || !std::isfinite(dx)) {
    if (!std::isfinite(dx)) { recompute_primal(); }
    return;
  }
  x_[j] = now;
  for (int r = 0; r < m_; ++r) { x_[head_[r]] -= t_(r, j) * dx; }
  obj_ += d_[j] * dx;
}

void dual_simplex_t::move_nonbasic(int k, var_status_t side, double new_lo, double new_hi)
{
  if (pos_[k] >= 0) { throw precondition_error("variable is basic"); }
  lo_[k]     = new_lo;
  hi_[k]     = new_hi;
  status_[k] = side;
  double dx  = nonbasic_value(k) - x_[k];
  x_[k] += dx;
  for (int r = 0; r < m_; ++r) { x_[head_[r]] -= t_(r, k) * dx; }
  obj_ += d_[k] * dx;
}

int dual_simplex_t::add_row(std::span<const double> coefs, double rhs)
{
  basis_t old = basis();
  model_.add_row(coefs, rhs);
  m_ = model_.num_rows;
  build_full_matrix();
  cost_.push_back(0.0);
  lo_.push_back(0.0);
  hi_.push_back(inf);
  basis_t b;
  b.head   = old.head;
  b.status = old.status;
  b.head.push_back(n_ + m_ - 1);
  b.status.push_back(var_status_t::basic);
  install_basis(b);
  return m_ - 1;
}

void dual_simplex_t::remove_rows(std::span<const int> rows)
{
  if (rows.empty()) { return; }
  std::vector<char> drop(m_, 0);
  for (int r : rows) { drop.at(r) = 1; }
  std::vector<double> lo(lo_.begin(), lo_.begin() + n_);
  std::vector<double> hi(hi_.begin(), hi_.begin() + n_);
  model_.remove_rows(rows);
  m_ = model_.num_rows;
  build_full_matrix();
  cost_.resize(n_ + m_);
  std::fill(cost_.begin() + n_, cost_.end(), 0.0);
  lo_ = lo;
  hi_ = hi;
  lo_.resize(n_ + m_, 0.0);
  hi_.resize(n_ + m_, inf);
  reset_basis();
}

bool dual_simplex_t::bounds_crossed() const
{
  for (int k = 0; k < n_; ++k) {
    if (lo_[k] > hi_[k] + settings_.feasibility_tol) { return true; }
  }
  return false;
}

double dual_simplex_t::row_violation(int row) const
{
  int k    = head_[row];
  double v = x_[k];
  if (v < lo_[k]) { return lo_[k] - v; }
  if (v > hi_[k]) { return v - hi_[k]; }
  return 0.0;
}

double dual_simplex_t::max_violation() const
{
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) { worst = std::max(worst, row_violation(r)); }
  return worst;
}

int dual_simplex_t::choose_leaving() const
{
  int best      = -1;
  double viol   = settings_.feasibility_tol;
  int best_var  = 0;
  for (int r = 0; r < m_; ++r) {
    double v = row_violation(r);
    if (v > viol || (best >= 0 && v == viol && head_[r] < best_var)) {
      best     = r;
      viol     = v;
      best_var = head_[r];
    }
  }
  return best;
}

int dual_simplex_t::choose_entering(int row, bool increase) const
{
  int best        = -1;
  double best_rat = inf;
  const double tie = 1e-12;
  for (int k = 0; k < n_ + m_; ++k) {
    if (pos_[k] >= 0 || !can_move(k)) { continue; }
    double alpha = t_(row, k);
    if (std::abs(alpha) <= settings_.pivot_tol) { continue; }
    // x_row moves by -alpha per unit increase of x_k
    bool up_k = status_[k] == var_status_t::at_lower;
    bool ok   = increase ? (up_k ? alpha < 0 : alpha > 0) : (up_k ? alpha > 0 : alpha < 0);
    if (!ok) { continue; }
    double ratio = std::max(translated_reduced_cost(k), 0.0) / std::abs(alpha);
    if (ratio < best_rat - tie) {
      best_rat = ratio;
      best     = k;
    }
  }
  return best;
}

void dual_simplex_t::pivot(int row, int q, bool to_lower)
{
  const int p     = head_[row];
  const double a  = t_(row, q);
  const double tv = to_lower ? lo_[p] : hi_[p];
  const double dq = (x_[p] - tv) / a;

  for (int r = 0; r < m_; ++r) {
    if (r != row) { x_[head_[r]] -= t_(r, q) * dq; }
  }
  x_[q] += dq;
  x_[p] = tv;
  obj_ += d_[q] * dq;

  const double dq_cost = d_[q];
  t_.row(row) /= a;
  for (int r = 0; r < m_; ++r) {
    if (r == row) { continue; }
    double f = t_(r, q);
    if (f != 0.0) { t_.row(r) -= f * t_.row(row); }
  }
  for (int k = 0; k < n_ + m_; ++k) { d_[k] -= dq_cost * t_(row, k); }
  d_[q] = 0.0;

  head_[row] = q;
  pos_[q]    = row;
  pos_[p]    = -1;
  status_[q] = var_status_t::basic;
  status_[p] = to_lower ? var_status_t::at_lower : var_status_t::at_upper;
  ++since_refactor_;
}

lp_solution_t dual_simplex_t::solve(const pivot_budget_t& budget)
{
  int pivots = 0;
  int stall  = 0;
  const int cap = budget.max_pivots > 0 ? budget.max_pivots : settings_.default_max_pivots;
  auto finish = [&](lp_status_t s) {
    last_status_ = s;
    last_pivots_ = pivots;
    return solution();
  };

  if (bounds_crossed()) { return finish(lp_status_t::infeasible); }
  if (budget.cutoff == -inf) { return finish(lp_status_t::cutoff_infeasible); }
  if (since_refactor_ > 0 && !refactor()) { reset_basis(); }
  make_dual_feasible();

  for (;;) {
    bool virtual_active = false;
    for (int k = 0; k < n_ + m_ && !virtual_active; ++k) {
      virtual_active = at_virtual_bound(k) && std::abs(d_[k]) > settings_.dual_tol;
    }
    if (!virtual_active && obj_ >= budget.cutoff) { return finish(lp_status_t::cutoff_infeasible); }

    int row = choose_leaving();
    if (row < 0) {
      return finish(virtual_active ? lp_status_t::unbounded : lp_status_t::optimal);
    }
    if (budget.v_lim > 0 && !virtual_active && max_violation() < budget.v_lim) {
      return finish(lp_status_t::pivot_limit);
    }
    if (pivots >= cap) { return finish(lp_status_t::pivot_limit); }
    if (budget.max_stall > 0 && stall >= budget.max_stall) {
      return finish(lp_status_t::pivot_limit);
    }

    int p         = head_[row];
    bool increase = x_[p] < lo_[p];
    int q         = choose_entering(row, increase);
    if (q < 0) { return finish(lp_status_t::infeasible); }

    double before = obj_;
    pivot(row, q, increase);
    ++pivots;
    stall = obj_ > before + 1e-12 * (1.0 + std::abs(before)) ? 0 : stall + 1;

    if (since_refactor_ >= settings_.refactor_interval) {
      if (!refactor()) { throw numeric_error("basis became singular during the solve"); }
      make_dual_feasible();
    }
  }
}

lp_solution_t dual_simplex_t::solution() const
{
  lp_solution_t s;
  s.status     = last_status_;
  s.pivots     = last_pivots_;
  s.dual_bound = obj_;
  s.objective  = (s.status == lp_status_t::optimal || s.status == lp_status_t::pivot_limit) ? obj_ : inf;
  if (s.status == lp_status_t::unbounded) { s.objective = -inf; }
  s.x.assign(x_.begin(), x_.begin() + n_);
  s.slack.assign(x_.begin() + n_, x_.end());
  s.reduced_cost = d_;
  for (int r = 0; r < m_; ++r) { s.reduced_cost[head_[r]] = 0.0; }
  s.basis = basis();
  double sum = 0.0;
  for (int r = 0; r < m_; ++r) { sum += row_violation(r); }
  s.infeasibility = sum;
  s.max_violation = max_violation();
  return s;
}

lp_solution_t solve(const lp_model_t& model,
                    const std::optional<basis_t>& warm_basis,
                    const pivot_budget_t& budget)
{
  dual_simplex_t lp(model);
  if (warm_basis) { lp.install_basis(*warm_basis); }
  return lp.solve(budget);
}

double single_pivot_value(const dual_simplex_t& lp,
                          std::span<const std::pair<int, double>> row,
                          double infeasibility)
{
  // row: translated coefficients g_k in z + sum g_k x'_k = -infeasibility;
  // z must rise, so only negative g_k can enter
  double best = inf;
  for (auto [k, g] : row) {
    if (lp.is_basic(k) || !lp.can_move(k)) { continue; }
    if (g >= -lp.settings().pivot_tol) { continue; }
    double ratio = std::max(lp.translated_reduced_cost(k), 0.0) / -g;
    best         = std::min(best, ratio);
  }
  return best * infeasibility;
}

double probe_single_pivot(const dual_simplex_t& lp, int j, branch_dir_t dir)
{
  if (j < 0 || j >= lp.num_vars()) { throw precondition_error("probe on unknown variable"); }
  if (!lp.is_basic(j)) { throw precondition_error("probe variable is nonbasic"); }
  const double xj = lp.value(j);
  if (is_integral(xj)) { throw precondition_error("probe variable is integral"); }
  const int row = lp.basic_row(j);
  const bool up = dir == branch_dir_t::up;
  const double f = up ? frac_up(xj) : frac_down(xj);

  double best = inf;
  for (int k = 0; k < lp.num_vars(); ++k) {
    if (lp.is_basic(k) || !lp.can_move(k)) { continue; }
    double alpha = lp.tableau(row, k);
    if (std::abs(alpha) <= lp.settings().pivot_tol) { continue; }
    // signed ratio d'_k / alpha: up wants it negative at lower, positive at upper
    double ratio = lp.translated_reduced_cost(k) / alpha;
    bool at_lower = lp.status(k) == var_status_t::at_lower;
    bool eligible = up == at_lower ? alpha < 0 : alpha > 0;
    if (!eligible) { continue; }
    best = std::min(best, std::max(std::abs(ratio), 0.0));
  }
  return best * f;
}

double apply_branch(dual_simplex_t& lp, int j, branch_dir_t dir)
{
  const double xj = lp.value(j);
  if (is_integral(xj)) { throw precondition_error("branch variable is integral"); }
  if (dir == branch_dir_t::up) {
    double b = std::ceil(xj);
    lp.set_bounds(j, std::max(b, lp.lower(j)), lp.upper(j));
    return b;
  }
  double b = std::floor(xj);
  lp.set_bounds(j, lp.lower(j), std::min(b, lp.upper(j)));
  return b;
}

double apply_reversal_update(dual_simplex_t& lp, int j, double antecedent)
{
  if (lp.is_basic(j)) { throw precondition_error("reversal variable is basic"); }
  if (lp.status(j) == var_status_t::at_lower) {
    double b = lp.lower(j) - 1.0;
    lp.move_nonbasic(j, var_status_t::at_upper, antecedent, b);
    return b;
  }
  double b = lp.upper(j) + 1.0;
  lp.move_nonbasic(j, var_status_t::at_lower, b, antecedent);
  return b;
}

}  // namespace ngb
