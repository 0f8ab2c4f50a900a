/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/mip.hpp>

#include <algorithm>
#include <cmath>

namespace ngb {

int mip_problem_t::num_integer() const
{
  return static_cast<int>(std::count(is_integer.begin(), is_integer.end(), 1));
}

void mip_problem_t::tighten_integer_bounds()
{
  for (int j = 0; j < lp.num_cols; ++j) {
    if (!is_integer[j]) { continue; }
    if (std::isfinite(lp.lower[j])) { lp.lower[j] = std::ceil(lp.lower[j] - integrality_tol); }
    if (std::isfinite(lp.upper[j])) { lp.upper[j] = std::floor(lp.upper[j] + integrality_tol); }
  }
}

void mip_problem_t::validate() const
{
  lp.validate();
  if (static_cast<int>(is_integer.size()) != lp.num_cols) {
    throw model_error("integrality flags do not match column count");
  }
}

std::vector<fractional_t> detect_fractional(std::span<const double> x, const mip_problem_t& problem)
{
  std::vector<fractional_t> f;
  for (int j = 0; j < problem.lp.num_cols; ++j) {
    if (!problem.is_integer[j] || is_integral(x[j])) { continue; }
    f.push_back({j, x[j], frac_up(x[j]), frac_down(x[j])});
  }
  return f;
}

bool is_mip_feasible(std::span<const double> x, const mip_problem_t& problem, double tol)
{
  if (static_cast<int>(x.size()) != problem.lp.num_cols) { return false; }
  for (int j = 0; j < problem.lp.num_cols; ++j) {
    if (problem.is_integer[j] && !is_integral(x[j], tol)) { return false; }
  }
  return problem.lp.max_violation(x) <= tol;
}

incumbent_update_t update_incumbent(incumbent_t& inc,
                                    const mip_problem_t& problem,
                                    std::span<const double> x,
                                    int depth,
                                    int node)
{
  if (!is_mip_feasible(x, problem)) { throw precondition_error("candidate is not MIP feasible"); }
  incumbent_update_t out;
  double obj = problem.lp.evaluate(x);
  if (!inc.improves(obj)) { return out; }
  inc.x.assign(x.begin(), x.end());
  for (int j = 0; j < problem.lp.num_cols; ++j) {
    if (problem.is_integer[j]) { inc.x[j] = std::round(inc.x[j]); }
  }
  inc.objective       = problem.lp.evaluate(inc.x);
  inc.depth           = depth;
  inc.node            = node;
  out.updated         = true;
  out.prune_threshold = inc.cutoff();
  return out;
}

node_state_t node_state_t::root(const mip_problem_t& problem)
{
  node_state_t n;
  n.lower = problem.lp.lower;
  n.upper = problem.lp.upper;
  return n;
}

bool node_state_t::bounds_consistent() const
{
  for (size_t j = 0; j < lower.size(); ++j) {
    if (lower[j] > upper[j]) { return false; }
  }
  return true;
}

void node_state_t::absorb(const bound_change_t& change)
{
  implied.push_back(change);
  lower[change.var] = std::max(lower[change.var], change.lower);
  upper[change.var] = std::min(upper[change.var], change.upper);
}

node_state_t make_child(const node_state_t& parent, int id, int var, branch_dir_t dir, double value)
{
  if (is_integral(value)) { throw precondition_error("branch on an integral value"); }
  node_state_t c;
  c.id      = id;
  c.parent  = parent.id;
  c.depth   = parent.depth + 1;
  c.lower   = parent.lower;
  c.upper   = parent.upper;
  c.implied = parent.implied;
  branch_t b{var, dir, 0.0};
  if (dir == branch_dir_t::up) {
    b.bound      = std::ceil(value);
    c.lower[var] = std::max(c.lower[var], b.bound);
  } else {
    b.bound      = std::floor(value);
    c.upper[var] = std::min(c.upper[var], b.bound);
  }
  c.branch = b;
  return c;
}

}  // namespace ngb
