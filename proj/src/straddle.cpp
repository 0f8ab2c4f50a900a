/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/straddle.hpp>

#include <cmath>

namespace ngb {

namespace {

constexpr double coef_tol = 1e-9;

bool near_integer(double v) { return std::abs(v - std::round(v)) <= coef_tol; }

}  // namespace

std::vector<char> integral_surplus(const lp_model_t& model, const std::vector<char>& is_integer)
{
  std::vector<char> out(model.num_rows, 0);
  for (int r = 0; r < model.num_rows; ++r) {
    bool ok = near_integer(model.rhs[r]);
    auto row = model.row(r);
    for (int c = 0; c < model.num_cols && ok; ++c) {
      if (row[c] == 0.0) { continue; }
      ok = is_integer[c] && near_integer(row[c]);
    }
    out[r] = ok;
  }
  return out;
}

straddle_row_t make_straddle(const dual_simplex_t& node,
                             const mip_problem_t& problem,
                             int j,
                             branch_dir_t dir)
{
  if (j < 0 || j >= node.num_structural() || !problem.is_integer[j]) {
    throw precondition_error("straddle source must be an integer column");
  }
  if (!node.is_basic(j)) { throw precondition_error("straddle source must be basic"); }
  const double xj = node.value(j);
  if (is_integral(xj)) { throw precondition_error("straddle source is integral"); }

  const int n   = node.num_structural();
  const int row = node.basic_row(j);
  const auto& model = node.model();
  auto int_rows     = integral_surplus(model, problem.is_integer);

  straddle_row_t out;
  out.source = j;
  out.dir    = dir;
  out.value  = xj;
  out.r_o    = frac_down(xj);
  out.s_o    = frac_up(xj);

  // z - ceil(x_j0) >= 0, accumulated over structurals; surplus terms expand
  // through s_r = a_r.x - b_r.
  std::vector<double> z(n, 0.0);
  z[j]            = 1.0;
  double constant = 0.0;  // z = coefs.x + constant
  for (int k = 0; k < node.num_vars(); ++k) {
    if (node.is_basic(k)) { continue; }
    const double a = node.tableau(row, k);
    if (std::abs(a) <= coef_tol) { continue; }
    const bool integer_var = k < n ? problem.is_integer[k] != 0 : int_rows[k - n] != 0;
    const double b         = node.value(k);
    if (!integer_var || !near_integer(b)) {
      out.continuous_terms.push_back({k, a});
      continue;
    }
    if (near_integer(a)) { continue; }
    straddle_term_t t;
    t.var      = k;
    t.a        = a;
    t.r        = a - std::floor(a);
    t.s        = std::ceil(a) - a;
    t.bound    = b;
    t.at_upper = node.status(k) == var_status_t::at_upper;
    // at an upper bound the complemented fraction of a is s, so the
    // lower-bound test r <= r_o reads s >= r_o
    t.nb1 = t.at_upper ? t.s >= out.r_o : t.r <= out.r_o;
    out.integer_terms.push_back(t);

    const double q = t.nb1 ? std::floor(a) : std::ceil(a);
    constant -= q * b;
    if (k < n) {
      z[k] += q;
    } else {
      auto coefs = model.row(k - n);
      for (int c = 0; c < n; ++c) { z[c] += q * coefs[c]; }
      constant -= q * model.rhs[k - n];
    }
  }
  for (auto& v : z) {
    if (near_integer(v)) { v = std::round(v); }
  }
  constant = std::round(constant);
  if (dir == branch_dir_t::up) {
    out.coefs = z;
    out.rhs   = std::ceil(xj) - constant;
  } else {
    out.coefs = z;
    for (auto& v : out.coefs) { v = -v; }
    out.rhs = -(std::floor(xj) - constant);
  }
  for (auto& v : out.coefs) {
    if (v == 0.0) { v = 0.0; }  // drop negative zeros
  }
  return out;
}

straddle_child_t straddle_child(const dual_simplex_t& node,
                                const mip_problem_t& problem,
                                int j,
                                branch_dir_t dir,
                                const pivot_budget_t& budget)
{
  auto z = make_straddle(node, problem, j, dir);
  straddle_child_t out{node, {}, -1};
  out.z_row = out.lp.add_row(z.coefs, z.rhs);
  out.sol   = out.lp.solve(budget);
  return out;
}

std::pair<double, double> straddle_single_pivot(const dual_simplex_t& node,
                                                const mip_problem_t& problem,
                                                int j)
{
  double out[2];
  int i = 0;
  for (auto dir : {branch_dir_t::up, branch_dir_t::down}) {
    auto z              = make_straddle(node, problem, j, dir);
    dual_simplex_t copy = node;
    int r               = copy.add_row(z.coefs, z.rhs);
    const int s         = copy.num_structural() + r;
    const int row       = copy.basic_row(s);
    const double infeas = -copy.value(s);
    std::vector<std::pair<int, double>> g;
    for (int k = 0; k < copy.num_vars(); ++k) {
      if (copy.is_basic(k)) { continue; }
      // basic surplus: s = value - sum t_k x_k, written as s + sum g_k x'_k = value
      g.push_back({k, copy.translated_tableau(row, k)});
    }
    out[i++] = infeas > 0 ? single_pivot_value(copy, g, infeas) : 0.0;
  }
  return {out[0], out[1]};
}

branch_probe_t straddle_probe(const dual_simplex_t& node,
                              const mip_problem_t& problem,
                              int j,
                              const pivot_budget_t& budget,
                              double incumbent_obj,
                              bool keep_children)
{
  branch_probe_t out;
  const double xj = node.value(j);
  double obj[2], infeas[2];
  std::vector<fractional_t> frac[2];
  int d = 0;
  for (auto dir : {branch_dir_t::up, branch_dir_t::down}) {
    auto child = straddle_child(node, problem, j, dir, budget);
    out.pivots += child.sol.pivots;
    const bool ok = child.sol.lp_feasible();
    obj[d]        = ok ? child.sol.objective : inf;
    infeas[d]     = ok ? child.sol.infeasibility : 0.0;
    if (ok) { frac[d] = detect_fractional(child.sol.x, problem); }
    if (keep_children) {
      auto& slot = dir == branch_dir_t::up ? out.up : out.down;
      slot.emplace(child_lp_t{std::move(child.lp), std::move(child.sol)});
    }
    ++d;
  }
  out.eval = make_eval(j, node.objective(), frac_up(xj), frac_down(xj), obj[0], obj[1], incumbent_obj);
  out.eval.infeas_up   = infeas[0];
  out.eval.infeas_down = infeas[1];
  out.eval.frac_up     = std::move(frac[0]);
  out.eval.frac_down   = std::move(frac[1]);
  return out;
}

int drop_nonbasic_z_rows(dual_simplex_t& lp, int base_rows)
{
  std::vector<int> rows;
  for (int r = base_rows; r < lp.num_rows(); ++r) {
    if (!lp.is_basic(lp.num_structural() + r)) { rows.push_back(r); }
  }
  lp.remove_rows(rows);
  return static_cast<int>(rows.size());
}

}  // namespace ngb
