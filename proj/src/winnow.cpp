/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/winnow.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ngb {

int winnow_params_t::n0_for(int num_fractional) const
{
  return n0 ? std::min(*n0, num_fractional) : num_fractional;
}

int winnow_params_t::n1_for(int num_fractional) const
{
  int v = n1 ? *n1 : std::max(1, (num_fractional + 3) / 4);
  return std::min(v, n0_for(num_fractional));
}

int winnow_params_t::n2_at(int depth) const
{
  if (n2.empty()) { return 1; }
  return n2[std::min<size_t>(depth, n2.size() - 1)];
}

int winnow_params_t::k2_for(double avg_solve_pivots) const
{
  if (k2) { return *k2; }
  return std::max(1, static_cast<int>(std::ceil(avg_solve_pivots / 6.0)));
}

void winnow_params_t::validate() const
{
  criterion.validate();
  if (n0 && *n0 < 1) { throw precondition_error("n0 must be at least 1"); }
  if (n1 && *n1 < 1) { throw precondition_error("n1 must be at least 1"); }
  if (n0 && n1 && *n1 > *n0) { throw precondition_error("n1 must not exceed n0"); }
  for (size_t d = 0; d < n2.size(); ++d) {
    if (n2[d] < 1) { throw precondition_error("n2 must be at least 1"); }
    if (n1 && n2[d] > *n1) { throw precondition_error("n2 must not exceed n1"); }
  }
  if (k2 && *k2 < 1) { throw precondition_error("k2 must be at least 1"); }
  if (v_lim_multiplier && !(*v_lim_multiplier > 0 && *v_lim_multiplier < 1)) {
    throw precondition_error("v_lim multiplier must lie in (0, 1)");
  }
  for (const auto& v : criterion.voters) {
    if (v.required_flavor() != eval_flavor_t::plain) {
      throw precondition_error("voting criteria must use plain evaluations");
    }
  }
}

const branch_eval_t& winnow_result_t::eval_of(int var) const
{
  for (size_t i = 0; i < f1.size(); ++i) {
    if (f1[i] == var) { return stage2_evals[i]; }
  }
  throw precondition_error("variable was not evaluated in stage 2");
}

std::vector<int> candidate_set(const dual_simplex_t& node,
                               const mip_problem_t& problem,
                               const std::optional<std::vector<int>>& clist,
                               std::span<const int> excluded)
{
  std::vector<int> out;
  for (int j = 0; j < node.num_structural(); ++j) {
    if (!problem.is_integer[j] || is_integral(node.value(j))) { continue; }
    if (clist && std::find(clist->begin(), clist->end(), j) == clist->end()) { continue; }
    if (std::find(excluded.begin(), excluded.end(), j) != excluded.end()) { continue; }
    out.push_back(j);
  }
  return out;
}

std::vector<int> stage0(const dual_simplex_t& node, std::span<const int> f, int n0)
{
  std::vector<int> out(f.begin(), f.end());
  auto dist = [&](int j) { return std::abs(frac_down(node.value(j)) - 0.5); };
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
    double da = dist(a), db = dist(b);
    if (da != db) { return da < db; }
    return a < b;
  });
  out.resize(std::min<size_t>(out.size(), std::max(0, n0)));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<int> top_by(std::span<const branch_eval_t> evals, const criterion_spec_t& spec, int n)
{
  auto order = rank(evals, spec);
  std::vector<int> out;
  for (size_t k = 0; k < order.size() && static_cast<int>(k) < n; ++k) {
    out.push_back(evals[order[k]].var);
  }
  return out;
}

// first signal in index order
std::optional<branch_signal_t> first_signal(std::span<const branch_eval_t> evals)
{
  for (const auto& e : evals) {
    auto s = signal_of(e);
    if (s.kind == signal_t::node_infeasible) { return s; }
  }
  for (const auto& e : evals) {
    auto s = signal_of(e);
    if (s.kind != signal_t::none) { return s; }
  }
  return std::nullopt;
}

}  // namespace

winnow_result_t stage1(const dual_simplex_t& node,
                       const mip_problem_t& problem,
                       const winnow_params_t& params,
                       const winnow_context_t& ctx)
{
  winnow_result_t r;
  r.f = candidate_set(node, problem, params.clist, params.excluded);
  if (r.f.empty()) {
    r.leaf = true;
    return r;
  }
  const int nf = static_cast<int>(r.f.size());
  r.f0         = stage0(node, r.f, params.n0_for(nf));

  for (int j : r.f0) {
    std::pair<double, double> delta;
    if (ctx.stage1_probe) {
      delta = ctx.stage1_probe(node, j);
    } else {
      delta = {probe_single_pivot(node, j, branch_dir_t::up),
               probe_single_pivot(node, j, branch_dir_t::down)};
    }
    const double xj = node.value(j);
    const double x0 = node.objective();
    auto e = make_eval(j, x0, frac_up(xj), frac_down(xj), x0 + delta.first, x0 + delta.second,
                       ctx.incumbent_obj);
    // one pivot cannot see fractional sets or infeasibility sums
    e.flavor = params.criterion.required_flavor();
    r.stage1_evals.push_back(std::move(e));
  }
  r.signal = first_signal(r.stage1_evals);
  if (r.signal) { return r; }
  r.f1 = top_by(r.stage1_evals, params.criterion, params.n1_for(nf));
  std::sort(r.f1.begin(), r.f1.end());
  return r;
}

std::vector<branch_eval_t> flavor_evals(const std::vector<branch_probe_t>& probes,
                                        const dual_simplex_t& node,
                                        const criterion_spec_t& spec,
                                        const eval_weights_t& weights,
                                        const unit_costs_t* parent_unit_costs)
{
  std::vector<branch_eval_t> out;
  const auto flavor = spec.required_flavor();
  if (flavor == eval_flavor_t::plain) {
    for (const auto& p : probes) { out.push_back(p.eval); }
    return out;
  }
  std::vector<double> rc(node.num_structural());
  for (int j = 0; j < node.num_structural(); ++j) { rc[j] = std::abs(node.reduced_cost(j)); }
  unit_costs_t uc(std::move(rc), parent_unit_costs);
  for (const auto& p : probes) { uc.set(p.eval.var, p.eval.uc_up, p.eval.uc_down); }
  for (const auto& p : probes) { out.push_back(eval_weighted(p.eval, flavor, weights, &uc)); }
  return out;
}

void stage2(const dual_simplex_t& node,
            const mip_problem_t& problem,
            const winnow_params_t& params,
            const winnow_context_t& ctx,
            winnow_result_t& r)
{
  if (r.f1.empty()) { throw precondition_error("stage 2 needs a nonempty F1"); }
  r.k2 = params.k2_for(ctx.avg_solve_pivots);
  pivot_budget_t budget;
  budget.max_pivots = r.k2;
  budget.cutoff     = ctx.lp_cutoff;
  r.stage2_probes.clear();
  for (int j : r.f1) {
    branch_probe_t p = ctx.stage2_probe ? ctx.stage2_probe(node, j, budget)
                                        : eval_plain(node, problem, j, budget, ctx.incumbent_obj, false);
    r.probes += 2;
    r.pivots += p.pivots;
    r.stage2_probes.push_back(std::move(p));
  }
  r.stage2_evals = flavor_evals(r.stage2_probes, node, params.criterion, params.weights,
                                ctx.parent_unit_costs);
  r.signal = first_signal(r.stage2_evals);
  if (r.signal) { return; }
  r.f2 = top_by(r.stage2_evals, params.criterion, params.n2_at(ctx.depth));
}

void stage2_from_stage1(const winnow_params_t& params, int depth, winnow_result_t& r)
{
  std::vector<branch_eval_t> kept;
  for (const auto& e : r.stage1_evals) {
    if (std::find(r.f1.begin(), r.f1.end(), e.var) != r.f1.end()) { kept.push_back(e); }
  }
  r.stage2_evals = kept;
  r.f2           = top_by(kept, params.criterion, params.n2_at(depth));
}

winnow_result_t winnow(const dual_simplex_t& node,
                       const mip_problem_t& problem,
                       const winnow_params_t& params,
                       const winnow_context_t& ctx)
{
  auto r = stage1(node, problem, params, ctx);
  if (r.leaf || r.signal) { return r; }
  if (params.skip_stage2) {
    stage2_from_stage1(params, ctx.depth, r);
  } else {
    stage2(node, problem, params, ctx, r);
  }
  return r;
}

double v_lim_for(std::span<const double> x, const mip_problem_t& problem, double m)
{
  double best = 0;
  for (const auto& f : detect_fractional(x, problem)) { best = std::max(best, std::min(f.f_up, f.f_down)); }
  return m * best;
}

}  // namespace ngb
