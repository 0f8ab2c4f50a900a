/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/criteria.hpp>
#include <ngb/errors.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ngb {

namespace {

constexpr double uc_epsilon = 1e-9;

double unit_cost(double delta, double f)
{
  if (!std::isfinite(delta)) { return inf; }
  return std::max(delta, uc_epsilon) / f;
}

double nan_to_low(double v, bool minimize)
{
  if (std::isnan(v)) { return minimize ? inf : -inf; }
  return v;
}

}  // namespace

std::string_view to_string(criterion_t c)
{
  switch (c) {
    case criterion_t::c0_convex: return "C0";
    case criterion_t::c1_product: return "C1";
    case criterion_t::c2a: return "C2a";
    case criterion_t::c2b: return "C2b";
    case criterion_t::c3_threshold: return "C3";
    case criterion_t::c4: return "C4";
    case criterion_t::c5: return "C5";
    case criterion_t::c6: return "C6";
    case criterion_t::c7: return "C7";
    case criterion_t::vote: return "vote";
  }
  return "?";
}

std::optional<criterion_t> criterion_from_string(std::string_view s)
{
  for (auto c : {criterion_t::c0_convex, criterion_t::c1_product, criterion_t::c2a, criterion_t::c2b,
                 criterion_t::c3_threshold, criterion_t::c4, criterion_t::c5, criterion_t::c6,
                 criterion_t::c7, criterion_t::vote}) {
    if (to_string(c) == s) { return c; }
  }
  return std::nullopt;
}

branch_eval_t make_eval(int var, double parent_obj, double f_up, double f_down,
                        double obj_up, double obj_down, double incumbent_obj)
{
  branch_eval_t e;
  e.var             = var;
  e.parent_obj      = parent_obj;
  e.f_up            = f_up;
  e.f_down          = f_down;
  e.infeasible_up   = !std::isfinite(obj_up);
  e.infeasible_down = !std::isfinite(obj_down);
  // a missing child is scored as if it reached the incumbent value
  e.obj_up    = e.infeasible_up ? incumbent_obj : obj_up;
  e.obj_down  = e.infeasible_down ? incumbent_obj : obj_down;
  e.eval_up   = e.obj_up - parent_obj;
  e.eval_down = e.obj_down - parent_obj;
  e.uc_up     = unit_cost(e.eval_up, f_up);
  e.uc_down   = unit_cost(e.eval_down, f_down);
  return e;
}

criterion_spec_t criterion_spec_t::of(criterion_t id)
{
  criterion_spec_t s;
  s.id = id;
  if (id == criterion_t::c5) { s.p = 0.3; }
  if (id == criterion_t::vote) {
    s.voters = {of(criterion_t::c1_product), of(criterion_t::c4), of(criterion_t::c5)};
  }
  return s;
}

eval_flavor_t criterion_spec_t::required_flavor() const
{
  if (id == criterion_t::c6) { return eval_flavor_t::d1d2; }
  if (id == criterion_t::c7) { return eval_flavor_t::d3d4; }
  return eval_flavor_t::plain;
}

void criterion_spec_t::validate() const
{
  if (!(p >= 0)) { throw precondition_error("criterion exponent must be nonnegative"); }
  if (!(lambda >= 0 && lambda <= 1)) { throw precondition_error("lambda must lie in [0, 1]"); }
  if (!(mu >= 0 && mu <= 1)) { throw precondition_error("mu must lie in [0, 1]"); }
  if (!(w1 >= 0 && w2 >= 0)) { throw precondition_error("weights must be nonnegative"); }
  if (id == criterion_t::vote && voters.size() < 2) {
    throw precondition_error("vote needs at least two criteria");
  }
}

std::vector<double> score(std::span<const branch_eval_t> evals, const criterion_spec_t& spec)
{
  const double z = spec.zero_substitute;
  auto term = [z](double v) { return v <= z ? z : v; };
  auto power = [&](double base) {
    if (spec.p == 0.0) { return 1.0; }
    return std::pow(term(base), spec.p);
  };

  std::vector<double> out(evals.size());
  double min_min = inf;
  double max_min = -inf;
  for (const auto& e : evals) {
    min_min = std::min(min_min, e.min());
    max_min = std::max(max_min, e.min());
  }
  const double threshold = min_min + spec.lambda * (max_min - min_min);

  for (size_t i = 0; i < evals.size(); ++i) {
    const auto& e = evals[i];
    double s      = 0.0;
    switch (spec.id) {
      case criterion_t::c0_convex: s = spec.mu * e.max() + (1.0 - spec.mu) * e.min(); break;
      case criterion_t::c1_product: s = term(e.eval_up) * term(e.eval_down); break;
      case criterion_t::c2a:
        s = term(e.eval_up) * term(e.eval_down) * (spec.max_power_variant ? power(e.max()) : power(e.spread()));
        break;
      case criterion_t::c2b:
        s = term(e.min()) * (spec.max_power_variant ? power(e.max()) : power(e.spread()));
        break;
      case criterion_t::c3_threshold: s = e.min() >= threshold ? e.spread() : -inf; break;
      case criterion_t::c4: s = term(e.max()) * term(e.spread()); break;
      case criterion_t::c5: s = power(e.min()) * (e.eval_up + e.eval_down); break;
      case criterion_t::c6:
      case criterion_t::c7: s = e.min(); break;
      case criterion_t::vote: s = 0.0; break;
    }
    out[i] = s;
  }
  return out;
}

std::vector<size_t> rank(std::span<const branch_eval_t> evals, const criterion_spec_t& spec)
{
  std::vector<size_t> order(evals.size());
  std::iota(order.begin(), order.end(), 0);
  if (spec.id == criterion_t::vote) {
    std::map<int, int> votes;
    for (const auto& v : spec.voters) { ++votes[evals[select(evals, v).index].var]; }
    auto first = rank(evals, spec.voters.front());
    std::vector<size_t> pos(evals.size());
    for (size_t k = 0; k < first.size(); ++k) { pos[first[k]] = k; }
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      int va = votes.count(evals[a].var) ? votes[evals[a].var] : 0;
      int vb = votes.count(evals[b].var) ? votes[evals[b].var] : 0;
      if (va != vb) { return va > vb; }
      return pos[a] < pos[b];
    });
    return order;
  }
  if (spec.required_flavor() != eval_flavor_t::plain) {
    for (const auto& e : evals) {
      if (e.flavor != spec.required_flavor()) {
        throw precondition_error(std::string(to_string(spec.id)) + " needs matching weighted evaluations");
      }
    }
  }
  auto s        = score(evals, spec);
  bool minimize = spec.minimizes();
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    double sa = nan_to_low(s[a], minimize);
    double sb = nan_to_low(s[b], minimize);
    if (sa != sb) { return minimize ? sa < sb : sa > sb; }
    if (spec.id == criterion_t::c3_threshold && sa == -inf) {
      // ineligible tail ordered by Min, so an empty eligible set yields MaxMin
      if (evals[a].min() != evals[b].min()) { return evals[a].min() > evals[b].min(); }
    }
    return evals[a].var < evals[b].var;
  });
  return order;
}

selection_t select(std::span<const branch_eval_t> evals, const criterion_spec_t& spec)
{
  if (evals.empty()) { throw precondition_error("selection over an empty candidate list"); }
  if (spec.id == criterion_t::vote) { return vote(evals, spec.voters); }
  auto order = rank(evals, spec);
  selection_t out;
  out.index  = order.front();
  out.var    = evals[out.index].var;
  out.dir    = evals[out.index].preferred();
  out.scores = score(evals, spec);
  return out;
}

selection_t vote(std::span<const branch_eval_t> evals, std::span<const criterion_spec_t> specs)
{
  if (specs.size() < 2) { throw precondition_error("vote needs at least two criteria"); }
  std::map<int, int> count;
  std::vector<selection_t> picks;
  for (const auto& s : specs) {
    picks.push_back(select(evals, s));
    ++count[picks.back().var];
  }
  int best = -1;
  int most = 0;
  for (auto [var, c] : count) {
    if (c > most) {  // map order makes ties go to the lowest index
      most = c;
      best = var;
    }
  }
  int ups = 0, downs = 0;
  for (const auto& p : picks) {
    if (p.var != best) { continue; }
    (p.dir == branch_dir_t::up ? ups : downs)++;
  }
  selection_t out;
  for (size_t i = 0; i < evals.size(); ++i) {
    if (evals[i].var == best) { out.index = i; }
  }
  out.var = best;
  if (ups != downs) {
    out.dir = ups > downs ? branch_dir_t::up : branch_dir_t::down;
  } else {
    out.dir = evals[out.index].preferred();
  }
  out.scores.assign(evals.size(), 0.0);
  for (size_t i = 0; i < evals.size(); ++i) {
    if (count.count(evals[i].var)) { out.scores[i] = count[evals[i].var]; }
  }
  return out;
}

bool unit_costs_t::has(int var) const
{
  return table_.count(var) || (parent_ && parent_->has(var));
}

std::pair<double, double> unit_costs_t::get(int var) const
{
  if (auto it = table_.find(var); it != table_.end()) { return it->second; }
  if (parent_ && parent_->has(var)) { return parent_->get(var); }
  double rc = var < static_cast<int>(rc_.size()) ? rc_[var] : 0.0;
  rc        = std::max(rc, uc_epsilon);
  return {rc, rc};
}

branch_eval_t eval_weighted(const branch_eval_t& base,
                            eval_flavor_t flavor,
                            const eval_weights_t& weights,
                            const unit_costs_t* unit_costs)
{
  branch_eval_t e = base;
  e.flavor        = flavor;
  if (flavor == eval_flavor_t::plain) { return e; }
  if (flavor == eval_flavor_t::d3d4 && !unit_costs) {
    throw precondition_error("MinCost evaluation needs unit costs");
  }
  auto extra = [&](const std::vector<fractional_t>& frac) {
    std::vector<double> terms;
    for (const auto& f : frac) {
      if (flavor == eval_flavor_t::d1d2) {
        terms.push_back(std::min(f.f_up, f.f_down));
      } else {
        auto [up, down] = unit_costs->get(f.var);
        terms.push_back(std::min(up * f.f_up, down * f.f_down));
      }
    }
    if (weights.top_k && static_cast<int>(terms.size()) > *weights.top_k) {
      std::sort(terms.begin(), terms.end(), std::greater<>());
      terms.resize(*weights.top_k);
    }
    double s = 0.0;
    for (double t : terms) { s += t; }
    return s;
  };
  if (!e.infeasible_up) {
    e.eval_up = (e.obj_up - e.parent_obj) + weights.w1 * extra(e.frac_up) + weights.w2 * e.infeas_up;
  }
  if (!e.infeasible_down) {
    e.eval_down =
      (e.obj_down - e.parent_obj) + weights.w1 * extra(e.frac_down) + weights.w2 * e.infeas_down;
  }
  return e;
}

branch_signal_t signal_of(const branch_eval_t& e)
{
  branch_signal_t s;
  s.var = e.var;
  if (e.infeasible_up && e.infeasible_down) {
    s.kind = signal_t::node_infeasible;
  } else if (e.infeasible_up) {
    s.kind   = signal_t::compulsory;
    s.forced = branch_dir_t::down;
  } else if (e.infeasible_down) {
    s.kind   = signal_t::compulsory;
    s.forced = branch_dir_t::up;
  }
  return s;
}

branch_probe_t eval_plain(const dual_simplex_t& node,
                          const mip_problem_t& problem,
                          int j,
                          const pivot_budget_t& budget,
                          double incumbent_obj,
                          bool keep_children)
{
  const double xj = node.value(j);
  if (!problem.is_integer[j] || is_integral(xj)) {
    throw precondition_error("candidate is not fractional");
  }
  branch_probe_t out;
  double obj[2];
  double infeas[2];
  std::vector<fractional_t> frac[2];
  int d = 0;
  for (auto dir : {branch_dir_t::up, branch_dir_t::down}) {
    dual_simplex_t child = node;
    apply_branch(child, j, dir);
    auto sol = child.solve(budget);
    out.pivots += sol.pivots;
    obj[d]    = sol.lp_feasible() ? sol.objective : inf;
    infeas[d] = sol.lp_feasible() ? sol.infeasibility : 0.0;
    if (sol.lp_feasible()) { frac[d] = detect_fractional(sol.x, problem); }
    if (keep_children) {
      auto& slot = dir == branch_dir_t::up ? out.up : out.down;
      slot.emplace(child_lp_t{std::move(child), std::move(sol)});
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

}  // namespace ngb
