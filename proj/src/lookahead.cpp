/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/lookahead.hpp>
#include <ngb/straddle.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ngb {

std::string_view to_string(post_winnow_t m)
{
  switch (m) {
    case post_winnow_t::off: return "off";
    case post_winnow_t::keep_pairs: return "2a";
    case post_winnow_t::best_sibling: return "2b";
    case post_winnow_t::single_stream: return "2c";
  }
  return "?";
}

std::optional<post_winnow_t> post_winnow_from_string(std::string_view s)
{
  for (auto m : {post_winnow_t::off, post_winnow_t::keep_pairs, post_winnow_t::best_sibling,
                 post_winnow_t::single_stream}) {
    if (to_string(m) == s) { return m; }
  }
  return std::nullopt;
}

std::string_view to_string(tree_node_status_t s)
{
  switch (s) {
    case tree_node_status_t::open: return "open";
    case tree_node_status_t::expanded: return "expanded";
    case tree_node_status_t::leaf: return "leaf";
    case tree_node_status_t::terminal: return "terminal";
    case tree_node_status_t::missing: return "missing";
    case tree_node_status_t::discarded: return "discarded";
  }
  return "?";
}

std::string_view to_string(missing_reason_t r)
{
  switch (r) {
    case missing_reason_t::none: return "none";
    case missing_reason_t::infeasible: return "infeasible";
    case missing_reason_t::cutoff: return "cutoff";
    case missing_reason_t::mip_feasible: return "mip_feasible";
    case missing_reason_t::pruned: return "pruned";
    case missing_reason_t::node_infeasible: return "node_infeasible";
  }
  return "?";
}

const criterion_spec_t& lookahead_config_t::criterion_at(int d) const
{
  if (criterion_by_depth.empty()) { return winnow.criterion; }
  return criterion_by_depth[std::min<size_t>(d, criterion_by_depth.size() - 1)];
}

int lookahead_config_t::lim_at(int d) const
{
  if (lim.empty()) { return 1; }
  return lim[std::min<size_t>(d, lim.size() - 1)];
}

void lookahead_config_t::validate() const
{
  if (depth < 1) { throw precondition_error("look-ahead depth must be at least 1"); }
  winnow.validate();
  for (const auto& c : criterion_by_depth) { c.validate(); }
  leaf_criterion.validate();
  if (leaf_criterion.required_flavor() != eval_flavor_t::plain || leaf_criterion.id == criterion_t::vote) {
    throw precondition_error("leaf criterion must score plain evaluations");
  }
  if (fractionality_weight > 0) { throw precondition_error("fractionality weight must be <= 0"); }
  for (int l : lim) {
    if (l < 1) { throw precondition_error("Lim(d) must be at least 1"); }
  }
  if (d0 < 1) { throw precondition_error("d0 must be at least 1"); }
  if (trees < 1) { throw precondition_error("tree count must be at least 1"); }
  if (trees > 1 && trees >= winnow.n2_at(0)) { throw precondition_error("n' must be below n2(0)"); }
  if (post_winnow != post_winnow_t::off && traversal != traversal_t::breadth_first) {
    throw precondition_error("post-winnowing needs level-by-level generation");
  }
  if (max_restarts < 0) { throw precondition_error("restart cap must be nonnegative"); }
  if (!(missing_gap > 0)) { throw precondition_error("missing gap must be positive"); }
}

std::pair<int, int> d2_budget(int num_fractional, double v)
{
  if (!(v >= 1 && v <= 2)) { throw precondition_error("v must lie in [1, 2]"); }
  int n21 = std::max(1, static_cast<int>(std::lround(num_fractional / (v + 2.0))));
  int n20 = std::max(1, static_cast<int>(std::lround(v * n21)));
  return {n20, n21};
}

lookahead_config_t d2_config(const lookahead_config_t& base, int num_fractional, double v)
{
  auto [n20, n21]        = d2_budget(num_fractional, v);
  lookahead_config_t cfg = base;
  cfg.depth              = 2;
  cfg.winnow.n0.reset();
  cfg.winnow.n1          = std::max({num_fractional, n20, n21, 1});
  cfg.winnow.n2          = {n20, n21};
  cfg.winnow.skip_stage2 = true;
  cfg.post_winnow        = post_winnow_t::off;
  cfg.criterion_by_depth = {base.winnow.criterion, criterion_spec_t::of(criterion_t::c7)};
  return cfg;
}

void attract_counters_t::add(int var, branch_dir_t dir, int half)
{
  const bool up_dir = dir == branch_dir_t::up;
  (up_dir ? up : down)[var]++;
  if (half >= 0) { (up_dir ? up_plus : down_plus)[var]++; }
  if (half <= 0) { (up_dir ? up_minus : down_minus)[var]++; }
}

std::optional<std::tuple<int, branch_dir_t, int>> attract_counters_t::best(std::span<const int> vars,
                                                                           int half) const
{
  const auto& u = half > 0 ? up_plus : half < 0 ? up_minus : up;
  const auto& d = half > 0 ? down_plus : half < 0 ? down_minus : down;
  auto get      = [](const std::map<int, int>& m, int v) {
    auto it = m.find(v);
    return it == m.end() ? 0 : it->second;
  };
  std::optional<std::tuple<int, branch_dir_t, int>> out;
  std::vector<int> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  for (int v : sorted) {
    int cu = get(u, v), cd = get(d, v);
    int value = std::max(cu, cd);
    if (!out || value > std::get<2>(*out)) {
      out = std::make_tuple(v, cu >= cd ? branch_dir_t::up : branch_dir_t::down, value);
    }
  }
  return out;
}

std::optional<branch_t> attract_override(const attract_counters_t& counters,
                                         std::span<const int> root_f2,
                                         int half,
                                         double threshold)
{
  auto b = counters.best(root_f2, half);
  if (!b || !(std::get<2>(*b) > threshold)) { return std::nullopt; }
  branch_t out;
  out.var = std::get<0>(*b);
  out.dir = std::get<1>(*b);
  return out;
}

branch_eval_t leaf_pair_eval(int var,
                             double root_obj,
                             double x_value,
                             std::optional<double> up_obj,
                             std::optional<double> down_obj,
                             double missing_obj,
                             double penalty_up,
                             double penalty_down)
{
  auto e = make_eval(var, root_obj, frac_up(x_value), frac_down(x_value), up_obj.value_or(missing_obj),
                     down_obj.value_or(missing_obj), missing_obj);
  if (up_obj) { e.eval_up += penalty_up; }
  if (down_obj) { e.eval_down += penalty_down; }
  return e;
}

namespace {

struct pair_t {
  int parent = -1;
  int var    = -1;
  branch_eval_t eval;
  branch_probe_t probe;
  int rank = 0;  // position among the node's chosen pairs (tree index at the root)
};

enum class expand_result_t { pairs, terminal, missing, integral, forced };

class builder_t {
 public:
  builder_t(const mip_problem_t& problem,
            const lookahead_config_t& cfg,
            incumbent_t& inc,
            const lookahead_context_t& ctx,
            lookahead_result_t& out)
    : problem_(problem), cfg_(cfg), inc_(inc), ctx_(ctx), out_(out), base_rows_(problem.lp.num_rows)
  {
  }

  void run(const dual_simplex_t& root);

 private:
  const mip_problem_t& problem_;
  const lookahead_config_t& cfg_;
  incumbent_t& inc_;
  lookahead_context_t ctx_;
  lookahead_result_t& out_;
  const int base_rows_;
  double root_obj_ = 0;
  std::optional<branch_t> forced_root_;

  tree_node_t& node(int id) { return out_.nodes[id]; }

  bool solution_is_mip_feasible(const lp_solution_t& sol) const
  {
    return sol.status == lp_status_t::optimal && detect_fractional(sol.x, problem_).empty() &&
           is_mip_feasible(sol.x, problem_);
  }

  // Installs a MIP-feasible LP point; the caller then treats its node as infeasible.
  void take_incumbent(const lp_solution_t& sol, int depth, int node_id)
  {
    auto upd = update_incumbent(inc_, problem_, sol.x, depth, node_id);
    if (upd.updated) {
      ++out_.stats.incumbents;
      prune_by_incumbent();
    }
  }

  void prune_by_incumbent()
  {
    for (auto& n : out_.nodes) {
      const bool live = n.status == tree_node_status_t::open || n.status == tree_node_status_t::leaf ||
                        n.status == tree_node_status_t::terminal;
      if (!live || inc_.improves(n.objective)) { continue; }
      n.status = tree_node_status_t::missing;
      n.reason = missing_reason_t::pruned;
      out_.prunes.push_back({n.id, n.objective, inc_.objective});
    }
  }

  pivot_budget_t step_budget(const dual_simplex_t& lp) const
  {
    pivot_budget_t b;
    b.max_pivots = cfg_.step2_max_pivots;
    b.max_stall  = cfg_.step2_max_stall;
    b.cutoff     = inc_.has_solution() ? inc_.cutoff() : inf;
    if (cfg_.winnow.v_lim_multiplier) {
      b.v_lim = v_lim_for(lp.solution().x, problem_, *cfg_.winnow.v_lim_multiplier);
    }
    return b;
  }

  // Child solves with MIP-feasible children turned into incumbents (and then infeasible).
  branch_probe_t probe_pair(const dual_simplex_t& lp, int j, const pivot_budget_t& b, bool keep,
                            int depth, int node_id)
  {
    const double inc_obj = inc_.objective;
    auto p = cfg_.straddle ? straddle_probe(lp, problem_, j, b, inc_obj, true)
                           : eval_plain(lp, problem_, j, b, inc_obj, true);
    out_.stats.lp_solves += 2;
    out_.stats.pivots += p.pivots;
    bool hit[2] = {false, false};
    int k       = 0;
    for (auto* child : {&p.up, &p.down}) {
      if (*child && solution_is_mip_feasible((*child)->sol)) {
        take_incumbent((*child)->sol, depth + 1, node_id);
        hit[k] = true;
      }
      ++k;
    }
    if (hit[0] || hit[1] || inc_obj != inc_.objective) {
      auto obj = [&](const std::optional<child_lp_t>& c, bool h) {
        if (h || !c || !c->sol.lp_feasible() || !inc_.improves(c->sol.objective)) { return inf; }
        return c->sol.objective;
      };
      auto e = make_eval(j, p.eval.parent_obj, p.eval.f_up, p.eval.f_down, obj(p.up, hit[0]),
                         obj(p.down, hit[1]), inc_.objective);
      e.infeas_up   = p.eval.infeas_up;
      e.infeas_down = p.eval.infeas_down;
      e.frac_up     = std::move(p.eval.frac_up);
      e.frac_down   = std::move(p.eval.frac_down);
      p.eval        = std::move(e);
    }
    if (!keep) {
      p.up.reset();
      p.down.reset();
    }
    return p;
  }

  double missing_value() const
  {
    if (inc_.has_solution()) { return inc_.objective; }
    return root_obj_ + cfg_.missing_gap * (1.0 + std::abs(root_obj_));
  }

  // Tightens the node for a compulsory branch. Returns false once the node is gone.
  bool absorb(tree_node_t& n, const branch_signal_t& s)
  {
    auto& lp = *n.lp;
    ++out_.stats.restarts;
    if (cfg_.straddle) {
      // the surviving z side is the valid restriction, not the plain bound
      auto z = make_straddle(lp, problem_, s.var, s.forced);
      lp.add_row(z.coefs, z.rhs);
    } else {
      apply_branch(lp, s.var, s.forced);
      bound_change_t c{s.var, lp.lower(s.var), lp.upper(s.var), true};
      n.implied.push_back(c);
      if (n.depth == 0) { out_.root_changes.push_back(c); }
    }
    auto sol = lp.solve(step_budget(lp));
    ++out_.stats.lp_solves;
    out_.stats.pivots += sol.pivots;
    n.objective = sol.lp_feasible() ? sol.objective : inf;
    if (!sol.lp_feasible()) {
      n.status = tree_node_status_t::missing;
      n.reason = sol.status == lp_status_t::cutoff_infeasible ? missing_reason_t::cutoff
                                                               : missing_reason_t::infeasible;
      return false;
    }
    return true;
  }

  expand_result_t expand(tree_node_t& n, std::vector<pair_t>& pairs);
  int add_child(int parent, const pair_t& p, branch_dir_t dir, child_lp_t&& child);
  void score_and_choose();
  void set_path_from(int parent_id, branch_dir_t last_dir);
  void bfs();
  void dfs(int id);
};

expand_result_t builder_t::expand(tree_node_t& n, std::vector<pair_t>& pairs)
{
  const int d = n.depth;
  auto& lp    = *n.lp;
  if (cfg_.straddle && d > 0 && drop_nonbasic_z_rows(lp, base_rows_) > 0) {
    auto sol = lp.solve(step_budget(lp));
    ++out_.stats.lp_solves;
    out_.stats.pivots += sol.pivots;
    if (!sol.lp_feasible()) {
      n.status = tree_node_status_t::missing;
      n.reason = missing_reason_t::infeasible;
      return expand_result_t::missing;
    }
    n.objective = sol.objective;
  }
  n.z_rows = lp.num_rows() - base_rows_;

  winnow_params_t params = cfg_.winnow;
  params.criterion       = cfg_.criterion_at(d);
  params.excluded        = n.excluded;
  const unit_costs_t* parent_uc =
    n.parent >= 0 ? node(n.parent).unit_costs.get() : ctx_.root_unit_costs;

  for (int attempt = 0;; ++attempt) {
    const auto sol = lp.solution();
    n.fractional   = detect_fractional(sol.x, problem_);
    if (n.fractional.empty()) {
      if (solution_is_mip_feasible(sol)) {
        take_incumbent(sol, d, n.id);
        n.status = tree_node_status_t::missing;
        n.reason = missing_reason_t::mip_feasible;
        return d == 0 ? expand_result_t::integral : expand_result_t::missing;
      }
      n.status = tree_node_status_t::terminal;
      return expand_result_t::terminal;
    }
    if (attempt > cfg_.max_restarts) {
      n.status = tree_node_status_t::terminal;
      return expand_result_t::terminal;
    }

    winnow_context_t wctx;
    wctx.depth             = d;
    wctx.avg_solve_pivots  = ctx_.avg_solve_pivots;
    wctx.incumbent_obj     = inc_.objective;
    wctx.lp_cutoff         = inc_.has_solution() ? inc_.cutoff() : inf;
    wctx.parent_unit_costs = parent_uc;
    if (cfg_.straddle) {
      wctx.stage1_probe = [this](const dual_simplex_t& l, int j) {
        return straddle_single_pivot(l, problem_, j);
      };
    }
    wctx.stage2_probe = [this, d, &n](const dual_simplex_t& l, int j, const pivot_budget_t& b) {
      if (ctx_.estimate) {
        if (auto e = ctx_.estimate(l, j, d)) {
          ++out_.stats.estimates;
          branch_probe_t p;
          p.eval = std::move(*e);
          return p;
        }
      }
      return probe_pair(l, j, b, false, d, n.id);
    };
    // stage-2 probe counts are tracked by probe_pair itself
    auto r = winnow(lp, problem_, params, wctx);

    if (r.leaf) {
      n.status = tree_node_status_t::terminal;
      return expand_result_t::terminal;
    }
    auto handle = [&](const branch_signal_t& s) {
      if (s.kind == signal_t::node_infeasible) {
        n.status = tree_node_status_t::missing;
        n.reason = missing_reason_t::node_infeasible;
        return expand_result_t::missing;
      }
      if (d == 0 && attempt == cfg_.max_restarts) {
        // out of restarts: the compulsory side itself becomes the branch
        branch_t b;
        b.var   = s.var;
        b.dir   = s.forced;
        b.bound = s.forced == branch_dir_t::up ? std::ceil(lp.value(s.var)) : std::floor(lp.value(s.var));
        forced_root_ = b;
        return expand_result_t::forced;
      }
      if (!absorb(n, s)) { return expand_result_t::missing; }
      return expand_result_t::pairs;  // retry
    };
    if (r.signal) {
      auto res = handle(*r.signal);
      if (res != expand_result_t::pairs) { return res; }
      continue;
    }

    if (!params.skip_stage2) {
      for (size_t i = 0; i < r.f1.size(); ++i) {
        if (std::find(r.f2.begin(), r.f2.end(), r.f1[i]) != r.f2.end()) { continue; }
        out_.attract.add(r.f1[i], r.stage2_evals[i].preferred(), n.half);
      }
    } else {
      for (const auto& e : r.stage2_evals) {
        if (std::find(r.f2.begin(), r.f2.end(), e.var) != r.f2.end()) { continue; }
        out_.attract.add(e.var, e.preferred(), n.half);
      }
    }

    // step 2: full child solves for F2
    std::vector<int> f2 = r.f2;
    std::sort(f2.begin(), f2.end());
    std::vector<branch_probe_t> probes;
    const auto budget = step_budget(lp);
    for (int j : f2) { probes.push_back(probe_pair(lp, j, budget, true, d, n.id)); }

    std::vector<double> rc(lp.num_structural());
    for (int j = 0; j < lp.num_structural(); ++j) { rc[j] = std::abs(lp.reduced_cost(j)); }
    n.unit_costs = std::make_shared<unit_costs_t>(std::move(rc), parent_uc);
    for (const auto& p : r.stage2_probes) { n.unit_costs->set(p.eval.var, p.eval.uc_up, p.eval.uc_down); }
    for (const auto& p : probes) { n.unit_costs->set(p.eval.var, p.eval.uc_up, p.eval.uc_down); }

    const auto flavor = params.criterion.required_flavor();
    std::vector<branch_eval_t> evals;
    for (const auto& p : probes) {
      evals.push_back(flavor == eval_flavor_t::plain
                        ? p.eval
                        : eval_weighted(p.eval, flavor, params.weights, n.unit_costs.get()));
    }
    std::optional<branch_signal_t> sig;
    for (const auto& e : evals) {
      auto s = signal_of(e);
      if (s.kind == signal_t::node_infeasible) {
        sig = s;
        break;
      }
      if (s.kind == signal_t::compulsory && !sig) { sig = s; }
    }
    if (sig) {
      auto res = handle(*sig);
      if (res != expand_result_t::pairs) { return res; }
      continue;
    }
    for (const auto& e : evals) { out_.attract.add(e.var, e.preferred(), n.half); }

    if (d == 0) {
      out_.root_f2    = f2;
      out_.root_evals = evals;
    }
    auto order       = rank(evals, params.criterion);
    const int chosen = d == 0 ? std::min<int>(cfg_.trees, static_cast<int>(order.size())) : 1;
    for (int k = 0; k < chosen; ++k) {
      pair_t p;
      p.parent = n.id;
      p.var    = evals[order[k]].var;
      p.eval   = evals[order[k]];
      p.probe  = std::move(probes[order[k]]);
      p.rank   = k;
      pairs.push_back(std::move(p));
    }
    if (chosen == 0) {
      n.status = tree_node_status_t::terminal;
      return expand_result_t::terminal;
    }
    n.step2_eval = evals[order[0]];
    return expand_result_t::pairs;
  }
}

int builder_t::add_child(int parent, const pair_t& p, branch_dir_t dir, child_lp_t&& child)
{
  tree_node_t c;
  const auto& par = node(parent);
  c.id            = static_cast<int>(out_.nodes.size());
  c.parent        = parent;
  c.depth         = par.depth + 1;
  c.tree          = par.depth == 0 ? p.rank : par.tree;
  c.half          = par.depth == 0 ? (dir == branch_dir_t::up ? 1 : -1) : par.half;
  c.var           = p.var;
  c.dir           = dir;
  const double xv = par.lp->value(p.var);
  c.bound         = dir == branch_dir_t::up ? std::ceil(xv) : std::floor(xv);
  c.implied       = par.implied;
  c.excluded      = par.excluded;
  c.objective = child.sol.lp_feasible() ? child.sol.objective : inf;
  for (int j = 0; j < child.lp.num_structural(); ++j) {
    c.lower.push_back(child.lp.lower(j));
    c.upper.push_back(child.lp.upper(j));
  }
  c.z_rows = child.lp.num_rows() - base_rows_;
  out_.stats.max_z_rows = std::max(out_.stats.max_z_rows, c.z_rows);
  if (!child.sol.lp_feasible()) {
    c.status = tree_node_status_t::missing;
    c.reason = child.sol.status == lp_status_t::cutoff_infeasible ? missing_reason_t::cutoff
                                                                   : missing_reason_t::infeasible;
  } else if (solution_is_mip_feasible(child.sol)) {
    c.status = tree_node_status_t::missing;
    c.reason = missing_reason_t::mip_feasible;
  } else if (inc_.has_solution() && !inc_.improves(c.objective)) {
    c.status = tree_node_status_t::missing;
    c.reason = missing_reason_t::cutoff;
  }
  if (c.status != tree_node_status_t::missing) { c.fractional = detect_fractional(child.sol.x, problem_); }
  c.lp.emplace(std::move(child.lp));
  out_.nodes.push_back(std::move(c));
  ++out_.stats.nodes_generated;
  return out_.nodes.back().id;
}

void builder_t::set_path_from(int parent_id, branch_dir_t last_dir)
{
  std::vector<int> chain;
  for (int id = parent_id; id > 0; id = node(id).parent) { chain.push_back(id); }
  std::reverse(chain.begin(), chain.end());
  out_.path.clear();
  for (int id : chain) { out_.path.push_back({node(id).var, node(id).dir, node(id).bound}); }
  const auto& par = node(parent_id);
  int leaf        = last_dir == branch_dir_t::up ? par.child_up : par.child_down;
  out_.path.push_back({node(leaf).var, last_dir, node(leaf).bound});
  if (cfg_.accept == accept_mode_t::first_branch) { out_.path.resize(1); }
}

void builder_t::score_and_choose()
{
  auto done = [&](const tree_node_t& c) {
    return c.status == tree_node_status_t::leaf || c.status == tree_node_status_t::terminal ||
           c.status == tree_node_status_t::missing;
  };
  std::vector<branch_eval_t> evals;
  std::vector<int> parents;
  for (const auto& p : out_.nodes) {
    if (p.child_up < 0 || p.child_down < 0) { continue; }
    const auto& up   = node(p.child_up);
    const auto& down = node(p.child_down);
    if (!done(up) || !done(down)) { continue; }
    const bool up_missing   = up.status == tree_node_status_t::missing;
    const bool down_missing = down.status == tree_node_status_t::missing;
    if (up_missing && down_missing) { continue; }
    const double xv = p.lp->value(up.var);
    auto penalty    = [&](const tree_node_t& c) {
      double s = 0;
      for (const auto& f : c.fractional) { s += std::min(f.f_up, f.f_down); }
      return cfg_.fractionality_weight * s;
    };
    auto e = leaf_pair_eval(up.var, root_obj_, xv, up_missing ? std::nullopt : std::optional(up.objective),
                            down_missing ? std::nullopt : std::optional(down.objective), missing_value(),
                            penalty(up), penalty(down));
    evals.push_back(e);
    parents.push_back(p.id);
  }
  if (evals.empty()) {
    // nothing to compare: fall back on the root's own step-2 choice
    const auto& root = node(0);
    if (root.child_up >= 0) {
      set_path_from(0, root.step2_eval->preferred());
      out_.winning_pair_parent = 0;
    }
    return;
  }
  auto order = rank(evals, cfg_.leaf_criterion);
  int best   = static_cast<int>(order.front());
  out_.winning_pair_parent = parents[best];
  set_path_from(parents[best], evals[best].preferred());
}

void builder_t::bfs()
{
  std::vector<int> frontier{0};
  for (int d = 0; d < cfg_.depth && !frontier.empty(); ++d) {
    std::vector<pair_t> pairs;
    for (int id : frontier) {
      if (node(id).status != tree_node_status_t::open) { continue; }
      std::vector<pair_t> mine;
      auto res = expand(node(id), mine);
      if (d == 0 && res != expand_result_t::pairs) {
        if (res == expand_result_t::integral) { out_.outcome = lookahead_outcome_t::integral; }
        if (res == expand_result_t::missing) { out_.outcome = lookahead_outcome_t::node_infeasible; }
        if (res == expand_result_t::forced) { out_.path = {*forced_root_}; }
        return;
      }
      if (res == expand_result_t::pairs) {
        node(id).status = tree_node_status_t::expanded;
        for (auto& p : mine) { pairs.push_back(std::move(p)); }
      }
    }

    const bool pw    = cfg_.post_winnow != post_winnow_t::off && d >= cfg_.d0 && d < cfg_.depth - 1;
    const bool first = pw && d == cfg_.d0;
    const int lim    = cfg_.lim_at(d);
    const auto& crit = cfg_.criterion_at(d);
    auto top_pairs   = [&](std::vector<pair_t>& ps) {
      std::vector<branch_eval_t> ev;
      for (const auto& p : ps) { ev.push_back(p.eval); }
      auto order = rank(ev, crit);
      std::vector<char> keep(ps.size(), 0);
      for (size_t k = 0; k < order.size() && static_cast<int>(k) < lim; ++k) { keep[order[k]] = 1; }
      return keep;
    };

    std::vector<char> admitted(pairs.size(), 1);
    if (first && cfg_.post_winnow != post_winnow_t::single_stream) {
      // only the Lim best pairs are generated at the first restricted level
      admitted = top_pairs(pairs);
    }
    std::vector<std::pair<int, int>> made;  // (up id, down id) per admitted pair
    std::vector<size_t> made_from;
    for (size_t i = 0; i < pairs.size(); ++i) {
      auto& p = pairs[i];
      if (!admitted[i]) {
        node(p.parent).status = tree_node_status_t::discarded;
        continue;
      }
      int u = add_child(p.parent, p, branch_dir_t::up, std::move(*p.probe.up));
      int w = add_child(p.parent, p, branch_dir_t::down, std::move(*p.probe.down));
      auto& par      = node(p.parent);
      par.child_up   = u;
      par.child_down = w;
      if (d == 0) {
        // tree k may not branch on the roots of trees 0..k-1
        for (const auto& q : pairs) {
          if (q.rank < p.rank) {
            node(u).excluded.push_back(q.var);
            node(w).excluded.push_back(q.var);
          }
        }
      }
      made.push_back({u, w});
      made_from.push_back(i);
    }

    auto discard = [&](int id) {
      if (node(id).status == tree_node_status_t::open) { node(id).status = tree_node_status_t::discarded; }
    };
    if (pw) {
      if (cfg_.post_winnow == post_winnow_t::keep_pairs || cfg_.post_winnow == post_winnow_t::best_sibling) {
        if (!first) {
          std::vector<pair_t> ps;
          for (size_t k : made_from) { ps.push_back({pairs[k].parent, pairs[k].var, pairs[k].eval, {}, 0}); }
          auto keep = top_pairs(ps);
          for (size_t k = 0; k < made.size(); ++k) {
            if (!keep[k]) {
              discard(made[k].first);
              discard(made[k].second);
            }
          }
        }
        if (cfg_.post_winnow == post_winnow_t::best_sibling) {
          for (auto [u, w] : made) {
            auto& a = node(u);
            auto& b = node(w);
            if (a.status != tree_node_status_t::open || b.status != tree_node_status_t::open) { continue; }
            if (a.objective <= b.objective) {
              discard(w);
            } else {
              discard(u);
            }
          }
        }
      } else {
        std::vector<int> alive;
        for (auto [u, w] : made) {
          for (int id : {u, w}) {
            if (node(id).status == tree_node_status_t::open) { alive.push_back(id); }
          }
        }
        std::stable_sort(alive.begin(), alive.end(), [&](int a, int b) {
          if (node(a).objective != node(b).objective) { return node(a).objective < node(b).objective; }
          return a < b;
        });
        for (size_t k = lim; k < alive.size(); ++k) { discard(alive[k]); }
      }
    }

    frontier.clear();
    for (auto [u, w] : made) {
      for (int id : {u, w}) {
        if (node(id).status == tree_node_status_t::open) { frontier.push_back(id); }
      }
    }
    if (d + 1 == cfg_.depth) {
      for (int id : frontier) { node(id).status = tree_node_status_t::leaf; }
    }

    if (pw && cfg_.early_exit && !frontier.empty()) {
      auto top = [&](int id) {
        while (node(id).depth > 1) { id = node(id).parent; }
        return id;
      };
      int first_top = top(frontier.front());
      bool same     = std::all_of(frontier.begin(), frontier.end(), [&](int id) { return top(id) == first_top; });
      if (same) {
        out_.stats.early_exit = true;
        const auto& t         = node(first_top);
        out_.path             = {{t.var, t.dir, t.bound}};
        out_.winning_pair_parent = t.parent;
        return;
      }
    }
  }
  score_and_choose();
}

void builder_t::dfs(int id)
{
  if (node(id).status != tree_node_status_t::open) { return; }
  if (node(id).depth == cfg_.depth) {
    node(id).status = tree_node_status_t::leaf;
    return;
  }
  std::vector<pair_t> pairs;
  auto res = expand(node(id), pairs);
  if (node(id).depth == 0 && res != expand_result_t::pairs) {
    if (res == expand_result_t::integral) { out_.outcome = lookahead_outcome_t::integral; }
    if (res == expand_result_t::missing) { out_.outcome = lookahead_outcome_t::node_infeasible; }
    if (res == expand_result_t::forced) { out_.path = {*forced_root_}; }
    return;
  }
  if (res != expand_result_t::pairs) { return; }
  node(id).status = tree_node_status_t::expanded;
  std::vector<int> kids;
  for (auto& p : pairs) {
    int u = add_child(p.parent, p, branch_dir_t::up, std::move(*p.probe.up));
    int w = add_child(p.parent, p, branch_dir_t::down, std::move(*p.probe.down));
    node(p.parent).child_up   = u;
    node(p.parent).child_down = w;
    if (node(id).depth == 0) {
      for (const auto& q : pairs) {
        if (q.rank < p.rank) {
          node(u).excluded.push_back(q.var);
          node(w).excluded.push_back(q.var);
        }
      }
    }
    kids.push_back(u);
    kids.push_back(w);
  }
  for (int k : kids) { dfs(k); }
}

void builder_t::run(const dual_simplex_t& root)
{
  cfg_.validate();
  if (root.last_status() != lp_status_t::optimal) {
    throw precondition_error("look-ahead needs an optimally solved root");
  }
  out_.attract.reset();
  root_obj_ = root.objective();
  tree_node_t r;
  r.objective = root_obj_;
  for (int j = 0; j < root.num_structural(); ++j) {
    r.lower.push_back(root.lower(j));
    r.upper.push_back(root.upper(j));
  }
  r.lp.emplace(root);
  out_.nodes.push_back(std::move(r));

  if (cfg_.traversal == traversal_t::breadth_first) {
    bfs();
  } else {
    dfs(0);
    if (out_.outcome == lookahead_outcome_t::branch && out_.path.empty()) { score_and_choose(); }
  }
  if (out_.outcome != lookahead_outcome_t::branch) {
    out_.path.clear();
    return;
  }
  if (out_.path.empty()) {
    // root stayed terminal, e.g. an empty candidate list
    out_.outcome = lookahead_outcome_t::integral;
    if (!detect_fractional(node(0).lp->solution().x, problem_).empty()) {
      out_.outcome = lookahead_outcome_t::node_infeasible;
    }
    return;
  }
  if (std::isfinite(cfg_.attract_threshold) && !out_.root_f2.empty()) {
    int half = 0;
    if (cfg_.attract_half_tree) { half = out_.path.front().dir == branch_dir_t::up ? 1 : -1; }
    if (auto o = attract_override(out_.attract, out_.root_f2, half, cfg_.attract_threshold)) {
      const double xv = node(0).lp->value(o->var);
      o->bound        = o->dir == branch_dir_t::up ? std::ceil(xv) : std::floor(xv);
      out_.attract_choice = *o;
      out_.path           = {*o};
    }
  }
}

}  // namespace

lookahead_result_t build_tree(const dual_simplex_t& root,
                              const mip_problem_t& problem,
                              const lookahead_config_t& cfg,
                              incumbent_t& incumbent,
                              const lookahead_context_t& ctx)
{
  lookahead_result_t out;
  builder_t b(problem, cfg, incumbent, ctx, out);
  b.run(root);
  return out;
}

lookahead_result_t build_d2_tree(const dual_simplex_t& root,
                                 const mip_problem_t& problem,
                                 const lookahead_config_t& base,
                                 double v,
                                 incumbent_t& incumbent,
                                 const lookahead_context_t& ctx)
{
  const int nf = static_cast<int>(candidate_set(root, problem, base.winnow.clist).size());
  return build_tree(root, problem, d2_config(base, nf, v), incumbent, ctx);
}

lookahead_result_t build_multi_trees(const dual_simplex_t& root,
                                     const mip_problem_t& problem,
                                     const lookahead_config_t& cfg,
                                     int n_prime,
                                     incumbent_t& incumbent,
                                     const lookahead_context_t& ctx)
{
  auto c  = cfg;
  c.trees = n_prime;
  return build_tree(root, problem, c, incumbent, ctx);
}

double idealized_path_correctness(double p, int depth, int trials, std::mt19937_64& rng)
{
  if (!(p >= 0 && p <= 1) || depth < 1 || trials < 1) {
    throw precondition_error("invalid idealized-path parameters");
  }
  // Each synthetic tree carries one correct branch per node along the path;
  // a node rates it best with probability p.
  std::bernoulli_distribution rated(p);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    bool found = false;
    for (int d = 0; d < depth; ++d) {
      if (rated(rng)) { found = true; }
    }
    hits += found;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace ngb
