/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/driver.hpp>
#include <ngb/errors.hpp>
#include <ngb/mps.hpp>
#include <ngb/straddle.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace ngb {

using nlohmann::json;

std::string_view to_string(node_select_t m) { return m == node_select_t::depth_first ? "dfs" : "dval"; }

std::string_view to_string(pseudo_mode_t m)
{
  switch (m) {
    case pseudo_mode_t::off: return "off";
    case pseudo_mode_t::classic: return "classic";
    case pseudo_mode_t::analytical: return "analytical";
  }
  return "?";
}

std::string_view to_string(solve_status_t s)
{
  switch (s) {
    case solve_status_t::optimal: return "Optimal";
    case solve_status_t::feasible: return "Feasible";
    case solve_status_t::infeasible: return "Infeasible";
    case solve_status_t::limit_hit: return "LimitHit";
  }
  return "?";
}

solve_config_t solve_config_t::defaults()
{
  solve_config_t c;
  c.winnow.criterion     = criterion_spec_t::of(criterion_t::c2a);
  c.tree.depth           = 3;
  c.tree.winnow          = c.winnow;
  c.tree.leaf_criterion  = criterion_spec_t::of(criterion_t::c2a);
  c.tree.post_winnow     = post_winnow_t::keep_pairs;
  c.tree.lim             = {3};
  c.tree.d0              = 2;
  c.tree.traversal       = traversal_t::breadth_first;
  return c;
}

void solve_config_t::validate() const
{
  winnow.validate();
  if (lookahead) { tree.validate(); }
  if (d2_v && !(*d2_v >= 1 && *d2_v <= 2)) { throw precondition_error("v must lie in [1, 2]"); }
  if (multi_tree < 1) { throw precondition_error("tree count must be positive"); }
  if (max_nodes < 1 || !(max_time > 0) || max_restarts < 0) { throw precondition_error("limits must be positive"); }
  if (!(beta >= 0 && beta <= 1)) { throw precondition_error("beta must lie in [0, 1]"); }
  if (!(epsilon >= 0)) { throw precondition_error("epsilon must be nonnegative"); }
  if (!(refset_theta >= 0 && refset_theta <= 1)) { throw precondition_error("theta must lie in [0, 1]"); }
  analytical.validate();
}

solve_config_t config_from_json(const json& j, solve_config_t c)
{
  if (!j.is_object()) { throw precondition_error("strategy options must be a JSON object"); }
  criterion_spec_t crit = c.winnow.criterion;
  bool crit_touched     = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "criterion") {
      auto id = criterion_from_string(v.get<std::string>());
      if (!id) { throw precondition_error("unknown criterion " + v.get<std::string>()); }
      const auto keep = crit;
      crit            = criterion_spec_t::of(*id);
      crit.p          = id == criterion_t::c5 ? crit.p : keep.p;
      crit_touched    = true;
    } else if (key == "p") {
      crit.p       = v.get<double>();
      crit_touched = true;
    } else if (key == "lambda") {
      crit.lambda  = v.get<double>();
      crit_touched = true;
    } else if (key == "w1") {
      crit.w1             = v.get<double>();
      c.winnow.weights.w1 = v.get<double>();
      crit_touched        = true;
    } else if (key == "w2") {
      crit.w2             = v.get<double>();
      c.winnow.weights.w2 = v.get<double>();
      crit_touched        = true;
    } else if (key == "lookahead") {
      int d       = v.get<int>();
      c.lookahead = d > 0;
      if (d > 0) { c.tree.depth = d; }
    } else if (key == "postwin") {
      auto m = post_winnow_from_string(v.get<std::string>());
      if (!m) { throw precondition_error("unknown post-winnow mode " + v.get<std::string>()); }
      c.tree.post_winnow = *m;
    } else if (key == "lim") {
      c.tree.lim = {v.get<int>()};
    } else if (key == "d0") {
      c.tree.d0 = v.get<int>();
    } else if (key == "d2-mode") {
      if (v.get<bool>()) { c.d2_v = c.d2_v.value_or(1.0); } else { c.d2_v.reset(); }
    } else if (key == "v") {
      c.d2_v = v.get<double>();
    } else if (key == "multi-tree") {
      c.multi_tree = v.get<int>();
    } else if (key == "straddle") {
      c.straddle = v.get<bool>();
    } else if (key == "pseudo") {
      auto s = v.get<std::string>();
      if (s == "off") { c.pseudo = pseudo_mode_t::off; }
      else if (s == "classic") { c.pseudo = pseudo_mode_t::classic; }
      else if (s == "analytical") { c.pseudo = pseudo_mode_t::analytical; }
      else { throw precondition_error("unknown pseudo mode " + s); }
    } else if (key == "refset") {
      c.refset = v.get<bool>();
    } else if (key == "reversals") {
      c.reversals = v.get<bool>();
    } else if (key == "beta") {
      c.beta = v.get<double>();
    } else if (key == "node-select") {
      auto s = v.get<std::string>();
      if (s == "dfs") { c.node_select = node_select_t::depth_first; }
      else if (s == "dval") { c.node_select = node_select_t::best_dval; }
      else { throw precondition_error("unknown node selection " + s); }
    } else if (key == "dval-approach") {
      int a = v.get<int>();
      if (a != 1 && a != 2) { throw precondition_error("Dval approach must be 1 or 2"); }
      c.dval_approach = a == 1 ? dval_approach_t::one : dval_approach_t::two;
    } else if (key == "clist") {
      c.tree.winnow.n0 = v.get<int>();
      c.tree.winnow.clist = std::vector<int>{};  // filled per tree from Stage 0 at d = 0
    } else if (key == "n0" || key == "n1") {
      auto& slot      = key == "n0" ? c.winnow.n0 : c.winnow.n1;
      auto& tree_slot = key == "n0" ? c.tree.winnow.n0 : c.tree.winnow.n1;
      slot = tree_slot = v.get<int>();
    } else if (key == "n2") {
      c.winnow.n2 = c.tree.winnow.n2 = v.get<std::vector<int>>();
    } else if (key == "vlim") {
      c.winnow.v_lim_multiplier      = v.get<double>();
      c.tree.winnow.v_lim_multiplier = v.get<double>();
    } else if (key == "max-nodes") {
      c.max_nodes = v.get<long>();
    } else if (key == "max-time") {
      c.max_time = v.get<double>();
    } else if (key == "eps") {
      c.epsilon = v.get<double>();
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else if (key == "accept") {
      auto s = v.get<std::string>();
      if (s == "first") { c.tree.accept = accept_mode_t::first_branch; }
      else if (s == "path") { c.tree.accept = accept_mode_t::full_path; }
      else { throw precondition_error("unknown accept mode " + s); }
    } else if (key == "attract") {
      c.tree.attract_threshold = v.get<double>();
    } else {
      throw precondition_error("unknown strategy option " + key);
    }
  }
  if (crit_touched) {
    c.winnow.criterion      = crit;
    c.tree.winnow.criterion = crit;
  }
  c.tree.straddle     = c.straddle;
  c.tree.max_restarts = c.max_restarts;
  if (c.multi_tree > 1) { c.tree.trees = 1; }  // build_multi_trees sets n'
  return c;
}

size_t select_open_node(std::span<const open_summary_t> open, node_select_t mode, const dval_table_t& dval)
{
  if (open.empty()) { throw precondition_error("no open nodes"); }
  size_t best = 0;
  for (size_t k = 1; k < open.size(); ++k) {
    const auto& a = open[k];
    const auto& b = open[best];
    if (mode == node_select_t::depth_first) {
      if (a.depth > b.depth || (a.depth == b.depth && a.seq > b.seq)) { best = k; }
    } else {
      const double da = dval.dval(a.depth - 1, a.objective, a.parent_obj, a.min_cost);
      const double db = dval.dval(b.depth - 1, b.objective, b.parent_obj, b.min_cost);
      if (da < db || (da == db && a.seq > b.seq)) { best = k; }
    }
  }
  return best;
}

double reversal_threshold(std::span<const double> abs_rc, double beta)
{
  if (abs_rc.empty()) { return inf; }
  double sum = 0, mx = 0;
  for (double r : abs_rc) {
    sum += r;
    mx = std::max(mx, r);
  }
  return beta * (sum / abs_rc.size()) + (1.0 - beta) * mx;
}

std::optional<reversal_outcome_t> try_reversal(const lookahead_result_t& tree,
                                               const mip_problem_t& problem,
                                               int depth,
                                               double beta)
{
  struct cand_t {
    int leaf, node, var;
    double rc;
  };
  std::vector<cand_t> cands;
  for (const auto& leaf : tree.nodes) {
    if (leaf.status != tree_node_status_t::leaf || leaf.depth != depth || !leaf.lp) { continue; }
    const auto& lp = *leaf.lp;
    for (int id = leaf.id; id > 0; id = tree.nodes[id].parent) {
      const auto& c = tree.nodes[id];
      const int k   = c.var;
      if (lp.is_basic(k) || !problem.is_integer[k]) { continue; }
      const bool at_bound = c.dir == branch_dir_t::up
                              ? lp.status(k) == var_status_t::at_lower && lp.lower(k) == c.bound
                              : lp.status(k) == var_status_t::at_upper && lp.upper(k) == c.bound;
      if (at_bound) { cands.push_back({leaf.id, id, k, std::abs(lp.reduced_cost(k))}); }
    }
  }
  std::vector<double> rcs;
  for (const auto& c : cands) { rcs.push_back(c.rc); }
  const double t = reversal_threshold(rcs, beta);
  const cand_t* best = nullptr;
  for (const auto& c : cands) {
    if (c.rc >= t && (!best || c.rc > best->rc)) { best = &c; }
  }
  if (!best) { return std::nullopt; }

  const auto& leaf = tree.nodes[best->leaf];
  const auto& cn   = tree.nodes[best->node];
  const auto& par  = tree.nodes[cn.parent];
  std::vector<double> lo = par.lower, hi = par.upper;
  // branches taken below the reversed one stay; restrictions implied along the way go
  for (int id = best->leaf; id != best->node; id = tree.nodes[id].parent) {
    const auto& c = tree.nodes[id];
    if (c.dir == branch_dir_t::up) {
      lo[c.var] = std::max(lo[c.var], c.bound);
    } else {
      hi[c.var] = std::min(hi[c.var], c.bound);
    }
  }
  reversal_outcome_t out;
  out.leaf      = best->leaf;
  out.var       = best->var;
  out.reversed  = cn.dir;
  out.rc        = best->rc;
  out.threshold = t;
  out.before    = leaf.objective;
  dual_simplex_t lp = *leaf.lp;
  const double antecedent = cn.dir == branch_dir_t::up ? par.lower[best->var] : par.upper[best->var];
  apply_reversal_update(lp, best->var, antecedent);
  for (int j = 0; j < lp.num_structural(); ++j) {
    if (j == best->var) { continue; }
    if (lp.lower(j) != lo[j] || lp.upper(j) != hi[j]) { lp.set_bounds(j, lo[j], hi[j]); }
  }
  out.after = lp.solve({});
  for (int j = 0; j < lp.num_structural(); ++j) {
    out.lower.push_back(lp.lower(j));
    out.upper.push_back(lp.upper(j));
  }
  return out;
}

namespace {

double min_cost_of(const std::vector<fractional_t>& f)
{
  double s = 0;
  for (const auto& e : f) { s += std::min(e.f_up, e.f_down); }
  return s;
}

struct open_node_t {
  explicit open_node_t(dual_simplex_t l) : lp(std::move(l)) {}
  int id     = 0;
  int depth  = 0;
  long seq   = 0;
  double parent_obj = 0;
  double min_cost   = 0;
  ext_ref_t ext;
  dual_simplex_t lp;
  std::vector<dval_point_t> dval_path;
  std::vector<ref_branch_t> ref_path;
};

struct harness_estimate_t {
  std::optional<double> analytical;
  std::optional<double> classic;
};

class solver_t {
 public:
  solver_t(const mip_problem_t& problem, const solve_config_t& cfg)
    : problem_(problem), cfg_(cfg), dval_(cfg.dval_approach)
  {
    problem_.tighten_integer_bounds();
    problem_.validate();
    cfg_.validate();
    inc_.epsilon = cfg_.epsilon;
    trace_.instance = problem_.name;
  }

  solve_result_t run();

 private:
  mip_problem_t problem_;
  solve_config_t cfg_;
  incumbent_t inc_;
  run_trace_t trace_;
  pseudo_cost_table_t pseudo_;
  extended_tree_t ext_;
  dval_table_t dval_;
  std::optional<reference_set_t> refset_;
  std::vector<open_node_t> open_;
  long seq_     = 0;
  int next_id_  = 0;
  double avg_pivots_ = 0;
  long solves_seen_  = 0;
  double root_obj_   = 0;
  std::vector<double> root_x_;
  std::chrono::steady_clock::time_point start_;
  ext_ref_t cur_ext_;
  long nodes_at_best_ = -1;

  pivot_budget_t budget() const
  {
    pivot_budget_t b;
    if (inc_.has_solution()) { b.cutoff = inc_.cutoff(); }
    return b;
  }

  void count_solve(const lp_solution_t& s)
  {
    ++trace_.counters.lp_solves;
    trace_.counters.pivots += s.pivots;
    ++solves_seen_;
    avg_pivots_ += (s.pivots - avg_pivots_) / solves_seen_;
  }

  int new_trace_node(int parent, int depth, std::optional<branch_t> b, double obj)
  {
    trace_node_t t;
    t.id        = next_id_++;
    t.parent    = parent;
    t.depth     = depth;
    t.branch    = b;
    t.objective = obj;
    t.status    = "open";
    trace_.nodes.push_back(t);
    ++trace_.counters.nodes;
    return t.id;
  }

  void record_incumbent(int node, const std::string& source)
  {
    trace_.incumbents.push_back({node, trace_.counters.nodes, inc_.objective, source});
  }

  bool install(const std::vector<double>& x, int depth, int node, const std::vector<dval_point_t>& dpath,
               const std::vector<ref_branch_t>& rpath)
  {
    auto u = update_incumbent(inc_, problem_, x, depth, node);
    if (!u.updated) { return false; }
    record_incumbent(node, "bnb");
    auto path = dpath;
    while (!path.empty() && path.back().depth >= depth) { path.pop_back(); }
    path.push_back({depth, inc_.objective, 0.0});
    if (path.size() == static_cast<size_t>(depth) + 1) { dval_.calibrate(path, inc_.objective); }
    if (refset_) { refset_->add(x, inc_.objective, rpath); }
    return true;
  }

  std::optional<branch_eval_t> estimate(const dual_simplex_t& lp, int j, int depth)
  {
    if (depth > 0 || cfg_.pseudo == pseudo_mode_t::off) { return std::nullopt; }
    const double x = lp.value(j), fu = frac_up(x), fd = frac_down(x);
    std::optional<double> up, down;
    if (cfg_.pseudo == pseudo_mode_t::classic) {
      if (pseudo_.count(j, branch_dir_t::up) > 0 && pseudo_.count(j, branch_dir_t::down) > 0) {
        up   = pseudo_.pseudo_eval(j, branch_dir_t::up, fu);
        down = pseudo_.pseudo_eval(j, branch_dir_t::down, fd);
      }
    } else {
      std::optional<int> late;
      if (inc_.has_solution()) { late = inc_.depth; }
      auto a = ext_.analytical_uc(j, branch_dir_t::up, cur_ext_, cfg_.analytical, late);
      auto b = ext_.analytical_uc(j, branch_dir_t::down, cur_ext_, cfg_.analytical, late);
      if (a && b) {
        up   = a->uc * fu;
        down = b->uc * fd;
      }
    }
    if (!up || !down) { return std::nullopt; }
    ++trace_.counters.estimates;
    const double o = lp.objective();
    return make_eval(j, o, fu, fd, o + *up, o + *down, inc_.objective);
  }

  harness_estimate_t harness(int j, branch_dir_t dir, double f, ext_ref_t at)
  {
    harness_estimate_t h;
    std::optional<int> late;
    if (inc_.has_solution()) { late = inc_.depth; }
    if (auto a = ext_.analytical_uc(j, dir, at, cfg_.analytical, late)) { h.analytical = a->uc * f; }
    if (pseudo_.count(j, dir) > 0) { h.classic = pseudo_.pseudo_eval(j, dir, f); }
    return h;
  }

  void record_symdif(ext_ref_t v_parent, int var, branch_dir_t dir)
  {
    if (trace_.symdif.size() >= 20000) { return; }
    std::set<int> ancestors;
    for (int k = ext_.at(v_parent).parent; k >= 0; k = ext_.at({ext_.session(), k}).parent) { ancestors.insert(k); }
    for (auto u : ext_.uc_sources(var, dir)) {
      const auto& rec = ext_.at(u);
      if (!rec.tentative || !ancestors.count(rec.parent)) { continue; }
      trace_.symdif.push_back({u.id, v_parent.id, var, dir, ext_.metrics_prospective(u, v_parent)});
    }
  }

  void record_tentatives(ext_ref_t at, const std::vector<branch_eval_t>& evals, int chosen, const dual_simplex_t& lp)
  {
    for (const auto& e : evals) {
      if (e.var == chosen) { continue; }
      const double x = lp.value(e.var);
      if (!e.infeasible_up && std::isfinite(e.uc_up)) {
        ext_.add_child(at, {e.var, branch_dir_t::up, std::ceil(x)}, true, e.uc_up);
      }
      if (!e.infeasible_down && std::isfinite(e.uc_down)) {
        ext_.add_child(at, {e.var, branch_dir_t::down, std::floor(x)}, true, e.uc_down);
      }
    }
  }

  // Every evaluated look-ahead node becomes a tentative record under `at`.
  void record_tree(ext_ref_t at, const lookahead_result_t& res, int chosen, const dual_simplex_t& lp)
  {
    std::vector<std::optional<ext_ref_t>> map(res.nodes.size());
    map[0] = at;
    std::set<int> first_level;
    for (const auto& tn : res.nodes) {
      if (tn.id == 0 || !map[tn.parent] || !std::isfinite(tn.objective)) { continue; }
      const auto& par = res.nodes[tn.parent];
      const branch_eval_t* e = nullptr;
      if (par.step2_eval && par.step2_eval->var == tn.var) { e = &*par.step2_eval; }
      if (!e && tn.parent == 0) {
        for (const auto& r : res.root_evals) {
          if (r.var == tn.var) { e = &r; }
        }
      }
      if (!e || !std::isfinite(par.objective)) { continue; }
      const double f  = tn.dir == branch_dir_t::up ? e->f_up : e->f_down;
      const double uc = std::max(tn.objective - par.objective, 1e-9) / f;
      map[tn.id]      = ext_.add_child(*map[tn.parent], {tn.var, tn.dir, tn.bound}, true, uc);
      if (tn.parent == 0) { first_level.insert(tn.var); }
    }
    std::vector<branch_eval_t> rest;
    for (const auto& e : res.root_evals) {
      if (!first_level.count(e.var)) { rest.push_back(e); }
    }
    record_tentatives(at, rest, chosen, lp);
  }

  void absorb(open_node_t& node, const bound_change_t& c)
  {
    node.lp.set_bounds(c.var, c.lower, c.upper);
    ext_.add_compulsory(node.ext, c);
    node.ref_path.push_back({c.var, true});
    ++trace_.counters.compulsory;
  }

  // Re-solves after restrictions; returns false when the node is gone.
  bool resolve(open_node_t& node)
  {
    auto s = node.lp.solve(budget());
    count_solve(s);
    auto& t     = trace_.nodes[node.id];
    t.objective = s.lp_feasible() ? s.objective : inf;
    if (!s.lp_feasible()) {
      t.status = s.status == lp_status_t::cutoff_infeasible ? "cutoff" : "infeasible";
      return false;
    }
    auto f = detect_fractional(s.x, problem_);
    if (f.empty()) {
      t.status = "integral";
      if (s.status == lp_status_t::optimal && is_mip_feasible(s.x, problem_)) {
        install(s.x, node.depth, node.id, node.dval_path, node.ref_path);
      }
      return false;
    }
    return true;
  }

  std::optional<open_node_t> make_child(const open_node_t& parent, int var, branch_dir_t dir,
                                        const harness_estimate_t& est)
  {
    const double x = parent.lp.value(var);
    const double f = dir == branch_dir_t::up ? frac_up(x) : frac_down(x);
    open_node_t c(parent.lp);
    const double b = apply_branch(c.lp, var, dir);
    auto s         = c.lp.solve(budget());
    count_solve(s);
    const double pobj = parent.lp.objective();
    c.depth           = parent.depth + 1;
    c.id              = new_trace_node(parent.id, c.depth, branch_t{var, dir, b}, s.lp_feasible() ? s.objective : inf);
    c.seq             = ++seq_;
    c.parent_obj      = pobj;

    std::optional<double> uc;
    if (s.status == lp_status_t::optimal) {
      const double delta = s.objective - pobj;
      uc                 = std::max(delta, 1e-9) / f;
      if (est.analytical) {
        trace_.counters.analytical_error.sum_abs += std::abs(*est.analytical - delta);
        ++trace_.counters.analytical_error.count;
      }
      if (est.classic) {
        trace_.counters.classic_error.sum_abs += std::abs(*est.classic - delta);
        ++trace_.counters.classic_error.count;
      }
    }
    record_symdif(parent.ext, var, dir);
    c.ext = ext_.take(parent.ext, {var, dir, b}, uc);
    pseudo_.update(var, dir, uc.value_or(0), s.status == lp_status_t::optimal);

    auto& t = trace_.nodes[c.id];
    if (!s.lp_feasible()) {
      t.status = s.status == lp_status_t::cutoff_infeasible ? "cutoff" : "infeasible";
      return std::nullopt;
    }
    c.dval_path = parent.dval_path;
    c.ref_path  = parent.ref_path;
    c.ref_path.push_back({var, false});
    auto frac = detect_fractional(s.x, problem_);
    if (frac.empty()) {
      t.status = "integral";
      if (s.status == lp_status_t::optimal && is_mip_feasible(s.x, problem_)) {
        install(s.x, c.depth, c.id, c.dval_path, c.ref_path);
      }
      return std::nullopt;
    }
    c.min_cost = min_cost_of(frac);
    c.dval_path.push_back({c.depth, s.objective, c.min_cost});
    return c;
  }

  branch_dir_t gated(const open_node_t& node, int var, branch_dir_t dir) const
  {
    if (!refset_ || refset_->empty()) { return dir; }
    const bool binary = problem_.lp.lower[var] == 0 && problem_.lp.upper[var] == 1;
    auto shift        = [&](branch_dir_t d) {
      const double x = node.lp.value(var);
      const double b = d == branch_dir_t::up ? std::ceil(x) : std::floor(x);
      return std::abs(b - root_x_[var]);
    };
    const auto other = dir == branch_dir_t::up ? branch_dir_t::down : branch_dir_t::up;
    if (!refset_->gate(var, dir, shift(dir), binary, cfg_.refset_theta) &&
        refset_->gate(var, other, shift(other), binary, cfg_.refset_theta)) {
      return other;
    }
    return dir;
  }

  void branch_on(open_node_t node, const std::vector<branch_t>& path)
  {
    trace_.nodes[node.id].status = "branched";
    for (size_t k = 0; k < path.size(); ++k) {
      const int var = path[k].var;
      if (is_integral(node.lp.value(var))) { break; }
      const auto dir   = gated(node, var, path[k].dir);
      const auto other = dir == branch_dir_t::up ? branch_dir_t::down : branch_dir_t::up;
      const double x   = node.lp.value(var);
      auto est_o = harness(var, other, other == branch_dir_t::up ? frac_up(x) : frac_down(x), node.ext);
      auto est_p = harness(var, dir, dir == branch_dir_t::up ? frac_up(x) : frac_down(x), node.ext);
      auto sib   = make_child(node, var, other, est_o);
      auto pref  = make_child(node, var, dir, est_p);
      if (sib) { open_.push_back(std::move(*sib)); }
      if (!pref) { return; }
      if (k + 1 == path.size()) {
        open_.push_back(std::move(*pref));
        return;
      }
      trace_.nodes[pref->id].status = "branched";
      node = std::move(*pref);
    }
    // the accepted path stopped early: the current node stays open
    trace_.nodes[node.id].status = "open";
    node.seq = ++seq_;
    open_.push_back(std::move(node));
  }

  void scores_into(int id, const std::vector<branch_eval_t>& evals, const criterion_spec_t& spec)
  {
    if (evals.empty()) { return; }
    auto s = score(evals, spec);
    for (size_t k = 0; k < evals.size(); ++k) { trace_.nodes[id].scores.push_back({evals[k].var, s[k]}); }
  }

  void expand_lookahead(open_node_t node);
  void expand_plain(open_node_t node);
};

void solver_t::expand_lookahead(open_node_t node)
{
  lookahead_config_t cfg = cfg_.tree;
  cfg.straddle           = cfg_.straddle;
  cfg.max_restarts       = cfg_.max_restarts;
  if (cfg.winnow.clist) {
    auto f = candidate_set(node.lp, problem_, std::nullopt);
    cfg.winnow.clist = stage0(node.lp, f, cfg.winnow.n0_for(static_cast<int>(f.size())));
    std::sort(cfg.winnow.clist->begin(), cfg.winnow.clist->end());
  }
  lookahead_context_t ctx;
  ctx.avg_solve_pivots = avg_pivots_;
  if (cfg_.pseudo != pseudo_mode_t::off) {
    ctx.estimate = [this](const dual_simplex_t& l, int j, int d) { return estimate(l, j, d); };
  }
  cur_ext_ = node.ext;
  const double inc_before = inc_.objective;
  lookahead_result_t res;
  if (cfg_.d2_v) {
    res = build_d2_tree(node.lp, problem_, cfg, *cfg_.d2_v, inc_, ctx);
  } else if (cfg_.multi_tree > 1) {
    res = build_multi_trees(node.lp, problem_, cfg, cfg_.multi_tree, inc_, ctx);
  } else {
    res = build_tree(node.lp, problem_, cfg, inc_, ctx);
  }
  ++trace_.counters.tree_builds;
  trace_.counters.lp_solves += res.stats.lp_solves;
  trace_.counters.probes += res.stats.lp_solves;
  trace_.counters.pivots += res.stats.pivots;
  if (inc_.objective != inc_before) {
    inc_.depth += node.depth;
    record_incumbent(node.id, "lookahead");
  }
  auto& t = trace_.nodes[node.id];
  if (res.outcome == lookahead_outcome_t::integral) {
    t.status = "integral";
    return;
  }
  if (res.outcome == lookahead_outcome_t::node_infeasible || res.path.empty()) {
    t.status = "infeasible";
    return;
  }
  if (!res.root_changes.empty()) {
    for (const auto& c : res.root_changes) { absorb(node, c); }
    if (!resolve(node)) { return; }
  }
  scores_into(node.id, res.root_evals, cfg.criterion_at(0));
  record_tree(node.ext, res, res.choice().var, node.lp);

  if (cfg_.reversals && !cfg_.straddle) {
    if (auto r = try_reversal(res, problem_, cfg.depth, cfg_.beta)) {
      count_solve(r->after);
      trace_.reversals.push_back({node.id, r->var, r->rc, r->before,
                                  r->after.lp_feasible() ? r->after.objective : inf, r->threshold,
                                  std::string(to_string(r->after.status))});
    }
  }

  auto path = res.path;
  if (is_integral(node.lp.value(path.front().var))) {
    // alternative optimum after re-solving: branch on the most fractional instead
    auto f    = detect_fractional(node.lp.solution().x, problem_);
    auto best = std::max_element(f.begin(), f.end(), [](const auto& a, const auto& b) {
      return std::min(a.f_up, a.f_down) < std::min(b.f_up, b.f_down);
    });
    path = {{best->var, branch_dir_t::up, std::ceil(best->value)}};
  }
  branch_on(std::move(node), path);
}

void solver_t::expand_plain(open_node_t node)
{
  auto params = cfg_.winnow;
  for (int attempt = 0;; ++attempt) {
    winnow_context_t w;
    w.depth            = 0;
    w.avg_solve_pivots = avg_pivots_;
    w.incumbent_obj    = inc_.objective;
    w.lp_cutoff        = inc_.has_solution() ? inc_.cutoff() : inf;
    cur_ext_           = node.ext;
    if (cfg_.straddle) {
      w.stage1_probe = [this](const dual_simplex_t& l, int j) { return straddle_single_pivot(l, problem_, j); };
    }
    w.stage2_probe = [this](const dual_simplex_t& l, int j, const pivot_budget_t& b) {
      if (auto e = estimate(l, j, 0)) {
        branch_probe_t p;
        p.eval = *e;
        return p;
      }
      auto p = cfg_.straddle ? straddle_probe(l, problem_, j, b, inc_.objective, false)
                             : eval_plain(l, problem_, j, b, inc_.objective, false);
      trace_.counters.lp_solves += 2;
      trace_.counters.probes += 2;
      trace_.counters.pivots += p.pivots;
      return p;
    };
    auto r  = winnow(node.lp, problem_, params, w);
    auto& t = trace_.nodes[node.id];
    if (r.signal && r.signal->kind == signal_t::node_infeasible) {
      t.status = "infeasible";
      return;
    }
    if (r.signal && attempt < cfg_.max_restarts) {
      const auto& s = *r.signal;
      const double x = node.lp.value(s.var);
      bound_change_t c{s.var, node.lp.lower(s.var), node.lp.upper(s.var), true};
      if (s.forced == branch_dir_t::up) { c.lower = std::ceil(x); } else { c.upper = std::floor(x); }
      absorb(node, c);
      if (!resolve(node)) { return; }
      continue;
    }
    if (r.leaf || r.f2.empty()) {
      t.status = "infeasible";
      return;
    }
    int var          = r.f2.front();
    branch_dir_t dir = branch_dir_t::up;
    if (r.signal) {
      var = r.signal->var;
      dir = r.signal->forced;
    } else {
      dir = r.eval_of(var).preferred();
    }
    scores_into(node.id, r.stage2_evals, params.criterion);
    record_tentatives(node.ext, r.stage2_evals, var, node.lp);
    branch_on(std::move(node), {{var, dir, 0}});
    return;
  }
}

solve_result_t solver_t::run()
{
  start_ = std::chrono::steady_clock::now();
  solve_result_t res;
  open_node_t root{dual_simplex_t(problem_.lp)};
  root.ext = ext_.root();
  auto s = root.lp.solve({});
  count_solve(s);
  root.id = new_trace_node(-1, 0, std::nullopt, s.lp_feasible() ? s.objective : inf);
  auto finish = [&](solve_status_t st, double bound) {
    res.status         = st;
    res.incumbent      = inc_;
    res.bound          = bound;
    trace_.status      = st;
    res.trace          = std::move(trace_);
    res.seconds        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    for (const auto& e : res.trace.incumbents) {
      if (st == solve_status_t::optimal && e.objective == inc_.objective) {
        res.nodes_to_first_optimal = e.nodes_seen;
        break;
      }
    }
    res.trace.extended_tree.clear();
    for (int k = 0; k < ext_.size(); ++k) {
      const auto& r = ext_.at({ext_.session(), k});
      res.trace.extended_tree.push_back(
        {r.id, r.parent, r.branch, r.tentative, static_cast<int>(r.compulsory.size()), r.uc});
    }
    return res;
  };
  if (s.status == lp_status_t::infeasible || s.status == lp_status_t::cutoff_infeasible) {
    trace_.nodes[0].status = "infeasible";
    return finish(solve_status_t::infeasible, inf);
  }
  if (s.status != lp_status_t::optimal) {
    trace_.nodes[0].status       = "limit";
    trace_.nodes[0].prune_reason = std::string(to_string(s.status));
    return finish(solve_status_t::limit_hit, -inf);
  }
  root_obj_ = s.objective;
  root_x_   = s.x;
  if (cfg_.refset) {
    refset_.emplace(root_x_, root_obj_, cfg_.refset_capacity, cfg_.refset_p);
  }
  auto frac = detect_fractional(s.x, problem_);
  if (frac.empty()) {
    trace_.nodes[0].status = "integral";
    install(s.x, 0, 0, {}, {});
    return finish(solve_status_t::optimal, inc_.objective);
  }
  root.min_cost  = min_cost_of(frac);
  root.dval_path = {{0, s.objective, root.min_cost}};
  root.seq       = ++seq_;
  open_.push_back(std::move(root));

  bool limit = false;
  while (!open_.empty()) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (trace_.counters.nodes >= cfg_.max_nodes || elapsed > cfg_.max_time) {
      limit = true;
      break;
    }
    std::vector<open_summary_t> sum;
    for (const auto& o : open_) { sum.push_back({o.depth, o.seq, o.lp.objective(), o.parent_obj, o.min_cost}); }
    const size_t k = select_open_node(sum, cfg_.node_select, dval_);
    open_node_t node = std::move(open_[k]);
    open_.erase(open_.begin() + static_cast<long>(k));
    if (inc_.has_solution() && !inc_.improves(node.lp.objective())) {
      trace_.nodes[node.id].status       = "pruned";
      trace_.nodes[node.id].prune_reason = "bound";
      continue;
    }
    if (cfg_.lookahead) {
      expand_lookahead(std::move(node));
    } else {
      expand_plain(std::move(node));
    }
  }
  if (limit) {
    double bound = inc_.objective;
    for (auto& o : open_) {
      bound = std::min(bound, o.lp.objective());
      trace_.nodes[o.id].status = "limit";
    }
    return finish(inc_.has_solution() ? solve_status_t::feasible : solve_status_t::limit_hit, bound);
  }
  if (!inc_.has_solution()) { return finish(solve_status_t::infeasible, inf); }
  return finish(solve_status_t::optimal, inc_.objective);
}

json branch_json(const std::optional<branch_t>& b)
{
  if (!b) { return nullptr; }
  return {{"var", b->var}, {"dir", b->dir == branch_dir_t::up ? "up" : "down"}, {"bound", b->bound}};
}

std::optional<branch_t> branch_from(const json& j)
{
  if (j.is_null()) { return std::nullopt; }
  return branch_t{j.at("var").get<int>(), j.at("dir").get<std::string>() == "up" ? branch_dir_t::up : branch_dir_t::down,
                  j.at("bound").get<double>()};
}

json num(double v)
{
  if (std::isfinite(v)) { return v; }
  return std::isnan(v) ? "nan" : v > 0 ? "inf" : "-inf";
}

}  // namespace

solve_result_t solve_mip(const mip_problem_t& problem, const solve_config_t& config)
{
  solver_t s(problem, config);
  return s.run();
}

json trace_to_json(const run_trace_t& t, const solve_result_t* result)
{
  json j;
  j["schema"]   = "ngb-trace/1";
  j["instance"] = t.instance;
  j["status"]   = std::string(to_string(t.status));
  json nodes    = json::array();
  for (const auto& n : t.nodes) {
    json s = json::array();
    for (const auto& [v, sc] : n.scores) { s.push_back({v, num(sc)}); }
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent},
                     {"depth", n.depth},
                     {"branch", branch_json(n.branch)},
                     {"x_o", num(n.objective)},
                     {"status", n.status},
                     {"scores", s},
                     {"prune_reason", n.prune_reason}});
  }
  j["nodes"]   = nodes;
  json incs    = json::array();
  for (const auto& e : t.incumbents) {
    incs.push_back({{"node", e.node}, {"nodes_seen", e.nodes_seen}, {"x_o", num(e.objective)}, {"source", e.source}});
  }
  j["incumbents"] = incs;
  json revs       = json::array();
  for (const auto& r : t.reversals) {
    revs.push_back({{"node", r.node}, {"var", r.var}, {"rc", num(r.rc)}, {"before", num(r.before)},
                    {"after", num(r.after)}, {"threshold", num(r.threshold)}, {"status", r.status}});
  }
  j["reversals"] = revs;
  json sym       = json::array();
  for (const auto& e : t.symdif) {
    sym.push_back({{"u", e.u}, {"v_parent", e.v_parent}, {"var", e.var},
                   {"dir", e.dir == branch_dir_t::up ? "up" : "down"}, {"intersect", e.metrics.intersect},
                   {"symdif", e.metrics.symdif}});
  }
  j["symdif"] = sym;
  json ext    = json::array();
  for (const auto& r : t.extended_tree) {
    ext.push_back({{"id", r.id}, {"parent", r.parent}, {"branch", branch_json(r.branch)}, {"tentative", r.tentative},
                   {"compulsory", r.compulsory}, {"uc", r.uc ? num(*r.uc) : json(nullptr)}});
  }
  j["extended_tree"] = ext;
  const auto& c      = t.counters;
  j["counters"]      = {{"nodes", c.nodes},
                        {"lp_solves", c.lp_solves},
                        {"pivots", c.pivots},
                        {"probes", c.probes},
                        {"estimates", c.estimates},
                        {"compulsory", c.compulsory},
                        {"tree_builds", c.tree_builds},
                        {"analytical_mae", num(c.analytical_error.mae())},
                        {"analytical_samples", c.analytical_error.count},
                        {"classic_mae", num(c.classic_error.mae())},
                        {"classic_samples", c.classic_error.count}};
  if (result) {
    j["result"] = {{"x_o", num(result->incumbent.objective)},
                   {"bound", num(result->bound)},
                   {"nodes_to_first_optimal", result->nodes_to_first_optimal},
                   {"x", result->incumbent.x}};
  }
  return j;
}

std::vector<symdif_t> replay_symdif(const json& trace)
{
  if (trace.value("schema", "") != "ngb-trace/1") { throw precondition_error("not an ngb-trace/1 document"); }
  extended_tree_t t;
  for (const auto& r : trace.at("extended_tree")) {
    const int id = r.at("id").get<int>();
    if (id == 0) {
      for (int k = 0; k < r.at("compulsory").get<int>(); ++k) { t.add_compulsory(t.root(), {0, 0, 0, true}); }
      continue;
    }
    auto b = branch_from(r.at("branch"));
    if (!b) { throw precondition_error("non-root extended-tree record without a branch"); }
    std::optional<double> uc;
    if (r.at("uc").is_number()) { uc = r.at("uc").get<double>(); }
    auto ref = t.add_child({t.session(), r.at("parent").get<int>()}, *b, r.at("tentative").get<bool>(), uc);
    if (ref.id != id) { throw precondition_error("extended-tree records out of order"); }
    for (int k = 0; k < r.at("compulsory").get<int>(); ++k) { t.add_compulsory(ref, {b->var, 0, 0, true}); }
  }
  std::vector<symdif_t> out;
  for (const auto& e : trace.at("symdif")) {
    out.push_back(t.metrics_prospective({t.session(), e.at("u").get<int>()}, {t.session(), e.at("v_parent").get<int>()}));
  }
  return out;
}

std::vector<bench_strategy_t> default_matrix()
{
  auto base = solve_config_t::defaults();
  std::vector<bench_strategy_t> m;
  m.push_back({"ng-2a", base});
  m.push_back({"ng-2b-d4", config_from_json({{"lookahead", 4}, {"postwin", "2b"}, {"lim", 2}, {"d0", 2}}, base)});
  m.push_back({"ng-d2", config_from_json({{"d2-mode", true}, {"v", 2.0}}, base)});
  m.push_back({"ng-straddle", config_from_json({{"straddle", true}}, base)});
  m.push_back({"winnow-vote", config_from_json({{"lookahead", 0}, {"criterion", "vote"}}, base)});
  m.push_back({"winnow-c3-dval", config_from_json({{"lookahead", 0}, {"criterion", "C3"}, {"node-select", "dval"},
                                                   {"dval-approach", 2}}, base)});
  m.push_back({"ng-analytical", config_from_json({{"pseudo", "analytical"}, {"refset", true}}, base)});
  return m;
}

std::vector<bench_strategy_t> matrix_from_json(const json& j)
{
  if (!j.is_array()) { throw precondition_error("strategy matrix must be a JSON array"); }
  std::vector<bench_strategy_t> m;
  for (const auto& e : j) {
    m.push_back({e.at("name").get<std::string>(), config_from_json(e.value("options", json::object()))});
  }
  return m;
}

bench_report_t run_benchmark(const std::filesystem::path& dir, std::span<const bench_strategy_t> matrix)
{
  bench_report_t rep;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".mps") { files.push_back(e.path()); }
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    mip_problem_t p;
    try {
      p = read_mps(f);
    } catch (const std::exception& ex) {
      spdlog::warn("skipping {}: {}", f.string(), ex.what());
      rep.skipped.push_back(f.filename().string());
      continue;
    }
    if (p.name.empty()) { p.name = f.stem().string(); }
    for (const auto& s : matrix) {
      auto r = solve_mip(p, s.config);
      bench_row_t row;
      row.instance  = f.filename().string();
      row.strategy  = s.name;
      row.status    = r.status;
      row.objective = r.incumbent.objective;
      row.nodes_to_first_optimal = r.nodes_to_first_optimal;
      row.nodes     = r.trace.counters.nodes;
      row.lp_solves = r.trace.counters.lp_solves;
      row.pivots    = r.trace.counters.pivots;
      row.seconds   = r.seconds;
      row.timeline  = r.trace.incumbents;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

json report_to_json(const bench_report_t& rep)
{
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json tl = json::array();
    for (const auto& e : r.timeline) { tl.push_back({{"nodes_seen", e.nodes_seen}, {"x_o", num(e.objective)}}); }
    rows.push_back({{"instance", r.instance},
                    {"strategy", r.strategy},
                    {"status", std::string(to_string(r.status))},
                    {"x_o", num(r.objective)},
                    {"nodes_to_first_optimal", r.nodes_to_first_optimal},
                    {"nodes", r.nodes},
                    {"lp_solves", r.lp_solves},
                    {"pivots", r.pivots},
                    {"incumbents", tl}});
  }
  return {{"schema", "ngb-bench/1"}, {"rows", rows}, {"skipped", rep.skipped}};
}

std::string report_table(const bench_report_t& rep)
{
  std::ostringstream os;
  os << std::left << std::setw(22) << "instance" << std::setw(18) << "strategy" << std::setw(11) << "status"
     << std::right << std::setw(14) << "x_o" << std::setw(8) << "first" << std::setw(8) << "nodes" << std::setw(8)
     << "solves" << std::setw(9) << "pivots" << std::setw(10) << "seconds" << "\n";
  for (const auto& r : rep.rows) {
    os << std::left << std::setw(22) << r.instance << std::setw(18) << r.strategy << std::setw(11)
       << to_string(r.status) << std::right << std::setw(14) << std::setprecision(8) << r.objective << std::setw(8)
       << r.nodes_to_first_optimal << std::setw(8) << r.nodes << std::setw(8) << r.lp_solves << std::setw(9)
       << r.pivots << std::setw(10) << std::fixed << std::setprecision(3) << r.seconds << std::defaultfloat << "\n";
  }
  return os.str();
}

}  // namespace ngb
