/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/cost_memory.hpp>
#include <ngb/errors.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

namespace ngb {

void pseudo_cost_table_t::update(int var, branch_dir_t dir, double uc, bool lp_feasible)
{
  if (!lp_feasible || !std::isfinite(uc)) { return; }
  auto& e = (dir == branch_dir_t::up ? up_ : down_)[var];
  e.sum += uc;
  ++e.n;
}

double pseudo_cost_table_t::pseudo_cost(int var, branch_dir_t dir) const
{
  const auto& m = dir == branch_dir_t::up ? up_ : down_;
  auto it       = m.find(var);
  return it == m.end() || it->second.n == 0 ? 0.0 : it->second.sum / it->second.n;
}

int pseudo_cost_table_t::count(int var, branch_dir_t dir) const
{
  const auto& m = dir == branch_dir_t::up ? up_ : down_;
  auto it       = m.find(var);
  return it == m.end() ? 0 : it->second.n;
}

void analytical_thresholds_t::validate() const
{
  if (max_symdif < 3) { throw precondition_error("MaxSymDif below the smallest reachable SymDif of 3"); }
  if (min_intersect < 0) { throw precondition_error("MinIntersect must be nonnegative"); }
  if (!(late_fraction > 0)) { throw precondition_error("late-stage fraction must be positive"); }
}

namespace {
std::atomic<std::uint64_t> next_session{1};
}

extended_tree_t::extended_tree_t() : session_(next_session++)
{
  records_.push_back({});
  children_.emplace_back();
}

void extended_tree_t::check(ext_ref_t r) const
{
  if (r.session != session_) { throw precondition_error("extended-tree node from another solve session"); }
  if (r.id < 0 || r.id >= size()) { throw precondition_error("unknown extended-tree node"); }
}

const ext_record_t& extended_tree_t::at(ext_ref_t r) const
{
  check(r);
  return records_[r.id];
}

ext_ref_t extended_tree_t::add_child(ext_ref_t parent, const branch_t& b, bool tentative, std::optional<double> uc)
{
  check(parent);
  ext_record_t rec;
  rec.id        = size();
  rec.parent    = parent.id;
  rec.depth     = records_[parent.id].depth + 1;
  rec.branch    = b;
  rec.tentative = tentative;
  if (uc && std::isfinite(*uc)) {
    rec.uc  = uc;
    rec.seq = ++seq_;
    by_branch_[{b.var, static_cast<int>(b.dir)}].push_back(rec.id);
  }
  max_depth_ = std::max(max_depth_, rec.depth);
  children_[parent.id].push_back(rec.id);
  records_.push_back(rec);
  children_.emplace_back();
  return {session_, rec.id};
}

ext_ref_t extended_tree_t::take(ext_ref_t parent, const branch_t& b, std::optional<double> uc)
{
  check(parent);
  for (int c : children_[parent.id]) {
    auto& r = records_[c];
    if (r.tentative && r.branch && r.branch->var == b.var && r.branch->dir == b.dir && r.branch->bound == b.bound) {
      r.tentative = false;
      if (uc && std::isfinite(*uc) && !r.uc) {
        r.uc  = uc;
        r.seq = ++seq_;
        by_branch_[{b.var, static_cast<int>(b.dir)}].push_back(r.id);
      }
      return {session_, c};
    }
  }
  return add_child(parent, b, false, uc);
}

void extended_tree_t::add_compulsory(ext_ref_t node, const bound_change_t& c)
{
  check(node);
  records_[node.id].compulsory.push_back(c);
  // every node below gains one shared edge
  std::vector<int> stack{node.id};
  while (!stack.empty()) {
    int k = stack.back();
    stack.pop_back();
    ++records_[k].depth;
    max_depth_ = std::max(max_depth_, records_[k].depth);
    for (int ch : children_[k]) { stack.push_back(ch); }
  }
}

int extended_tree_t::path_length(ext_ref_t u) const { return at(u).depth; }

int extended_tree_t::lca(int a, int b) const
{
  std::set<int> up;
  for (int k = a; k >= 0; k = records_[k].parent) { up.insert(k); }
  for (int k = b; k >= 0; k = records_[k].parent) {
    if (up.count(k)) { return k; }
  }
  return 0;
}

symdif_t extended_tree_t::metrics(ext_ref_t u, ext_ref_t v) const
{
  check(u);
  check(v);
  int w = lca(u.id, v.id);
  symdif_t m;
  m.intersect = records_[w].depth;
  m.symdif    = records_[u.id].depth + records_[v.id].depth - 2 * m.intersect;
  return m;
}

symdif_t extended_tree_t::metrics_prospective(ext_ref_t u, ext_ref_t v_parent) const
{
  check(u);
  check(v_parent);
  int w = lca(u.id, v_parent.id);
  symdif_t m;
  m.intersect = records_[w].depth;
  m.symdif    = records_[u.id].depth + records_[v_parent.id].depth + 1 - 2 * m.intersect;
  return m;
}

std::vector<ext_ref_t> extended_tree_t::uc_sources(int var, branch_dir_t dir) const
{
  std::vector<ext_ref_t> out;
  auto it = by_branch_.find({var, static_cast<int>(dir)});
  if (it == by_branch_.end()) { return out; }
  for (int id : it->second) { out.push_back({session_, id}); }
  return out;
}

bool dominates(const symdif_t& a, const symdif_t& b)
{
  return a.intersect >= b.intersect && a.symdif <= b.symdif &&
         (a.intersect > b.intersect || a.symdif < b.symdif);
}

std::optional<analytical_pick_t> extended_tree_t::analytical_uc(int var,
                                                                branch_dir_t dir,
                                                                ext_ref_t v_parent,
                                                                const analytical_thresholds_t& th,
                                                                std::optional<int> incumbent_depth) const
{
  check(v_parent);
  const int v_depth = records_[v_parent.id].depth + 1;
  if (incumbent_depth && v_depth > th.late_fraction * *incumbent_depth) { return std::nullopt; }
  auto sources = uc_sources(var, dir);
  if (sources.empty()) { return std::nullopt; }
  if (th.fast_path) { sources.erase(sources.begin(), sources.end() - 1); }

  std::vector<symdif_t> m;
  for (auto s : sources) { m.push_back(metrics_prospective(s, v_parent)); }
  std::optional<analytical_pick_t> best;
  long best_seq = -1;
  for (size_t i = 0; i < sources.size(); ++i) {
    bool dominated = false;
    for (size_t k = 0; k < sources.size() && !dominated; ++k) { dominated = k != i && dominates(m[k], m[i]); }
    if (dominated) { continue; }
    if (m[i].symdif > th.max_symdif || m[i].intersect < th.min_intersect || m[i].ratio() < th.min_ratio) {
      continue;
    }
    const auto& rec = records_[sources[i].id];
    if (!best || m[i].ratio() > best->metrics.ratio() ||
        (m[i].ratio() == best->metrics.ratio() && rec.seq > best_seq)) {
      best     = analytical_pick_t{sources[i], *rec.uc, m[i]};
      best_seq = rec.seq;
    }
  }
  return best;
}

double single_weight(double x_star, double x_root, double eval)
{
  if (eval == 0) { throw precondition_error("zero evaluation has no calibrating weight"); }
  return (x_star - x_root) / eval;
}

std::optional<dval_weights_t> solve_weights(double a1, double b1, double c1, double a2, double b2, double c2)
{
  const double det   = a1 * b2 - a2 * b1;
  const double scale = std::abs(a1 * b2) + std::abs(a2 * b1);
  if (std::abs(det) <= 1e-12 * scale || std::abs(det) < 1e-300) { return std::nullopt; }
  return dval_weights_t{(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det};
}

namespace {

void check_path(std::span<const dval_point_t> path)
{
  for (size_t k = 0; k < path.size(); ++k) {
    if (path[k].depth != static_cast<int>(k)) { throw precondition_error("calibration path must list depths 0..d*"); }
  }
}

double w1_for(const dval_point_t& child, double x_star)
{
  const double gap = x_star - child.objective;
  if (std::abs(gap) <= 1e-12 * (1.0 + std::abs(x_star)) || child.min_cost <= 0) { return 0.0; }
  return gap / child.min_cost;
}

}  // namespace

std::map<int, dval_weights_t> dval_table_t::approach_one(std::span<const dval_point_t> path, double x_star)
{
  check_path(path);
  std::map<int, dval_weights_t> out;
  const int d_star = static_cast<int>(path.size()) - 1;
  for (int d = 1; d <= d_star - 2; ++d) { out[d] = {1.0, w1_for(path[d + 1], x_star)}; }
  return out;
}

std::map<int, dval_weights_t> dval_table_t::approach_two(std::span<const dval_point_t> path, double x_star)
{
  check_path(path);
  auto out         = approach_one(path, x_star);
  const int d_star = static_cast<int>(path.size()) - 1;
  for (int d = 1; d <= d_star - 2; ++d) {
    const auto& p0 = path[d];
    const auto& p1 = path[d + 1];
    const auto& p2 = path[d + 2];
    auto w = solve_weights(p1.objective - p0.objective, p1.min_cost, x_star - p0.objective,
                           p2.objective - p1.objective, p2.min_cost, x_star - p1.objective);
    if (w) { out[d] = *w; }  // singular systems keep the first approach's weights
  }
  return out;
}

void dval_table_t::calibrate(std::span<const dval_point_t> path, double x_star)
{
  last_ = approach_ == dval_approach_t::one ? approach_one(path, x_star) : approach_two(path, x_star);
  for (const auto& [d, w] : last_) {
    auto& [s, n] = sum_[d];
    s.w_o = n == 0 ? w.w_o : s.w_o + w.w_o;
    s.w_1 = n == 0 ? w.w_1 : s.w_1 + w.w_1;
    ++n;
  }
}

dval_weights_t dval_table_t::weights(int d) const
{
  if (sum_.empty()) { return {1.0, 1.0}; }
  auto avg = [](const std::pair<dval_weights_t, int>& e) {
    return dval_weights_t{e.first.w_o / e.second, e.first.w_1 / e.second};
  };
  if (auto it = sum_.find(d); it != sum_.end()) { return avg(it->second); }
  if (d < sum_.begin()->first) { return avg(sum_.begin()->second); }
  // beyond the calibrated depths: w_o = 1 and the deepest w_1
  return {1.0, avg(sum_.rbegin()->second).w_1};
}

double dval_table_t::dval(int d, double child_obj, double parent_obj, double min_cost) const
{
  auto w = weights(d);
  return w.w_o * (child_obj - parent_obj) + w.w_1 * min_cost;
}

reference_set_t::reference_set_t(std::vector<double> root_x, double root_obj, int capacity, double p,
                                 bool gap_normalized)
  : root_x_(std::move(root_x)), root_obj_(root_obj), capacity_(capacity), p_(p), gap_normalized_(gap_normalized)
{
  if (capacity_ < 1) { throw precondition_error("reference set capacity must be positive"); }
  if (p_ < 0) { throw precondition_error("global-cost exponent must be nonnegative"); }
}

bool reference_set_t::add(std::span<const double> x, double objective, std::span<const ref_branch_t> path)
{
  if (x.size() != root_x_.size()) { throw precondition_error("solution length differs from the root"); }
  for (const auto& s : sols_) {
    bool same = true;
    for (size_t j = 0; j < x.size() && same; ++j) { same = std::abs(s.x[j] - x[j]) <= 1e-9; }
    if (same) { return false; }
  }
  ref_solution_t r;
  r.x.assign(x.begin(), x.end());
  r.objective = objective;
  std::set<int> vars;
  for (const auto& b : path) {
    if (b.compulsory) { continue; }
    const double d = x[b.var] - root_x_[b.var];
    if (std::abs(d) <= 1e-9) { continue; }
    vars.insert(b.var);
    r.delta[b.var] = d;
  }
  r.necessary.assign(vars.begin(), vars.end());
  const double change = std::abs(root_obj_ - objective);
  r.avg_cng           = gap_normalized_ ? change : r.necessary.empty() ? 0.0 : change / r.necessary.size();

  if (static_cast<int>(sols_.size()) >= capacity_) {
    auto worst = std::max_element(sols_.begin(), sols_.end(),
                                  [](const auto& a, const auto& b) { return a.objective < b.objective; });
    if (objective >= worst->objective) { return false; }
    *worst = std::move(r);
  } else {
    sols_.push_back(std::move(r));
  }
  recompute();
  return true;
}

double reference_set_t::guc(int var, branch_dir_t dir, const ref_solution_t& r) const
{
  auto it = r.delta.find(var);
  if (it == r.delta.end()) { return large_cost; }
  const double d = it->second;
  if (dir == branch_dir_t::up && d > 0) { return r.avg_cng / d; }
  if (dir == branch_dir_t::down && d < 0) { return r.avg_cng / -d; }
  return large_cost;
}

void reference_set_t::recompute()
{
  up_.clear();
  down_.clear();
  std::set<int> vars;
  for (const auto& r : sols_) { vars.insert(r.necessary.begin(), r.necessary.end()); }
  for (int j : vars) {
    for (auto dir : {branch_dir_t::up, branch_dir_t::down}) {
      ref_direction_stats_t st;
      double bd_sum = 0;
      for (const auto& r : sols_) {
        st.guc  = std::min(st.guc, guc(j, dir, r));
        auto it = r.delta.find(j);
        if (it == r.delta.end()) { continue; }
        const bool counts = dir == branch_dir_t::up ? it->second > 0 : it->second < 0;
        if (!counts) { continue; }
        ++st.n;
        const double bd = std::abs(it->second);
        st.min_bd       = st.min_bd ? std::min(*st.min_bd, bd) : bd;
        st.max_bd       = st.max_bd ? std::max(*st.max_bd, bd) : bd;
        bd_sum += bd;
      }
      if (st.n > 0) {
        st.gc      = st.guc / std::pow(st.n, p_);
        st.mean_bd = bd_sum / st.n;
      }
      (dir == branch_dir_t::up ? up_ : down_)[j] = st;
    }
  }
}

const ref_direction_stats_t& reference_set_t::stats(int var, branch_dir_t dir) const
{
  static const ref_direction_stats_t none{};
  const auto& m = dir == branch_dir_t::up ? up_ : down_;
  auto it       = m.find(var);
  return it == m.end() ? none : it->second;
}

bool reference_set_t::gate(int var, branch_dir_t dir, double accumulated, bool binary, double theta) const
{
  if (binary) { return true; }
  const auto& st = stats(var, dir);
  if (!st.min_bd) { return true; }
  const double limit = theta * *st.min_bd + (1.0 - theta) * *st.max_bd;
  return accumulated <= limit + 1e-9;
}

}  // namespace ngb
