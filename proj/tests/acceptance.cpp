/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <ngb/cost_memory.hpp>
#include <ngb/criteria.hpp>
#include <ngb/driver.hpp>
#include <ngb/lookahead.hpp>
#include <ngb/mps.hpp>
#include <ngb/straddle.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace ngb;
namespace fs = std::filesystem;

struct verdict_t {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const verdict_t& v)
{
  std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << "  " << title << "  [" << v.detail << "]\n";
  if (!v.pass) { ++failures; }
}

template <class... A>
std::string cat(const A&... a)
{
  std::ostringstream os;
  os.precision(10);
  (os << ... << a);
  return os.str();
}

// ------------------------------------------------------------------ 1

verdict_t oracle_optimality()
{
  const fs::path dir = fs::path(NGB_TEST_DATA) / "corpus";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".mps") { files.push_back(e.path()); }
  }
  std::sort(files.begin(), files.end());
  if (files.size() != 25) { return {false, cat(files.size(), " instances in corpus")}; }
  const auto matrix = default_matrix();
  const auto start  = std::chrono::steady_clock::now();
  int runs = 0, wrong = 0;
  double worst = 0;
  std::string first_bad;
  for (const auto& f : files) {
    auto p = read_mps(f);
    if (p.num_integer() > 10 || p.lp.num_rows > 10) { return {false, cat(f.filename().string(), " exceeds desk scale")}; }
    auto oracle = testing::lattice_enumeration(p.lp, p.is_integer);
    if (!oracle) { return {false, cat(f.filename().string(), " has no integer point")}; }
    for (const auto& s : matrix) {
      auto r = solve_mip(p, s.config);
      ++runs;
      const double err = r.incumbent.has_solution() ? std::abs(r.incumbent.objective - oracle->objective) : inf;
      worst            = std::max(worst, err);
      if (r.status != solve_status_t::optimal || err > 1e-6) {
        ++wrong;
        if (first_bad.empty()) { first_bad = f.filename().string() + "/" + s.name; }
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {wrong == 0 && secs < 60.0,
          cat(runs, " runs over ", matrix.size(), " strategies, ", wrong, " off-optimum",
              first_bad.empty() ? "" : " (first " + first_bad + ")", ", max |error| ", worst, ", ", secs, " s")};
}

// ------------------------------------------------------------------ 2

verdict_t tree_counts()
{
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> frac(0.05, 0.95), cost(0.5, 5.0);
  std::uniform_int_distribution<int> base(-3, 3);
  std::vector<double> t, a, b;
  for (int i = 0; i < 20; ++i) {
    t.push_back(base(rng) + frac(rng));
    a.push_back(cost(rng));
    b.push_back(cost(rng));
  }
  auto p = testing::separable_fixture(t, a, b);
  dual_simplex_t lp(p.lp);
  lp.solve({});
  auto count = [&](int depth, post_winnow_t mode) {
    lookahead_config_t cfg;
    cfg.depth       = depth;
    cfg.early_exit  = false;
    cfg.post_winnow = mode;
    cfg.lim         = {3};
    cfg.d0          = 2;
    incumbent_t inc;
    return build_tree(lp, p, cfg, inc).stats.nodes_generated;
  };
  const int c14 = count(3, post_winnow_t::off), c126 = count(6, post_winnow_t::off);
  const int c48 = count(6, post_winnow_t::keep_pairs), c30 = count(6, post_winnow_t::best_sibling);
  return {c14 == 14 && c126 == 126 && c48 == 48 && c30 == 30, cat(c14, " / ", c126, " / ", c48, " / ", c30)};
}

// ------------------------------------------------------------------ 3

verdict_t idealized_probability()
{
  std::mt19937_64 rng(3);
  const double got = idealized_path_correctness(0.6, 3, 100000, rng);
  return {std::abs(got - 0.936) <= 0.005, cat("estimate ", got)};
}

// ------------------------------------------------------------------ 4

std::vector<branch_eval_t> random_evals(std::mt19937_64& rng, double lo, double hi, bool zeros)
{
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_real_distribution<double> val(lo, hi);
  std::bernoulli_distribution zero(0.15);
  std::vector<branch_eval_t> out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    double u = val(rng), d = val(rng);
    if (zeros && zero(rng)) { u = 0; }
    if (zeros && zero(rng)) { d = 0; }
    out.push_back(make_eval(i, 0.0, 0.5, 0.5, u, d, inf));
  }
  return out;
}

verdict_t criterion_identities()
{
  std::mt19937_64 rng(4);
  auto c1 = criterion_spec_t::of(criterion_t::c1_product);
  auto c2 = criterion_spec_t::of(criterion_t::c2a);
  c2.p    = 0;
  int zero_mismatch = 0;
  for (int t = 0; t < 1000; ++t) {
    auto e = random_evals(rng, 0, 10, true);
    auto a = select(e, c1), b = select(e, c2);
    zero_mismatch += a.var != b.var || a.dir != b.dir;
  }
  int large_mismatch = 0;
  for (auto id : {criterion_t::c2a, criterion_t::c2b}) {
    auto spec = criterion_spec_t::of(id);
    spec.p    = 64;
    for (int t = 0; t < 1000; ++t) {
      auto e       = random_evals(rng, 0.1, 10, false);
      size_t widest = 0;
      for (size_t k = 1; k < e.size(); ++k) {
        if (std::abs(e[k].eval_up - e[k].eval_down) > std::abs(e[widest].eval_up - e[widest].eval_down)) { widest = k; }
      }
      large_mismatch += select(e, spec).index != widest;
    }
  }
  return {zero_mismatch == 0 && large_mismatch == 0,
          cat("p=0 vs C1: ", zero_mismatch, "/1000 differ; p=64 vs widest spread: ", large_mismatch, "/2000 differ")};
}

// ------------------------------------------------------------------ 5

verdict_t single_pivot_probe()
{
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(2, 7);
  int tableaus = 0, probes = 0;
  double worst = 0;
  bool ok = true;
  for (int it = 0; tableaus < 100 && it < 5000; ++it) {
    dual_simplex_t lp(testing::random_lp(rng, dim(rng), dim(rng), false));
    if (lp.solve({}).status != lp_status_t::optimal) { continue; }
    int j = -1;
    for (int k = 0; k < lp.num_structural() && j < 0; ++k) {
      if (lp.is_basic(k) && !is_integral(lp.value(k))) { j = k; }
    }
    if (j < 0) { continue; }
    ++tableaus;
    for (auto dir : {branch_dir_t::up, branch_dir_t::down}) {
      const double predicted = probe_single_pivot(lp, j, dir);
      dual_simplex_t child   = lp;
      const double before    = child.objective();
      apply_branch(child, j, dir);
      pivot_budget_t one;
      one.max_pivots = 1;
      auto res       = child.solve(one);
      ++probes;
      if (!std::isfinite(predicted)) {
        ok = ok && res.status == lp_status_t::infeasible;
      } else {
        const double err = std::abs(res.dual_bound - before - predicted);
        worst            = std::max(worst, err);
        ok               = ok && res.status != lp_status_t::infeasible && err <= 1e-9;
      }
    }
  }
  return {ok && tableaus == 100, cat(tableaus, " tableaus, ", probes, " probes, max error ", worst)};
}

// ------------------------------------------------------------------ 6

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) { s += a[k] * b[k]; }
  return s;
}

verdict_t straddle_checks()
{
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), slack(0.01, 2.0), beta(-4.0, 4.0);
  int rows = 0, dominated = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> c{1.0}, lo{-50}, hi{50}, row{1.0};
    for (int i = 0; i < 4; ++i) {
      const double a = coef(rng);
      row.push_back(a);
      c.push_back(a + slack(rng));
      lo.push_back(0);
      hi.push_back(inf);
    }
    double b = beta(rng);
    if (is_integral(b)) { b += 0.37; }
    mip_problem_t p;
    p.lp = lp_model_t::with_columns(c, lo, hi);
    p.lp.add_row(row, b);
    p.is_integer.assign(5, 1);
    dual_simplex_t lp(p.lp);
    if (lp.solve({}).status != lp_status_t::optimal || !lp.is_basic(0)) { continue; }
    ++rows;
    auto plain = eval_plain(lp, p, 0, {}, inf, false).eval;
    auto strad = straddle_probe(lp, p, 0, {}, inf, false).eval;
    // the node bound after branching is the weaker child
    dominated += std::min(strad.obj_up, strad.obj_down) >= std::min(plain.obj_up, plain.obj_down) - 1e-7;
  }

  int instances = 0, bad_partitions = 0;
  for (int t = 0; t < 1000 && instances < 50; ++t) {
    mip_problem_t p;
    p.lp = testing::random_lp(rng, 3, 4, true);
    p.is_integer.assign(4, 1);
    dual_simplex_t lp(p.lp);
    if (lp.solve({}).status != lp_status_t::optimal) { continue; }
    auto frac = detect_fractional(lp.solution().x, p);
    if (frac.empty()) { continue; }
    auto pts = testing::integer_points(p.lp);
    ++instances;
    for (const auto& f : frac) {
      auto up   = make_straddle(lp, p, f.var, branch_dir_t::up);
      auto down = make_straddle(lp, p, f.var, branch_dir_t::down);
      for (const auto& x : pts) {
        const bool in_up   = dot(up.coefs, x) - up.rhs >= -1e-9;
        const bool in_down = dot(down.coefs, x) - down.rhs >= -1e-9;
        bad_partitions += in_up == in_down;
      }
    }
  }
  return {rows == 200 && dominated == rows && instances == 50 && bad_partitions == 0,
          cat(dominated, "/", rows, " rows dominated, ", instances, " instances, ", bad_partitions,
              " points outside exactly one child")};
}

// ------------------------------------------------------------------ 7

verdict_t dval_calibration()
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> step(0.1, 2.0), mc(0.2, 3.0);
  double worst = 0;
  double reduce = 0;
  int checks = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int d_star = 3 + trial % 8;
    std::vector<dval_point_t> path;
    double obj = 0;
    for (int d = 0; d <= d_star; ++d) {
      path.push_back({d, obj, d == d_star ? 0.0 : mc(rng)});
      obj += step(rng);
    }
    const double xs = path.back().objective;
    for (auto approach : {dval_approach_t::one, dval_approach_t::two}) {
      dval_table_t t(approach);
      t.calibrate(path, xs);
      for (int d = 1; d <= d_star - 2; ++d) {
        const double got = t.dval(d, path[d + 1].objective, path[d].objective, path[d + 1].min_cost);
        worst            = std::max(worst, std::abs(got - (xs - path[d].objective)));
        ++checks;
      }
    }
    auto one = dval_table_t::approach_one(path, xs);
    auto two = dval_table_t::approach_two(path, xs);
    reduce   = std::max({reduce, std::abs(two.at(d_star - 2).w_o - one.at(d_star - 2).w_o),
                         std::abs(two.at(d_star - 2).w_1 - one.at(d_star - 2).w_1)});
  }
  return {worst <= 1e-9 && reduce <= 1e-9,
          cat(checks, " path nodes, max gap error ", worst, ", approach-2 vs approach-1 at d*-2 ", reduce)};
}

// ------------------------------------------------------------------ 8, 10

struct traced_t {
  int floor       = 1 << 30;
  long events     = 0;
  long mismatches = 0;
  int runs        = 0;
  int nondeterministic = 0;
};

traced_t traced_runs()
{
  traced_t out;
  const fs::path dir = fs::path(NGB_TEST_DATA) / "corpus";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".mps") { files.push_back(e.path()); }
  }
  std::sort(files.begin(), files.end());
  std::vector<solve_config_t> configs{solve_config_t::defaults(), config_from_json({{"pseudo", "analytical"}}),
                                      config_from_json({{"n1", 4}}), config_from_json({{"lookahead", 0}, {"n1", 4}}),
                                      config_from_json({{"refset", true}, {"node-select", "dval"}, {"seed", 11}})};
  for (const auto& f : files) {
    auto p = read_mps(f);
    for (const auto& cfg : configs) {
      auto a = solve_mip(p, cfg);
      auto b = solve_mip(p, cfg);
      const auto ja = trace_to_json(a.trace, &a).dump();
      out.nondeterministic += ja != trace_to_json(b.trace, &b).dump();
      ++out.runs;
      auto replay = replay_symdif(nlohmann::json::parse(ja));
      for (size_t e = 0; e < replay.size(); ++e) {
        const auto& m = a.trace.symdif[e].metrics;
        out.mismatches += replay[e].symdif != m.symdif || replay[e].intersect != m.intersect;
        out.floor = std::min(out.floor, m.symdif);
      }
      out.events += static_cast<long>(replay.size());
    }
  }
  return out;
}

// ------------------------------------------------------------------ 9

verdict_t refset_arithmetic()
{
  bool ok = true;
  reference_set_t rs({0.5, 1.0, 3.0}, 0.0, 10, 0.5);
  std::vector<double> x{0.5, 3.0, 2.0};
  std::vector<ref_branch_t> path{{1}, {2}, {0, true}};
  ok = ok && rs.add(x, 4.0, path);
  const auto& r = rs.solutions().front();
  ok = ok && r.avg_cng == 2.0 && rs.stats(1, branch_dir_t::up).guc == 1.0 && rs.stats(2, branch_dir_t::down).guc == 2.0;
  ok = ok && rs.stats(1, branch_dir_t::down).guc == large_cost && rs.stats(2, branch_dir_t::up).guc == large_cost;

  // four solutions moving x_0 up; the smallest GUC is 2, so GC = 2 / 4^0.5
  reference_set_t gc({0.0, 0.0}, 0.0, 10, 0.5);
  for (double u : {1.0, 2.0, 4.0, 8.0}) {
    std::vector<double> y{u, 0.0};
    std::vector<ref_branch_t> pp{{0}};
    gc.add(y, 2.0 * u * u, pp);
  }
  const auto& st = gc.stats(0, branch_dir_t::up);
  ok = ok && st.n == 4 && st.guc == 2.0 && st.gc == 1.0;

  // BD {1, 3}, theta = 0.5: the limit is exactly 2
  reference_set_t g({0.0}, 0.0);
  std::vector<ref_branch_t> pp{{0}};
  std::vector<double> a{1.0}, b{3.0};
  g.add(a, 1.0, pp);
  g.add(b, 2.0, pp);
  const bool at_limit   = g.gate(0, branch_dir_t::up, 2.0, false, 0.5);
  const bool past_limit = g.gate(0, branch_dir_t::up, 2.0 + 1e-6, false, 0.5);
  const bool binary     = g.gate(0, branch_dir_t::up, 100.0, true, 0.5);
  const bool theta_one  = g.gate(0, branch_dir_t::up, 1.0, false, 1.0) && !g.gate(0, branch_dir_t::up, 1.5, false, 1.0);
  ok = ok && at_limit && !past_limit && binary && theta_one;
  return {ok, cat("GUC1+=", rs.stats(1, branch_dir_t::up).guc, " GUC2-=", rs.stats(2, branch_dir_t::down).guc,
                  " GC+=", st.gc, " gate(2)=", at_limit, " gate(2+1e-6)=", past_limit)};
}

}  // namespace

int main()
{
  report(1, "oracle optimality on the corpus", oracle_optimality());
  report(2, "tree-count identities", tree_counts());
  report(3, "idealized path probability", idealized_probability());
  report(4, "criterion identities", criterion_identities());
  report(5, "single-pivot probe", single_pivot_probe());
  report(6, "straddle dominance and validity", straddle_checks());
  report(7, "Dval calibration", dval_calibration());
  const auto traced = traced_runs();
  report(8, "SymDif floor",
         {traced.events > 0 && traced.floor == 3 && traced.mismatches == 0,
          cat("min ", traced.floor, " over ", traced.events, " pairs in ", traced.runs, " runs, ", traced.mismatches,
              " replay mismatches")});
  report(9, "reference-set arithmetic", refset_arithmetic());
  report(10, "deterministic traces",
         {traced.nondeterministic == 0, cat(traced.runs, " repeated runs, ", traced.nondeterministic, " differ")});
  return failures == 0 ? 0 : 1;
}
