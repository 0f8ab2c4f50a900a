/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "support/corpus.hpp"
#include "support/oracles.hpp"

#include <ngb/driver.hpp>
#include <ngb/errors.hpp>
#include <ngb/mps.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace ngb {
namespace {

namespace fs = std::filesystem;

// min -5x - 4y  s.t.  6x + 4y <= 24,  x + 2y <= 6,  x, y in {0..5}
mip_problem_t two_var_knapsack()
{
  mip_problem_t p;
  p.name = "knap2";
  p.lp   = lp_model_t::with_columns(std::vector<double>{-5, -4}, std::vector<double>{0, 0}, std::vector<double>{5, 5});
  p.lp.add_row(std::vector<double>{-6, -4}, -24);
  p.lp.add_row(std::vector<double>{-1, -2}, -6);
  p.is_integer = {1, 1};
  p.col_names  = {"x", "y"};
  p.row_names  = {"cap", "aux"};
  return p;
}

solve_config_t plain_config()
{
  return config_from_json({{"lookahead", 0}});
}

TEST(Solve, TwoVariableKnapsackMatchesLattice)
{
  auto p      = two_var_knapsack();
  auto oracle = testing::lattice_enumeration(p.lp, p.is_integer);
  ASSERT_TRUE(oracle);
  auto relax = testing::vertex_enumeration(p.lp);
  ASSERT_TRUE(relax);
  EXPECT_LT(relax->objective, oracle->objective - 1e-6);  // root is fractional
  for (const auto& cfg : {solve_config_t::defaults(), plain_config()}) {
    auto r = solve_mip(p, cfg);
    EXPECT_EQ(r.status, solve_status_t::optimal);
    EXPECT_NEAR(r.incumbent.objective, oracle->objective, 1e-9);
    EXPECT_TRUE(is_mip_feasible(r.incumbent.x, p));
    EXPECT_NEAR(r.bound, oracle->objective, 1e-9);
  }
}

TEST(Solve, IntegralRootNeedsNoBranch)
{
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(std::vector<double>{1, 2}, std::vector<double>{0, 0}, std::vector<double>{9, 9});
  p.lp.add_row(std::vector<double>{1, 0}, 2);
  p.lp.add_row(std::vector<double>{0, 1}, 3);
  p.is_integer = {1, 1};
  auto r       = solve_mip(p, solve_config_t::defaults());
  EXPECT_EQ(r.status, solve_status_t::optimal);
  EXPECT_DOUBLE_EQ(r.incumbent.objective, 8);
  ASSERT_EQ(r.trace.nodes.size(), 1u);
  EXPECT_EQ(r.trace.nodes[0].status, "integral");
  EXPECT_FALSE(r.trace.nodes[0].branch);
  EXPECT_EQ(r.incumbent.node, 0);
}

TEST(Solve, NodeLimitOfOneReportsRootBound)
{
  auto p   = two_var_knapsack();
  auto cfg = solve_config_t::defaults();
  cfg.max_nodes = 1;
  auto r     = solve_mip(p, cfg);
  auto relax = testing::vertex_enumeration(p.lp);
  EXPECT_EQ(r.status, solve_status_t::limit_hit);
  EXPECT_NEAR(r.bound, relax->objective, 1e-9);
  ASSERT_EQ(r.trace.nodes.size(), 1u);
  EXPECT_EQ(r.trace.nodes[0].status, "limit");
}

TEST(Solve, InfeasibleModel)
{
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(std::vector<double>{1}, std::vector<double>{0}, std::vector<double>{3});
  p.lp.add_row(std::vector<double>{2}, 3);   // x >= 1.5
  p.lp.add_row(std::vector<double>{-2}, -3.8);  // x <= 1.9
  p.is_integer = {1};
  auto r       = solve_mip(p, solve_config_t::defaults());
  EXPECT_EQ(r.status, solve_status_t::infeasible);
  EXPECT_FALSE(r.incumbent.has_solution());
}

TEST(SelectOpen, DvalArgmin)
{
  dval_table_t t;
  std::vector<open_summary_t> open{{2, 1, 5, 0, 0}, {2, 2, 3, 0, 0}};
  EXPECT_EQ(select_open_node(open, node_select_t::best_dval, t), 1u);
}

TEST(SelectOpen, UncalibratedWeightsAreOne)
{
  dval_table_t t;
  ASSERT_FALSE(t.calibrated());
  // (1, 1): 2 + 1 = 3 beats 1 + 3 = 4; with w1 = 0 the order would flip
  std::vector<open_summary_t> open{{3, 1, 2, 0, 1}, {3, 2, 1, 0, 3}};
  EXPECT_EQ(select_open_node(open, node_select_t::best_dval, t), 0u);
}

TEST(SelectOpen, DepthFirstTiesGoToMostRecent)
{
  dval_table_t t;
  std::vector<open_summary_t> open{{4, 1, 0, 0, 0}, {4, 2, 0, 0, 0}, {2, 3, 0, 0, 0}};
  EXPECT_EQ(select_open_node(open, node_select_t::depth_first, t), 1u);
  EXPECT_THROW(select_open_node({}, node_select_t::depth_first, t), precondition_error);
}

TEST(Reversal, Threshold)
{
  std::vector<double> rc{1, 5, 3};
  const double t = reversal_threshold(rc, 0.5);
  EXPECT_DOUBLE_EQ(t, 4.0);
  EXPECT_EQ(std::count_if(rc.begin(), rc.end(), [&](double r) { return r >= t; }), 1);
}

TEST(Reversal, NoCandidateIsNoOp)
{
  lookahead_result_t empty;
  mip_problem_t p = two_var_knapsack();
  EXPECT_FALSE(try_reversal(empty, p, 3, 0.5));
}

bool in_box(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi)
{
  for (size_t j = 0; j < lo.size(); ++j) {
    if (x[j] < lo[j] - 1e-9 || x[j] > hi[j] + 1e-9) { return false; }
  }
  return true;
}

TEST(Reversal, BoundedImprovementAndDisjointRegion)
{
  int checked = 0, tight = 0;
  for (int k = 0; k < testing::corpus_size; ++k) {
    auto p = testing::corpus_instance(k);
    if (p.num_integer() != p.lp.num_cols) { continue; }
    p.tighten_integer_bounds();
    auto points = testing::integer_points(p.lp);
    dual_simplex_t root(p.lp);
    if (root.solve({}).status != lp_status_t::optimal) { continue; }
    for (int d : {2, 3}) {
      auto cfg        = solve_config_t::defaults().tree;
      cfg.depth       = d;
      cfg.post_winnow = post_winnow_t::off;
      incumbent_t inc;
      auto tree = build_tree(root, p, cfg, inc, {});
      for (double beta : {0.0, 0.5, 1.0}) {
        auto r = try_reversal(tree, p, d, beta);
        if (!r) { continue; }
        ++checked;
        const auto& leaf = tree.nodes[r->leaf];
        const int j      = r->var;
        // the reversed domain never meets the leaf's
        EXPECT_TRUE(r->upper[j] < leaf.lower[j] || r->lower[j] > leaf.upper[j]);
        for (const auto& x : points) {
          EXPECT_FALSE(in_box(x, r->lower, r->upper) && in_box(x, leaf.lower, leaf.upper));
        }
        // the reversed node stays inside the region of the branch's parent
        int c = r->leaf;
        while (tree.nodes[c].var != j || tree.nodes[c].depth == 0) { c = tree.nodes[c].parent; }
        const auto& par = tree.nodes[tree.nodes[c].parent];
        for (const auto& x : points) {
          if (in_box(x, r->lower, r->upper)) { EXPECT_TRUE(in_box(x, par.lower, par.upper)); }
        }
        if (c == r->leaf && r->after.lp_feasible()) {
          ++tight;
          const double dist = r->reversed == branch_dir_t::up ? leaf.lower[j] - r->lower[j] : r->upper[j] - leaf.upper[j];
          EXPECT_LE(r->before - r->after.objective, r->rc * dist + 1e-7);
          if (dist == 1) { EXPECT_LE(r->before - r->after.objective, r->rc + 1e-7); }
        }
      }
    }
  }
  EXPECT_GT(checked, 0);
  EXPECT_GT(tight, 0);
}

class CorpusRun : public ::testing::TestWithParam<int> {};

TEST_P(CorpusRun, SoundPruningAndTraceInvariants)
{
  auto p      = testing::corpus_instance(GetParam());
  auto oracle = testing::lattice_enumeration(p.lp, p.is_integer);
  ASSERT_TRUE(oracle);
  for (const auto& cfg : {solve_config_t::defaults(), plain_config(),
                          config_from_json({{"pseudo", "analytical"}, {"refset", true}, {"reversals", true}})}) {
    auto r = solve_mip(p, cfg);
    ASSERT_EQ(r.status, solve_status_t::optimal) << p.name;
    EXPECT_NEAR(r.incumbent.objective, oracle->objective, 1e-6) << p.name;
    EXPECT_TRUE(is_mip_feasible(r.incumbent.x, p));
    for (size_t k = 0; k < r.trace.nodes.size(); ++k) {
      const auto& n = r.trace.nodes[k];
      EXPECT_EQ(n.id, static_cast<int>(k));
      EXPECT_LT(n.parent, n.id);
      if (n.status == "pruned") { EXPECT_GE(n.objective, oracle->objective - cfg.epsilon) << p.name; }
      EXPECT_NE(n.status, "open");
    }
    for (size_t k = 1; k < r.trace.incumbents.size(); ++k) {
      EXPECT_LT(r.trace.incumbents[k].objective, r.trace.incumbents[k - 1].objective);
    }
    EXPECT_GE(r.nodes_to_first_optimal, 1);
  }
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusRun, ::testing::Range(0, testing::corpus_size));

TEST(Trace, DeterministicJson)
{
  for (int k : {0, 2, 7}) {
    auto p   = testing::corpus_instance(k);
    auto cfg = config_from_json({{"pseudo", "analytical"}, {"refset", true}, {"node-select", "dval"}});
    auto a   = solve_mip(p, cfg);
    auto b   = solve_mip(p, cfg);
    EXPECT_EQ(trace_to_json(a.trace, &a).dump(), trace_to_json(b.trace, &b).dump());
  }
}

TEST(Trace, SymDifReplayAndFloor)
{
  long events = 0;
  int floor   = 1 << 30;
  for (int k = 0; k < testing::corpus_size; ++k) {
    auto p = testing::corpus_instance(k);
    for (const auto& cfg : {solve_config_t::defaults(), config_from_json({{"pseudo", "analytical"}}),
                            config_from_json({{"n1", 4}}), config_from_json({{"lookahead", 0}, {"n1", 4}})}) {
      auto r      = solve_mip(p, cfg);
      auto j      = nlohmann::json::parse(trace_to_json(r.trace, &r).dump());
      auto replay = replay_symdif(j);
      ASSERT_EQ(replay.size(), r.trace.symdif.size());
      for (size_t e = 0; e < replay.size(); ++e) {
        EXPECT_EQ(replay[e].intersect, r.trace.symdif[e].metrics.intersect);
        EXPECT_EQ(replay[e].symdif, r.trace.symdif[e].metrics.symdif);
        floor = std::min(floor, replay[e].symdif);
      }
      events += static_cast<long>(replay.size());
    }
  }
  EXPECT_GT(events, 0);
  EXPECT_EQ(floor, 3);
}

TEST(Trace, SchemaTag)
{
  auto p = two_var_knapsack();
  auto r = solve_mip(p, solve_config_t::defaults());
  auto j = trace_to_json(r.trace, &r);
  EXPECT_EQ(j["schema"], "ngb-trace/1");
  EXPECT_EQ(j["status"], "Optimal");
  EXPECT_FALSE(j.dump().find("seconds") != std::string::npos);
  EXPECT_THROW(replay_symdif(nlohmann::json{{"schema", "other"}}), precondition_error);
}

TEST(Config, JsonKeys)
{
  auto c = config_from_json({{"criterion", "C3"}, {"lambda", 0.5}, {"lookahead", 6}, {"postwin", "2b"}, {"lim", 3},
                             {"d0", 2}, {"node-select", "dval"}, {"dval-approach", 2}, {"max-nodes", 10}});
  EXPECT_EQ(c.winnow.criterion.id, criterion_t::c3_threshold);
  EXPECT_DOUBLE_EQ(c.tree.winnow.criterion.lambda, 0.5);
  EXPECT_EQ(c.tree.depth, 6);
  EXPECT_EQ(c.tree.post_winnow, post_winnow_t::best_sibling);
  EXPECT_EQ(c.node_select, node_select_t::best_dval);
  EXPECT_EQ(c.dval_approach, dval_approach_t::two);
  EXPECT_EQ(c.max_nodes, 10);
  EXPECT_THROW(config_from_json({{"bogus", 1}}), precondition_error);
  EXPECT_THROW(config_from_json({{"postwin", "2z"}}), precondition_error);
  EXPECT_THROW(config_from_json({{"max-nodes", 0}}).validate(), precondition_error);
  EXPECT_THROW(config_from_json({{"v", 3.0}}).validate(), precondition_error);
}

class BenchDir : public ::testing::Test {
 protected:
  fs::path dir = fs::temp_directory_path() / "ngb_bench_test";
  void SetUp() override
  {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

TEST_F(BenchDir, FiveInstancesTwoStrategies)
{
  for (int k = 0; k < 5; ++k) {
    auto p = testing::corpus_instance(k * 5 + 1);
    std::ofstream(dir / (p.name + ".mps")) << write_mps(p);
  }
  std::ofstream(dir / "broken.mps") << "NAME x\nROWS\n garbage\n";
  auto matrix = matrix_from_json(nlohmann::json::parse(R"([
    {"name": "default", "options": {}},
    {"name": "plain", "options": {"lookahead": 0, "criterion": "C1"}}
  ])"));
  auto a = run_benchmark(dir, matrix);
  ASSERT_EQ(a.rows.size(), 10u);
  EXPECT_EQ(a.skipped, std::vector<std::string>{"broken.mps"});
  for (const auto& r : a.rows) { EXPECT_EQ(r.status, solve_status_t::optimal) << r.instance << " " << r.strategy; }
  EXPECT_TRUE(std::is_sorted(a.rows.begin(), a.rows.end(),
                             [](const auto& x, const auto& y) { return x.instance < y.instance; }));
  auto b = run_benchmark(dir, matrix);
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(b).dump());
  EXPECT_NE(report_table(a).find("plain"), std::string::npos);
}

TEST_F(BenchDir, EmptyDirectory)
{
  auto r = run_benchmark(dir, default_matrix());
  EXPECT_TRUE(r.rows.empty());
}

}  // namespace
}  // namespace ngb
