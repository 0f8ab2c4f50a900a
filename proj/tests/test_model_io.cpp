/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "support/oracles.hpp"

#include <ngb/errors.hpp>
#include <ngb/mip.hpp>
#include <ngb/mps.hpp>

#include <gtest/gtest.h>

#include <random>

namespace ngb {
namespace {

constexpr const char* knapsack = R"(NAME knap
* max 5a + 4b  s.t. 6a + 4b <= 9
ROWS
 N  value
 L  cap
COLUMNS
    MARKER  'MARKER'  'INTORG'
    a  value  -5  cap  6
    b  value  -4  cap  4
    MARKER  'MARKER'  'INTEND'
RHS
    RHS  cap  9
BOUNDS
 UP BND a 1.7
 UP BND b 2
ENDATA
)";

TEST(Mps, KnapsackFixture)
{
  auto p = parse_mps(knapsack);
  EXPECT_EQ(p.name, "knap");
  EXPECT_EQ(p.num_integer(), 2);
  ASSERT_EQ(p.lp.num_rows, 1);
  EXPECT_EQ(p.lp.coef(0, 0), -6);
  EXPECT_EQ(p.lp.rhs[0], -9);
  EXPECT_EQ(p.lp.upper[0], 1);  // tightened inward
  EXPECT_EQ(p.col_names, (std::vector<std::string>{"a", "b"}));
}

TEST(Mps, DefaultBoundsAndEqualityRows)
{
  auto p = parse_mps(R"(NAME e
ROWS
 N obj
 E eq
 G ge
COLUMNS
 x obj 1 eq 1
 y obj 2 eq 1
 y ge 3
RHS
 RHS eq 4 ge 1
ENDATA
)");
  ASSERT_EQ(p.lp.num_rows, 3);
  EXPECT_EQ(p.lp.lower, (std::vector<double>{0, 0}));
  EXPECT_EQ(p.lp.upper, (std::vector<double>{inf, inf}));
  EXPECT_EQ(p.lp.rhs, (std::vector<double>{4, -4, 1}));
  EXPECT_EQ(p.num_integer(), 0);
}

TEST(Mps, ErrorsCarryLineNumbers)
{
  try {
    parse_mps("NAME x\nROWS\n N obj\nCOLUMNS\n x obj 1 missing 2\nENDATA\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  EXPECT_THROW(parse_mps("NAME x\nROWS\n N obj\n G r\n L r\nENDATA\n"), parse_error);
  EXPECT_THROW(parse_mps("NAME x\nROWS\n N obj\nRANGES\nENDATA\n"), parse_error);
  try {
    parse_mps("NAME x\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n UP BND y 3\nENDATA\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 7);
  }
}

TEST(Mps, RoundTripIsIdentity)
{
  auto p    = parse_mps(knapsack);
  auto back = parse_mps(write_mps(p));
  EXPECT_EQ(p, back);

  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    mip_problem_t q;
    q.name = "r" + std::to_string(it);
    q.lp   = testing::random_lp(rng, 4, 5, it % 2 == 0);
    q.lp.objective_offset = it;
    for (int j = 0; j < 5; ++j) {
      q.col_names.push_back("c" + std::to_string(j));
      q.is_integer.push_back(j % 3 != 1);
    }
    q.lp.lower[2] = -inf;
    q.lp.upper[4] = inf;
    for (int r = 0; r < 4; ++r) { q.row_names.push_back("r" + std::to_string(r)); }
    q.tighten_integer_bounds();
    EXPECT_EQ(q, parse_mps(write_mps(q)));
  }
}

TEST(Fractional, DetectionAndTolerance)
{
  mip_problem_t p;
  std::vector<double> c{0, 0}, lo{0, 0}, hi{5, 5};
  p.lp         = lp_model_t::with_columns(c, lo, hi);
  p.is_integer = {1, 1};
  std::vector<double> x{2.0, 3.4};
  auto f = detect_fractional(x, p);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].var, 1);
  EXPECT_NEAR(f[0].f_up, 0.6, 1e-12);
  EXPECT_NEAR(f[0].f_down, 0.4, 1e-12);
  EXPECT_NEAR(f[0].f_up + f[0].f_down, 1.0, 1e-15);
  EXPECT_TRUE(detect_fractional(std::vector<double>{2, 3}, p).empty());
  EXPECT_TRUE(detect_fractional(std::vector<double>{2.0000004, 3}, p).empty());
}

TEST(Incumbent, UpdateRules)
{
  mip_problem_t p;
  std::vector<double> c{1}, lo{0}, hi{20};
  p.lp         = lp_model_t::with_columns(c, lo, hi);
  p.is_integer = {1};
  incumbent_t inc;
  auto first = update_incumbent(inc, p, std::vector<double>{10}, 4, 7);
  EXPECT_TRUE(first.updated);
  EXPECT_EQ(inc.objective, 10);
  EXPECT_EQ(inc.depth, 4);

  auto better = update_incumbent(inc, p, std::vector<double>{7}, 2, 9);
  EXPECT_TRUE(better.updated);
  EXPECT_EQ(inc.objective, 7);
  EXPECT_NEAR(better.prune_threshold, 7 - inc.epsilon, 1e-8);

  EXPECT_FALSE(update_incumbent(inc, p, std::vector<double>{7}, 1, 10).updated);
  EXPECT_THROW(update_incumbent(inc, p, std::vector<double>{6.5}, 1, 11), precondition_error);
}

TEST(Node, ChildIsStrictSubset)
{
  mip_problem_t p;
  std::vector<double> c{1, 1}, lo{0, -3}, hi{10, 3};
  p.lp         = lp_model_t::with_columns(c, lo, hi);
  p.is_integer = {1, 1};
  auto root    = node_state_t::root(p);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> val(-2.9, 9.9);
  auto node = root;
  for (int step = 0; step < 20; ++step) {
    int j      = step % 2;
    double v   = std::clamp(val(rng), node.lower[j] + 0.1, node.upper[j] - 0.1);
    if (is_integral(v) || node.upper[j] - node.lower[j] < 1) { continue; }
    auto dir   = step % 3 == 0 ? branch_dir_t::up : branch_dir_t::down;
    auto child = make_child(node, step + 1, j, dir, v);
    for (int k = 0; k < 2; ++k) {
      EXPECT_GE(child.lower[k], node.lower[k]);
      EXPECT_LE(child.upper[k], node.upper[k]);
    }
    EXPECT_TRUE(child.lower[j] > node.lower[j] || child.upper[j] < node.upper[j]);
    node = child;
  }
  EXPECT_THROW(make_child(root, 1, 0, branch_dir_t::up, 2.0), precondition_error);
}

}  // namespace
}  // namespace ngb
