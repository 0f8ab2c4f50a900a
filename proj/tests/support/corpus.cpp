/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "support/corpus.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace ngb::testing {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void name_columns(mip_problem_t& p)
{
  for (int j = 0; j < p.lp.num_cols; ++j) {
    p.col_names.push_back((p.is_integer[j] ? "x" : "y") + std::to_string(j));
  }
  for (int r = 0; r < p.lp.num_rows; ++r) { p.row_names.push_back("r" + std::to_string(r)); }
}

// Rows a . x >= a . x0 - slack, so x0 stays feasible.
void add_rows_through(mip_problem_t& p, std::mt19937_64& rng, const std::vector<double>& x0, int rows, int amin,
                      int amax, int max_slack)
{
  const int n = p.lp.num_cols;
  for (int r = 0; r < rows; ++r) {
    std::vector<double> a(n);
    double act = 0;
    for (int j = 0; j < n; ++j) {
      a[j] = uniform(rng, amin, amax);
      act += a[j] * x0[j];
    }
    p.lp.add_row(a, act - uniform(rng, 0, max_slack));
  }
}

mip_problem_t knapsack(std::mt19937_64& rng)
{
  const int n = uniform(rng, 8, 10);
  std::vector<double> c(n), lo(n, 0.0), hi(n, 2.0);
  for (auto& v : c) { v = -uniform(rng, 5, 30); }
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(c, lo, hi);
  p.is_integer.assign(n, 1);
  const int rows = uniform(rng, 2, 3);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> w(n);
    double total = 0;
    for (auto& v : w) {
      v = uniform(rng, 3, 20);
      total += 2 * v;
    }
    for (auto& v : w) { v = -v; }
    p.lp.add_row(w, -std::floor(total * 0.4));
  }
  return p;
}

mip_problem_t general(std::mt19937_64& rng)
{
  const int n = 6;
  std::vector<double> c(n), lo(n, 0.0), hi(n, 5.0), x0(n);
  for (auto& v : c) { v = uniform(rng, 1, 15); }
  for (auto& v : x0) { v = uniform(rng, 1, 5); }
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(c, lo, hi);
  p.is_integer.assign(n, 1);
  add_rows_through(p, rng, x0, uniform(rng, 4, 7), 0, 9, 4);
  return p;
}

mip_problem_t mixed(std::mt19937_64& rng)
{
  const int ni = 5, nc = 2, n = ni + nc;
  std::vector<double> c(n), lo(n), hi(n), x0(n);
  for (int j = 0; j < n; ++j) {
    const bool integer = j < ni;
    c[j]  = uniform(rng, -6, 9);
    lo[j] = integer ? -3 : 0;
    hi[j] = integer ? 3 : 10;
    x0[j] = integer ? uniform(rng, -3, 3) : uniform(rng, 0, 10);
  }
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(c, lo, hi);
  p.is_integer.assign(n, 0);
  for (int j = 0; j < ni; ++j) { p.is_integer[j] = 1; }
  add_rows_through(p, rng, x0, uniform(rng, 4, 6), -7, 7, 2);
  return p;
}

mip_problem_t covering(std::mt19937_64& rng)
{
  const int n = uniform(rng, 8, 10), m = uniform(rng, 6, 9);
  std::vector<double> c(n), lo(n, 0.0), hi(n, 2.0);
  for (auto& v : c) { v = uniform(rng, 2, 11); }
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(c, lo, hi);
  p.is_integer.assign(n, 1);
  for (int r = 0; r < m; ++r) {
    std::vector<double> a(n, 0.0);
    double reach = 0;
    for (auto& v : a) {
      if (uniform(rng, 0, 9) < 4) {
        v = uniform(rng, 1, 3);
        reach += 2 * v;
      }
    }
    if (reach < 6) {
      a[uniform(rng, 0, n - 1)] += 3;
      reach += 6;
    }
    p.lp.add_row(a, std::min<double>(uniform(rng, 3, 7), reach));
  }
  return p;
}

mip_problem_t near_equality(std::mt19937_64& rng)
{
  const int n = 6;
  std::vector<double> c(n), lo(n, 0.0), hi(n, 5.0), x0(n);
  for (auto& v : c) { v = uniform(rng, -4, 8); }
  for (auto& v : x0) { v = uniform(rng, 0, 5); }
  mip_problem_t p;
  p.lp = lp_model_t::with_columns(c, lo, hi);
  p.is_integer.assign(n, 1);
  for (int pair = 0; pair < 3; ++pair) {
    std::vector<double> a(n), neg(n);
    double act = 0;
    for (int j = 0; j < n; ++j) {
      a[j] = uniform(rng, 1, 7);
      neg[j] = -a[j];
      act += a[j] * x0[j];
    }
    p.lp.add_row(a, act - 1);
    p.lp.add_row(neg, -act - 1);
  }
  return p;
}

}  // namespace

mip_problem_t corpus_instance(int k)
{
  if (k < 0 || k >= corpus_size) { throw std::out_of_range("corpus index"); }
  std::mt19937_64 rng(0x6e67620000ULL + static_cast<unsigned>(k));
  mip_problem_t p;
  switch (k % 5) {
    case 0: p = knapsack(rng); p.name = "knap"; break;
    case 1: p = general(rng); p.name = "gint"; break;
    case 2: p = mixed(rng); p.name = "mixed"; break;
    case 3: p = covering(rng); p.name = "cover"; break;
    default: p = near_equality(rng); p.name = "neq"; break;
  }
  p.name += (k < 10 ? "0" : "") + std::to_string(k);
  name_columns(p);
  return p;
}

}  // namespace ngb::testing
