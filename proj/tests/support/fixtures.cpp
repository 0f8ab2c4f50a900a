/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "support/fixtures.hpp"

#include <string>

namespace ngb::testing {

mip_problem_t separable_fixture(const std::vector<double>& targets,
                                const std::vector<double>& down_cost,
                                const std::vector<double>& up_cost)
{
  const int n = static_cast<int>(targets.size());
  std::vector<double> c(3 * n, 0.0), lo(3 * n, 0.0), hi(3 * n, inf);
  for (int i = 0; i < n; ++i) {
    lo[i]         = -5;
    hi[i]         = 5;
    c[n + i]      = down_cost[i];
    c[2 * n + i]  = up_cost[i];
  }
  mip_problem_t p;
  p.name = "separable";
  p.lp   = lp_model_t::with_columns(c, lo, hi);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(3 * n, 0.0);
    row[i]     = 1;
    row[n + i] = 1;
    p.lp.add_row(row, targets[i]);
    row.assign(3 * n, 0.0);
    row[i]         = -1;
    row[2 * n + i] = 1;
    p.lp.add_row(row, -targets[i]);
    p.row_names.push_back("lo" + std::to_string(i));
    p.row_names.push_back("hi" + std::to_string(i));
  }
  p.is_integer.assign(3 * n, 0);
  for (int i = 0; i < n; ++i) { p.is_integer[i] = 1; }
  for (int i = 0; i < n; ++i) { p.col_names.push_back("x" + std::to_string(i)); }
  for (int i = 0; i < n; ++i) { p.col_names.push_back("p" + std::to_string(i)); }
  for (int i = 0; i < n; ++i) { p.col_names.push_back("q" + std::to_string(i)); }
  return p;
}

}  // namespace ngb::testing
