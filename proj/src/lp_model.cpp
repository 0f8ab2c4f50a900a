/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <ngb/errors.hpp>
#include <ngb/lp_model.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace ngb {

lp_model_t lp_model_t::with_columns(std::span<const double> c,
                                    std::span<const double> lo,
                                    std::span<const double> hi)
{
  lp_model_t m;
  m.num_cols  = static_cast<int>(c.size());
  m.objective.assign(c.begin(), c.end());
  m.lower.assign(lo.begin(), lo.end());
  m.upper.assign(hi.begin(), hi.end());
  return m;
}

int lp_model_t::add_row(std::span<const double> coefs, double row_rhs)
{
  if (static_cast<int>(coefs.size()) != num_cols) {
    throw model_error("row length " + std::to_string(coefs.size()) + " does not match " +
                      std::to_string(num_cols) + " columns");
  }
  matrix.insert(matrix.end(), coefs.begin(), coefs.end());
  rhs.push_back(row_rhs);
  return num_rows++;
}

void lp_model_t::remove_rows(std::span<const int> rows)
{
  std::vector<char> drop(num_rows, 0);
  for (int r : rows) { drop.at(r) = 1; }
  std::vector<double> new_matrix;
  std::vector<double> new_rhs;
  for (int r = 0; r < num_rows; ++r) {
    if (drop[r]) { continue; }
    auto src = row(r);
    new_matrix.insert(new_matrix.end(), src.begin(), src.end());
    new_rhs.push_back(rhs[r]);
  }
  matrix   = std::move(new_matrix);
  rhs      = std::move(new_rhs);
  num_rows = static_cast<int>(rhs.size());
}

double lp_model_t::activity(int r, std::span<const double> x) const
{
  double s = 0.0;
  auto a   = row(r);
  for (int j = 0; j < num_cols; ++j) { s += a[j] * x[j]; }
  return s;
}

double lp_model_t::evaluate(std::span<const double> x) const
{
  double s = objective_offset;
  for (int j = 0; j < num_cols; ++j) { s += objective[j] * x[j]; }
  return s;
}

double lp_model_t::max_violation(std::span<const double> x) const
{
  double worst = 0.0;
  for (int j = 0; j < num_cols; ++j) {
    worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
  }
  for (int r = 0; r < num_rows; ++r) { worst = std::max(worst, rhs[r] - activity(r, x)); }
  return worst;
}

void lp_model_t::validate() const
{
  const auto n = static_cast<size_t>(num_cols);
  const auto m = static_cast<size_t>(num_rows);
  if (num_cols < 0 || num_rows < 0) { throw model_error("negative dimension"); }
  if (objective.size() != n || lower.size() != n || upper.size() != n) {
    throw model_error("column vectors do not match column count");
  }
  if (rhs.size() != m || matrix.size() != m * n) {
    throw model_error("row data does not match row count");
  }
  for (size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) { throw model_error("non-finite objective coefficient"); }
    if (std::isnan(lower[j]) || std::isnan(upper[j])) { throw model_error("NaN bound"); }
    if (lower[j] > upper[j]) {
      throw model_error("column " + std::to_string(j) + " has lower bound above upper bound");
    }
  }
  for (double v : matrix) {
    if (!std::isfinite(v)) { throw model_error("non-finite matrix coefficient"); }
  }
  for (double v : rhs) {
    if (!std::isfinite(v)) { throw model_error("non-finite right-hand side"); }
  }
}

}  // namespace ngb
