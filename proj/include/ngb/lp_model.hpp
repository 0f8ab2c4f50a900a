/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <span>
#include <vector>

namespace ngb {

/**
 * min c.x + offset  s.t.  A x >= b,  lower <= x <= upper.
 *
 * The matrix is dense and row-major. Every row is a >= row; callers convert
 * <= and = rows before building the model.
 */
struct lp_model_t {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<double> objective;
  std::vector<double> matrix;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  double objective_offset = 0.0;

  static lp_model_t with_columns(std::span<const double> c,
                                 std::span<const double> lo,
                                 std::span<const double> hi);

  double coef(int row, int col) const { return matrix[static_cast<size_t>(row) * num_cols + col]; }
  std::span<const double> row(int r) const
  {
    return {matrix.data() + static_cast<size_t>(r) * num_cols, static_cast<size_t>(num_cols)};
  }

  // appends `coefs . x >= rhs` and returns its index
  int add_row(std::span<const double> coefs, double row_rhs);
  void remove_rows(std::span<const int> rows);

  double evaluate(std::span<const double> x) const;
  double activity(int r, std::span<const double> x) const;
  // largest violation of any row or bound at x
  double max_violation(std::span<const double> x) const;

  // throws model_error when dimensions, bounds, or coefficients are invalid
  void validate() const;

  bool operator==(const lp_model_t&) const = default;
};

}  // namespace ngb
