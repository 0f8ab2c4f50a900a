/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Brute-force references used only by the tests. None of them touch the
// simplex engine.

#include <ngb/lp_model.hpp>

#include <optional>
#include <random>
#include <vector>

namespace ngb::testing {

struct vertex_result_t {
  double objective;
  std::vector<double> x;
};

// Minimum over all vertices of {A x >= b, l <= x <= u}; bounds must be finite.
std::optional<vertex_result_t> vertex_enumeration(const lp_model_t& model);

// Minimum over the integer lattice for the flagged columns, with the
// remaining columns optimised by vertex enumeration.
std::optional<vertex_result_t> lattice_enumeration(const lp_model_t& model,
                                                   const std::vector<char>& is_integer);

// All integer points of a pure-integer model (every column flagged).
std::vector<std::vector<double>> integer_points(const lp_model_t& model);

// Random bounded LP with m rows and n columns whose origin-shifted box is
// feasible for about half of the rows.
lp_model_t random_lp(std::mt19937_64& rng, int m, int n, bool integral_data);

}  // namespace ngb::testing
