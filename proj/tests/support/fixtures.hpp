/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/mip.hpp>

#include <vector>

namespace ngb::testing {

/**
 * Independent integer columns x_i in [-5, 5], each tied to a target t_i by
 *   x_i + p_i >= t_i   and   -x_i + q_i >= -t_i,
 * with cost a_i p_i + b_i q_i on continuous p_i, q_i >= 0. The LP optimum
 * sits at x = t, every branch stays feasible, and branching x_i up costs
 * b_i * f_i+ while branching down costs a_i * f_i-.
 * Columns are ordered x_0..x_{n-1}, p_0.., q_0...
 */
mip_problem_t separable_fixture(const std::vector<double>& targets,
                                const std::vector<double>& down_cost,
                                const std::vector<double>& up_cost);

}  // namespace ngb::testing
