/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <limits>
#include <string_view>

namespace ngb {

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline constexpr double feasibility_tol = 1e-7;
inline constexpr double integrality_tol = 1e-6;

enum class branch_dir_t { up, down };

inline branch_dir_t opposite(branch_dir_t d)
{
  return d == branch_dir_t::up ? branch_dir_t::down : branch_dir_t::up;
}

inline std::string_view to_string(branch_dir_t d) { return d == branch_dir_t::up ? "up" : "down"; }

// f+ = ceil(x) - x, f- = x - floor(x)
inline double frac_up(double x) { return std::ceil(x) - x; }
inline double frac_down(double x) { return x - std::floor(x); }

inline bool is_integral(double x, double tol = integrality_tol)
{
  return std::abs(x - std::round(x)) <= tol;
}

}  // namespace ngb
