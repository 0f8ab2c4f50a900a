/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/mip.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace ngb {

// Free-format MPS: NAME, ROWS, COLUMNS (INTORG/INTEND markers), RHS, BOUNDS,
// ENDATA. L rows are negated and E rows split into two >= rows.
mip_problem_t parse_mps(std::string_view text);
mip_problem_t read_mps(const std::filesystem::path& path);

// Writes the >= form; parse_mps(write_mps(p)) == p.
std::string write_mps(const mip_problem_t& problem);

}  // namespace ngb
