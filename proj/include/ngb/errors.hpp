/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace ngb {

class model_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class precondition_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
 public:
  parse_error(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ngb
