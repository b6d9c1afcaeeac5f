// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wardsim {

/// Malformed map or scenario text. `line()` is 1-based; 0 means the whole input.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Input parsed fine but violates a structural invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wardsim
