/*
 * Copyright (C) 2026 the nogin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nogin {

// Invalid user-supplied configuration (non-positive stepsize, non-SPD mass, ...).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based; 0 when unknown.
struct parse_error : std::runtime_error {
  int line;
  explicit parse_error(const std::string& msg, int line_number = 0)
      : std::runtime_error(line_number > 0 ? msg + " (line " + std::to_string(line_number) + ")"
                                           : msg),
        line(line_number) {}
};

// A linear-algebra routine hit a singular/indefinite operator or lost accuracy.
// `offending` carries the eigenvalue bound (or residual) that triggered it.
struct numeric_error : std::runtime_error {
  double offending;
  explicit numeric_error(const std::string& msg, double offending_value = 0.0)
      : std::runtime_error(msg), offending(offending_value) {}
};

// The momentum damping would amplify: some |eigenvalue| >= 1.
struct stability_error : std::runtime_error {
  double bound;
  explicit stability_error(const std::string& msg, double violating_bound)
      : std::runtime_error(msg), bound(violating_bound) {}
};

// A chain produced a non-finite or runaway state.
struct divergence_error : std::runtime_error {
  std::uint64_t step;
  explicit divergence_error(const std::string& msg, std::uint64_t at_step)
      : std::runtime_error(msg + " at step " + std::to_string(at_step)), step(at_step) {}
};

}  // namespace nogin
