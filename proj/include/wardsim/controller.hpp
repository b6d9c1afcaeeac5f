// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <utility>

#include "wardsim/vehicle.hpp"

namespace wardsim {

/// Positional PID gains in the summation form u = kp e + ki sum(e) + kd (e - e_prev).
struct PidGains {
  double kp = 0.8;
  double ki = 0.02;
  double kd = 0.3;
  double sample_period = 0.02;  // s
  double integral_limit = 0.5;
  double output_limit = 1.0;

  /// Throws std::invalid_argument unless the period and limits are positive.
  void validate() const;
  static constexpr double unlimited = std::numeric_limits<double>::infinity();
};

struct PidState {
  double error_sum = 0.0;
  double prev_error = 0.0;
  bool initialized = false;
  friend bool operator==(const PidState&, const PidState&) = default;
};

/// Converts the classical (Kp, Ti, Td, T) form: ki = kp T / Ti, kd = kp Td / T.
/// Throws std::invalid_argument for non-positive Ti or T.
PidGains gains_from_classical(double kp, double ti, double td, double period,
                              double integral_limit = PidGains::unlimited,
                              double output_limit = PidGains::unlimited);

/// One controller step. The derivative term is zero on the first call; the
/// integral contribution is clamped to +-integral_limit (the stored sum is
/// clamped with it) and the output to +-output_limit.
std::pair<double, PidState> pid_step(const PidState& state, const PidGains& gains, double error);

/// Differential mixing: positive u turns right.
MotorCommand steer(double u, double base_duty);

}  // namespace wardsim
