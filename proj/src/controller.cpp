// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wardsim {

void PidGains::validate() const {
  if (!(sample_period > 0.0)) throw std::invalid_argument("PID sample period must be positive");
  if (!(integral_limit > 0.0) || !(output_limit > 0.0)) throw std::invalid_argument("PID limits must be positive");
}

PidGains gains_from_classical(double kp, double ti, double td, double period, double integral_limit,
                              double output_limit) {
  if (!(ti > 0.0)) throw std::invalid_argument("integral time Ti must be positive");
  if (!(period > 0.0)) throw std::invalid_argument("sample period T must be positive");
  return {kp, kp * period / ti, kp * td / period, period, integral_limit, output_limit};
}

std::pair<double, PidState> pid_step(const PidState& state, const PidGains& gains, double error) {
  PidState next = state;
  const double prev = state.initialized ? state.prev_error : error;
  next.error_sum += error;
  double integral = gains.ki * next.error_sum;
  if (std::abs(integral) > gains.integral_limit) {
    // Conditional integration: hold the accumulator at the limit.
    integral = std::copysign(gains.integral_limit, integral);
    next.error_sum = integral / gains.ki;
  }
  const double u = gains.kp * error + integral + gains.kd * (error - prev);
  next.prev_error = error;
  next.initialized = true;
  return {std::clamp(u, -gains.output_limit, gains.output_limit), next};
}

MotorCommand steer(double u, double base_duty) {
  return MotorCommand{base_duty + u, base_duty - u}.clamped();
}

}  // namespace wardsim
