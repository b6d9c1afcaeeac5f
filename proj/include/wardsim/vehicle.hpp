// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wardsim/geometry.hpp"

namespace wardsim {

struct VehicleParams {
  double track_width = 0.16;          // m, distance between the driven wheels
  double v_max = 0.5;                 // m/s at full duty
  double motor_time_constant = 0.05;  // s
  double switch_threshold = 200.0;    // g

  /// Throws std::invalid_argument unless every field is strictly positive.
  void validate() const;
};

struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
  friend bool operator==(const WheelSpeeds&, const WheelSpeeds&) = default;
};

struct VehicleState {
  Pose pose;
  WheelSpeeds wheel_speed;
  double payload_grams = 0.0;
  bool loaded = false;
  bool led_red = false;
  bool led_yellow = false;
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// PWM duty per wheel; positive drives forward. Components are clamped to [-1, 1].
struct MotorCommand {
  double duty_left = 0.0;
  double duty_right = 0.0;

  MotorCommand clamped() const;
  friend bool operator==(const MotorCommand&, const MotorCommand&) = default;
};

/// Result of integrating one step, with the wheel odometry over the step.
struct MotionStep {
  VehicleState state;
  double distance = 0.0;  // signed path length of the axle midpoint
  double rotation = 0.0;  // unwrapped heading change
};

/// Wheel speeds relax to duty * v_max with a first-order lag; the pose follows
/// the unicycle model. Heading is integrated in closed form; position uses the
/// exact arc when wheel speeds are settled and Gauss-Legendre quadrature of
/// the closed-form velocity otherwise. Requires dt > 0.
MotionStep integrate_motion(const VehicleState& state, const MotorCommand& cmd, const VehicleParams& params,
                            double dt);

VehicleState apply_motor(const VehicleState& state, const MotorCommand& cmd, const VehicleParams& params,
                         double dt);

/// Throws std::invalid_argument for negative mass.
VehicleState set_payload(const VehicleState& state, double grams, const VehicleParams& params = {});

VehicleState set_leds(const VehicleState& state, bool red, bool yellow);

}  // namespace wardsim
