// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/vehicle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wardsim {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

// Past this many time constants the residual transient is below 1e-17.
constexpr double kSettledAfter = 40.0;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// Velocity profile of one step: value(t) = settled + offset * exp(-t / tau).
struct Profile {
  double settled;
  double offset;
  double tau;

  double at(double t) const { return settled + offset * std::exp(-t / tau); }
  double integral(double t) const { return settled * t + offset * tau * -std::expm1(-t / tau); }
};

}  // namespace

void VehicleParams::validate() const {
  if (!(track_width > 0.0 && v_max > 0.0 && motor_time_constant > 0.0 && switch_threshold > 0.0)) {
    throw std::invalid_argument("vehicle parameters must be strictly positive");
  }
}

MotorCommand MotorCommand::clamped() const {
  return {std::clamp(duty_left, -1.0, 1.0), std::clamp(duty_right, -1.0, 1.0)};
}

MotionStep integrate_motion(const VehicleState& state, const MotorCommand& cmd, const VehicleParams& params,
                            double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const MotorCommand c = cmd.clamped();
  const double tau = params.motor_time_constant;
  const double target_l = c.duty_left * params.v_max;
  const double target_r = c.duty_right * params.v_max;
  const double decay = std::exp(-dt / tau);

  MotionStep out;
  out.state = state;
  out.state.wheel_speed.left = target_l + (state.wheel_speed.left - target_l) * decay;
  out.state.wheel_speed.right = target_r + (state.wheel_speed.right - target_r) * decay;

  const double v_target = 0.5 * (target_l + target_r);
  const double w_target = (target_r - target_l) / params.track_width;
  const double v0 = 0.5 * (state.wheel_speed.left + state.wheel_speed.right);
  const double w0 = (state.wheel_speed.right - state.wheel_speed.left) / params.track_width;
  const Profile v{v_target, v0 - v_target, tau};
  const Profile w{w_target, w0 - w_target, tau};
  const double theta0 = state.pose.heading;
  auto heading_at = [&](double t) { return theta0 + w.integral(t); };

  Vec2 disp{};
  // Transient part by quadrature against the closed-form heading.
  const bool transient = v.offset != 0.0 || w.offset != 0.0;
  const double t_split = transient ? std::min(dt, kSettledAfter * tau) : 0.0;
  if (t_split > 0.0) {
    const double w_peak = std::max(std::abs(w0), std::abs(w_target));
    const double panels_d =
        std::max({1.0, std::ceil(2.0 * t_split / tau), std::ceil(w_peak * t_split / 0.25)});
    const int panels = static_cast<int>(std::min(panels_d, 100000.0));
    const double h = t_split / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h;
      for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        for (const double sign : {-1.0, 1.0}) {
          const double t = mid + sign * 0.5 * h * kGlNodes[k];
          const double speed = v.at(t) * 0.5 * h * kGlWeights[k];
          const double th = heading_at(t);
          disp = disp + Vec2{speed * std::cos(th), speed * std::sin(th)};
        }
      }
    }
  }
  // Settled remainder: exact circular arc.
  if (dt > t_split) {
    const double span = dt - t_split;
    const double th = heading_at(t_split);
    const double phi = w_target * span;
    const double chord = v_target * span * sinc(0.5 * phi);
    disp = disp + Vec2{chord * std::cos(th + 0.5 * phi), chord * std::sin(th + 0.5 * phi)};
  }

  out.rotation = w.integral(dt);
  out.distance = v.integral(dt);
  out.state.pose.x += disp.x;
  out.state.pose.y += disp.y;
  out.state.pose.heading = wrap_angle(theta0 + out.rotation);
  return out;
}

VehicleState apply_motor(const VehicleState& state, const MotorCommand& cmd, const VehicleParams& params,
                         double dt) {
  return integrate_motion(state, cmd, params, dt).state;
}

VehicleState set_payload(const VehicleState& state, double grams, const VehicleParams& params) {
  if (grams < 0.0 || std::isnan(grams)) throw std::invalid_argument("payload mass must be non-negative");
  VehicleState out = state;
  out.payload_grams = grams;
  out.loaded = grams >= params.switch_threshold;
  return out;
}

VehicleState set_leds(const VehicleState& state, bool red, bool yellow) {
  VehicleState out = state;
  out.led_red = red;
  out.led_yellow = yellow;
  return out;
}

}  // namespace wardsim
