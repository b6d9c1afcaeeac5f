// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wardsim/arena.hpp"
#include "wardsim/comms.hpp"
#include "wardsim/vision.hpp"

namespace wardsim {

enum class Phase { AwaitTarget, AwaitLoad, Outbound, PausedAtPoint, AtWard, AwaitUnload, Returning, Done, Fault };

enum class Role { Solo, Leader, Follower };

std::string_view to_string(Phase p);
std::string_view to_string(Role r);

/// Red while the cart waits at the ward, yellow while a follower is paused.
constexpr bool red_led(Phase p) { return p == Phase::AtWard || p == Phase::AwaitUnload; }
constexpr bool yellow_led(Phase p) { return p == Phase::PausedAtPoint; }
/// Phases in which the cart must not be driven.
constexpr bool halted_phase(Phase p) {
  return p == Phase::AwaitTarget || p == Phase::AwaitLoad || p == Phase::AtWard || p == Phase::AwaitUnload ||
         p == Phase::PausedAtPoint || p == Phase::Done || p == Phase::Fault;
}

enum class IntentKind { Follow, Turn, Halt };

struct Intent {
  IntentKind kind = IntentKind::Halt;
  /// Turn only: signed rotation, positive counter-clockwise (left).
  double angle = 0.0;
  friend bool operator==(const Intent&, const Intent&) = default;
};

enum class JunctionDecision { Straight, Left, Right, Stop, NoJunction, Fault };

std::string_view to_string(JunctionDecision d);

/// Stability constants of the mission logic.
struct MissionTuning {
  int confirm_frames = 5;
  double decision_range = 0.35;      // m
  double center_tolerance_px = 10.0;
  double lost_line_timeout = 1.0;    // s
  int retry_interval = 20;           // ticks; 0 disables Proceed retries
};

struct MissionConfig {
  Role role = Role::Solo;
  int cart_id = 1;
  /// Follower only; nullopt selects the last pause point before the ward's junction.
  std::optional<Vec2> pause_point;
  MissionTuning tuning;
  double dt = 0.02;
  double motor_time_constant = 0.05;
  const TrackMap* map = nullptr;
};

/// What the cart perceives in one tick (the camera-to-controller payload plus
/// the contact switch and wheel odometry).
struct SensorBundle {
  std::optional<LineReading> line;
  std::vector<DigitDetection> detections;
  bool loaded = false;
  double odometry_distance = 0.0;  // m, cumulative signed path length
  double odometry_heading = 0.0;   // rad, cumulative unwrapped rotation
  double speed = 0.0;              // m/s
  double yaw_rate = 0.0;           // rad/s
  int frame_width = 160;
};

/// Confirms a target digit once the nearest detection has been the same for
/// `confirm_frames` consecutive frames.
class TargetConfirmer {
 public:
  std::optional<int> observe(const std::vector<DigitDetection>& detections, int confirm_frames);
  int candidate() const { return candidate_; }
  int streak() const { return streak_; }

 private:
  int candidate_ = 0;
  int streak_ = 0;
};

/// Replays a frame sequence through a fresh confirmer; returns the first confirmed digit.
std::optional<int> acquire_target(std::span<const std::vector<DigitDetection>> frames, int confirm_frames);

/// Branch choice from placards in range. When the target digit is visible its
/// image position decides and must agree with `plan_action`; otherwise the
/// plan governs. NoJunction when nothing is in range.
JunctionDecision junction_decide(int target, const std::vector<DigitDetection>& detections,
                                 JunctionAction plan_action, int frame_width, const MissionTuning& tuning = {});

struct MissionState {
  Phase phase = Phase::AwaitTarget;
  std::string fault;
  TargetConfirmer confirmer;
  int target = 0;
  RoutePlan plan;
  RoutePlan return_plan;
  std::size_t step = 0;
  double step_start = 0.0;  // odometry at the start of the current step
  std::optional<JunctionAction> pending;
  bool turning = false;
  double turn_start = 0.0;
  double turn_goal = 0.0;
  double lost_time = 0.0;
  bool delivered = false;
  // Coordination.
  std::optional<std::size_t> pause_step;
  double pause_offset = 0.0;
  bool proceed_received = false;
  bool proceed_sent = false;
  bool acked = false;
  std::int64_t last_proceed_tick = 0;
  std::int64_t next_seq = 0;
  Intent intent;

  /// Meters travelled along the current plan (outbound or return).
  double route_progress(double odometry_distance) const;
};

struct MissionStepResult {
  Intent intent;
  std::vector<Message> outbox;
  MissionState state;
  std::vector<std::string> events;
};

/// Pure transition function of one cart's mission.
MissionStepResult mission_step(const MissionState& state, const MissionConfig& config, const SensorBundle& sensors,
                               std::span<const Message> inbox, std::int64_t tick);

}  // namespace wardsim
