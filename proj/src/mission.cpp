// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wardsim/errors.hpp"

namespace wardsim {

namespace {

constexpr double kQuarterTurn = 0.5 * std::numbers::pi;

std::string event_phase(Phase p) { return "phase:" + std::string(to_string(p)); }

void enter(MissionStepResult& r, Phase p) {
  if (r.state.phase == p) return;
  const bool red_before = red_led(r.state.phase);
  const bool yellow_before = yellow_led(r.state.phase);
  r.state.phase = p;
  r.events.push_back(event_phase(p));
  if (red_led(p) != red_before) r.events.push_back(red_led(p) ? "led:red=on" : "led:red=off");
  if (yellow_led(p) != yellow_before) r.events.push_back(yellow_led(p) ? "led:yellow=on" : "led:yellow=off");
}

void fault(MissionStepResult& r, std::string reason) {
  r.state.fault = reason;
  enter(r, Phase::Fault);
  r.events.push_back("fault:" + reason);
  r.intent = {IntentKind::Halt, 0.0};
}

void start_turn(MissionStepResult& r, const SensorBundle& s, double angle) {
  r.state.turning = true;
  r.state.turn_start = s.odometry_heading;
  r.state.turn_goal = angle;
  r.intent = {IntentKind::Turn, angle};
}

// Resolves where a follower halts, as (plan step, offset along it).
void resolve_pause(MissionState& st, const MissionConfig& cfg) {
  st.pause_step.reset();
  if (st.plan.empty() || st.plan.front().edge.empty()) return;
  if (cfg.pause_point) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.plan.size(); ++i) {
      const Vec2 a = point_along(*cfg.map, st.plan[i], 0.0);
      const Vec2 b = point_along(*cfg.map, st.plan[i], st.plan[i].length);
      const double d = distance_to_segment(*cfg.pause_point, a, b);
      if (d < best) {
        best = d;
        st.pause_step = i;
        st.pause_offset = project_onto_segment(*cfg.pause_point, a, b) * st.plan[i].length;
      }
    }
    return;
  }
  // Midpoint of the edge leading into the ward's junction.
  const std::size_t i = st.plan.size() >= 2 ? st.plan.size() - 2 : 0;
  st.pause_step = i;
  st.pause_offset = 0.5 * st.plan[i].length;
}

void handle_inbox(MissionStepResult& r, const MissionConfig& cfg, std::span<const Message> inbox) {
  for (const Message& m : inbox) {
    if (m.sender == cfg.cart_id) continue;
    if (m.kind == MessageKind::Proceed) {
      if (!r.state.proceed_received) r.events.push_back("proceed-received");
      r.state.proceed_received = true;
      r.outbox.push_back({MessageKind::Ack, cfg.cart_id, r.state.next_seq++});
    } else if (m.kind == MessageKind::Ack) {
      r.state.acked = true;
    }
  }
}

void send_proceed(MissionStepResult& r, const MissionConfig& cfg, std::int64_t tick) {
  r.outbox.push_back({MessageKind::Proceed, cfg.cart_id, r.state.next_seq++});
  r.state.proceed_sent = true;
  r.state.last_proceed_tick = tick;
}

// Line following along the active plan: turns, junction arrivals, pauses.
void drive(MissionStepResult& r, const MissionConfig& cfg, const SensorBundle& s) {
  MissionState& st = r.state;
  const bool outbound = st.phase == Phase::Outbound;
  const RoutePlan& plan = outbound ? st.plan : st.return_plan;
  const double tau = cfg.motor_time_constant;

  if (st.turning) {
    const double rotated = s.odometry_heading - st.turn_start;
    const double predicted = rotated + s.yaw_rate * tau;
    if (std::abs(predicted) + 0.5 * std::abs(s.yaw_rate) * cfg.dt >= std::abs(st.turn_goal)) {
      st.turning = false;
      st.step_start = s.odometry_distance;
      st.lost_time = 0.0;
      r.intent = {IntentKind::Follow, 0.0};
    } else {
      r.intent = {IntentKind::Turn, st.turn_goal};
    }
    return;
  }

  if (st.step >= plan.size()) {
    fault(r, "route exhausted");
    return;
  }
  const RouteStep& step = plan[st.step];

  if (!s.line) {
    st.lost_time += cfg.dt;
    if (st.lost_time > cfg.tuning.lost_line_timeout) {
      fault(r, "line lost");
      return;
    }
  } else {
    st.lost_time = 0.0;
  }

  if (outbound && step.action != JunctionAction::Stop && !st.pending) {
    const JunctionDecision d = junction_decide(st.target, s.detections, step.action, s.frame_width, cfg.tuning);
    switch (d) {
      case JunctionDecision::Fault:
        fault(r, "placard contradicts route at " + step.to);
        return;
      case JunctionDecision::Left: st.pending = JunctionAction::Left; break;
      case JunctionDecision::Right: st.pending = JunctionAction::Right; break;
      case JunctionDecision::Straight: st.pending = JunctionAction::Straight; break;
      default: break;
    }
    if (st.pending) r.events.push_back("decide:" + std::string(to_string(*st.pending)) + "@" + step.to);
  }

  const double progress = s.odometry_distance - st.step_start;
  // Distance covered before the wheels come to rest if halted now.
  const double lookahead = std::max(0.0, s.speed) * (tau + cfg.dt);

  if (outbound && cfg.role == Role::Follower && !st.proceed_received && st.pause_step &&
      *st.pause_step == st.step && progress + lookahead >= st.pause_offset) {
    enter(r, Phase::PausedAtPoint);
    r.intent = {IntentKind::Halt, 0.0};
    return;
  }

  if (progress + lookahead < step.length) {
    r.intent = {IntentKind::Follow, 0.0};
    return;
  }

  const JunctionAction action = st.pending.value_or(step.action);
  if (action != JunctionAction::Stop) {
    r.events.push_back("junction:" + std::string(to_string(action)) + "@" + step.to);
  }
  st.pending.reset();
  switch (action) {
    case JunctionAction::Stop:
      r.intent = {IntentKind::Halt, 0.0};
      if (outbound) {
        st.delivered = true;
        enter(r, Phase::AtWard);
      } else {
        enter(r, Phase::Done);
      }
      break;
    case JunctionAction::Straight:
      st.step_start += step.length;
      ++st.step;
      r.intent = {IntentKind::Follow, 0.0};
      break;
    case JunctionAction::Left:
    case JunctionAction::Right:
      st.step_start = s.odometry_distance + (step.length - progress);
      ++st.step;
      start_turn(r, s, action == JunctionAction::Left ? kQuarterTurn : -kQuarterTurn);
      break;
  }
}

}  // namespace

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::AwaitTarget: return "AwaitTarget";
    case Phase::AwaitLoad: return "AwaitLoad";
    case Phase::Outbound: return "Outbound";
    case Phase::PausedAtPoint: return "PausedAtPoint";
    case Phase::AtWard: return "AtWard";
    case Phase::AwaitUnload: return "AwaitUnload";
    case Phase::Returning: return "Returning";
    case Phase::Done: return "Done";
    case Phase::Fault: return "Fault";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Solo: return "solo";
    case Role::Leader: return "leader";
    case Role::Follower: return "follower";
  }
  return "?";
}

std::string_view to_string(JunctionDecision d) {
  switch (d) {
    case JunctionDecision::Straight: return "Straight";
    case JunctionDecision::Left: return "Left";
    case JunctionDecision::Right: return "Right";
    case JunctionDecision::Stop: return "Stop";
    case JunctionDecision::NoJunction: return "NoJunction";
    case JunctionDecision::Fault: return "Fault";
  }
  return "?";
}

std::optional<int> TargetConfirmer::observe(const std::vector<DigitDetection>& detections, int confirm_frames) {
  if (detections.empty()) {
    candidate_ = 0;
    streak_ = 0;
    return std::nullopt;
  }
  const auto nearest = std::min_element(detections.begin(), detections.end(),
                                        [](const auto& a, const auto& b) { return a.range_z < b.range_z; });
  if (nearest->digit == candidate_) {
    ++streak_;
  } else {
    candidate_ = nearest->digit;
    streak_ = 1;
  }
  if (streak_ >= confirm_frames) return candidate_;
  return std::nullopt;
}

std::optional<int> acquire_target(std::span<const std::vector<DigitDetection>> frames, int confirm_frames) {
  TargetConfirmer c;
  for (const auto& f : frames) {
    if (auto t = c.observe(f, confirm_frames)) return t;
  }
  return std::nullopt;
}

JunctionDecision junction_decide(int target, const std::vector<DigitDetection>& detections,
                                 JunctionAction plan_action, int frame_width, const MissionTuning& tuning) {
  const DigitDetection* hit = nullptr;
  bool any_in_range = false;
  for (const DigitDetection& d : detections) {
    if (d.range_z >= tuning.decision_range) continue;
    any_in_range = true;
    if (d.digit == target && (!hit || d.range_z < hit->range_z)) hit = &d;
  }
  if (!any_in_range) return JunctionDecision::NoJunction;
  if (!hit) {
    switch (plan_action) {
      case JunctionAction::Straight: return JunctionDecision::Straight;
      case JunctionAction::Left: return JunctionDecision::Left;
      case JunctionAction::Right: return JunctionDecision::Right;
      case JunctionAction::Stop: return JunctionDecision::Stop;
    }
  }
  const double center = 0.5 * frame_width;
  JunctionAction seen = JunctionAction::Straight;
  if (hit->image_x < center - tuning.center_tolerance_px) seen = JunctionAction::Left;
  if (hit->image_x > center + tuning.center_tolerance_px) seen = JunctionAction::Right;
  if (seen != plan_action) return JunctionDecision::Fault;
  switch (seen) {
    case JunctionAction::Left: return JunctionDecision::Left;
    case JunctionAction::Right: return JunctionDecision::Right;
    default: return JunctionDecision::Straight;
  }
}

double MissionState::route_progress(double odometry_distance) const {
  const RoutePlan& p = (phase == Phase::Returning || phase == Phase::Done) ? return_plan : plan;
  double total = 0.0;
  for (std::size_t i = 0; i < step && i < p.size(); ++i) total += p[i].length;
  if (step < p.size() && !turning) total += std::clamp(odometry_distance - step_start, 0.0, p[step].length);
  return total;
}

MissionStepResult mission_step(const MissionState& state, const MissionConfig& cfg, const SensorBundle& s,
                               std::span<const Message> inbox, std::int64_t tick) {
  MissionStepResult r;
  r.state = state;
  r.intent = {IntentKind::Halt, 0.0};
  MissionState& st = r.state;

  handle_inbox(r, cfg, inbox);
  if (cfg.role == Role::Leader && st.proceed_sent && !st.acked && cfg.tuning.retry_interval > 0 &&
      tick - st.last_proceed_tick >= cfg.tuning.retry_interval) {
    send_proceed(r, cfg, tick);
  }

  switch (st.phase) {
    case Phase::AwaitTarget: {
      const auto t = st.confirmer.observe(s.detections, cfg.tuning.confirm_frames);
      if (!t) break;
      st.target = *t;
      r.events.push_back("target:" + std::to_string(*t));
      try {
        st.plan = route_to(*cfg.map, *t);
      } catch (const ValidationError& e) {
        fault(r, e.what());
        break;
      }
      st.return_plan = reverse_plan(st.plan);
      if (cfg.role == Role::Follower) resolve_pause(st, cfg);
      enter(r, Phase::AwaitLoad);
      break;
    }
    case Phase::AwaitLoad:
      if (s.loaded) {
        st.step = 0;
        st.step_start = s.odometry_distance;
        st.lost_time = 0.0;
        enter(r, Phase::Outbound);
        r.intent = {IntentKind::Follow, 0.0};
        // Zero-length route: already at the ward.
        if (st.plan.size() == 1 && st.plan.front().edge.empty()) {
          st.delivered = true;
          enter(r, Phase::AtWard);
          r.intent = {IntentKind::Halt, 0.0};
        }
      }
      break;
    case Phase::Outbound:
      drive(r, cfg, s);
      break;
    case Phase::PausedAtPoint:
      if (st.proceed_received) {
        st.lost_time = 0.0;
        enter(r, Phase::Outbound);
        r.intent = {IntentKind::Follow, 0.0};
      }
      break;
    case Phase::AtWard:
      enter(r, Phase::AwaitUnload);
      break;
    case Phase::AwaitUnload:
      if (!s.loaded) {
        enter(r, Phase::Returning);
        st.step = 0;
        st.lost_time = 0.0;
        if (cfg.role == Role::Leader) send_proceed(r, cfg, tick);
        if (st.return_plan.size() == 1 && st.return_plan.front().edge.empty()) {
          enter(r, Phase::Done);
          break;
        }
        start_turn(r, s, std::numbers::pi);
      }
      break;
    case Phase::Returning:
      drive(r, cfg, s);
      break;
    case Phase::Done:
    case Phase::Fault:
      break;
  }
  if (halted_phase(st.phase)) r.intent = {IntentKind::Halt, 0.0};
  st.intent = r.intent;
  return r;
}

}  // namespace wardsim
