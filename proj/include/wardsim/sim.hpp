// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wardsim/arena.hpp"
#include "wardsim/controller.hpp"
#include "wardsim/mission.hpp"
#include "wardsim/vehicle.hpp"
#include "wardsim/vision.hpp"

namespace wardsim {

/// Scripted setup of one cart: which card is shown to it, and when the
/// attendant loads and unloads it.
struct CartSetup {
  int ward = 1;
  Role role = Role::Solo;
  bool load = true;
  double load_at = 0.5;       // s after start
  double unload_after = 2.0;  // s after arriving at the ward
  double payload_grams = 200.0;
  std::optional<Vec2> pause_point;
};

struct LinkParams {
  int latency_ticks = 2;
  double drop_probability = 0.0;
};

struct SimConfig {
  double dt = 0.02;
  std::int64_t max_ticks = 6000;
  std::uint64_t seed = 1;
  NoiseParams noise;  // seed field ignored; derived from `seed`
  CameraModel camera;
  VehicleParams vehicle;
  PidGains gains;
  MissionTuning tuning;
  LineParams line;
  DetectParams detect;
  LinkParams link;
  double base_duty = 0.5;
  double turn_duty = 0.3;
  double card_distance = 0.13;  // m ahead of the camera, where the target card is shown
  std::vector<CartSetup> carts{CartSetup{}};
  std::string map_name = "builtin:default";

  /// Throws ValidationError on an unusable configuration.
  void validate() const;
};

enum class OutcomeKind { DeliveredAndReturned, Delivered, Incomplete, Fault };

std::string_view to_string(OutcomeKind k);
std::optional<OutcomeKind> parse_outcome(std::string_view s);

struct CartOutcome {
  OutcomeKind kind = OutcomeKind::Incomplete;
  std::string reason;  // Fault only
  int target = 0;      // digit the cart recognized (0 if none)
  bool recognized = false;
  Phase final_phase = Phase::AwaitTarget;
  std::int64_t delivered_tick = -1;
  std::int64_t done_tick = -1;
};

struct TraceEvent {
  std::int64_t tick = 0;
  int cart = 0;
  std::string text;
};

struct PoseSample {
  std::int64_t tick = 0;
  int cart = 0;
  Pose pose;
  Phase phase = Phase::AwaitTarget;
  bool led_red = false;
  bool led_yellow = false;
  IntentKind intent = IntentKind::Halt;
  double route_progress = 0.0;
};

struct TraceReport {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<CartOutcome> outcomes;
  std::vector<TraceEvent> events;
  std::vector<PoseSample> samples;  // one per cart per tick, after the tick
  std::int64_t completion_ticks = 0;
  double max_line_deviation = 0.0;
};

/// Fixed-step engine. Within a tick each cart, in index order, runs
/// sense -> control -> actuate -> attendant script -> mission -> link send.
/// Messages are polled at the start of a tick, so anything sent is visible
/// the next tick at the earliest. Equal (map, config) give identical reports.
TraceReport run_scenario(const TrackMap& map, const SimConfig& config);

/// Largest distance from a driving (Outbound/Returning) sample to the guide line.
double measure_line_deviation(std::span<const PoseSample> samples, const TrackMap& map);

/// CSV trace: `# key=value` header lines, then `tick,cart,x,y,heading,phase,event`.
void write_trace(std::ostream& out, const TraceReport& report);

/// SVG drawing of the map and, when given, the cart trajectories.
void write_svg(std::ostream& out, const TrackMap& map, const TraceReport* report = nullptr);

}  // namespace wardsim
