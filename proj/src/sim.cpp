// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "wardsim/errors.hpp"
#include "wardsim/random.hpp"

namespace wardsim {

namespace {

constexpr std::array<std::string_view, 4> kOutcomeNames = {"DeliveredAndReturned", "Delivered", "Incomplete",
                                                           "Fault"};

bool needs_camera(Phase p) { return p == Phase::AwaitTarget || p == Phase::Outbound || p == Phase::Returning; }

Pose start_pose(const TrackMap& map) {
  const Node* home = map.find_node(map.pharmacy);
  auto edges = map.incident(map.pharmacy);
  double heading = std::numbers::pi / 2;
  if (!edges.empty()) {
    const Edge& e = *edges.front();
    const auto& cl = e.centerline;
    const Vec2 toward = e.a == map.pharmacy ? cl[1] : cl[cl.size() - 2];
    const Vec2 d = toward - home->position;
    heading = std::atan2(d.y, d.x);
  }
  return {home->position.x, home->position.y, heading};
}

struct Cart {
  int id = 0;
  CartSetup setup;
  MissionConfig config;
  MissionState mission;
  VehicleState vehicle;
  PidState pid;
  double odo_distance = 0.0;
  double odo_heading = 0.0;
  double prev_line_x = 0.0;
  bool loaded_once = false;
  bool unloaded = false;
  std::int64_t arrival_tick = -1;
  std::int64_t done_tick = -1;
  std::vector<Message> inbox;
};

std::string fmt_double(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view to_string(OutcomeKind k) { return kOutcomeNames[static_cast<std::size_t>(k)]; }

std::optional<OutcomeKind> parse_outcome(std::string_view s) {
  for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
    if (kOutcomeNames[i] == s) return static_cast<OutcomeKind>(i);
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (max_ticks < 0) throw ValidationError("max_ticks must be non-negative");
  if (carts.empty() || carts.size() > 2) throw ValidationError("one or two carts are supported");
  for (const CartSetup& c : carts) {
    if (c.ward < 1 || c.ward > 8) throw ValidationError(fmt::format("ward {} is out of range 1..8", c.ward));
    if (c.payload_grams < 0.0) throw ValidationError("payload must be non-negative");
    if (c.load_at < 0.0 || c.unload_after < 0.0) throw ValidationError("attendant times must be non-negative");
  }
  if (noise.sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
  if (link.latency_ticks < 0) throw ValidationError("link latency must be non-negative");
  if (!(link.drop_probability >= 0.0 && link.drop_probability <= 1.0)) {
    throw ValidationError("drop probability must lie in [0, 1]");
  }
  if (base_duty < 0.0 || base_duty > 1.0 || turn_duty <= 0.0 || turn_duty > 1.0) {
    throw ValidationError("duty cycles must lie in [0, 1]");
  }
  try {
    camera.validate();
    vehicle.validate();
    gains.validate();
    check_distortion(noise.k1);
    check_distortion(camera.distortion_k1);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

TraceReport run_scenario(const TrackMap& map, const SimConfig& cfg) {
  cfg.validate();
  validate_map(map);

  TraceReport report;
  auto& hdr = report.header;
  hdr.emplace_back("generator", std::string(kGeneratorName));
  hdr.emplace_back("seed", std::to_string(cfg.seed));
  hdr.emplace_back("map", cfg.map_name);
  hdr.emplace_back("dt", fmt_double(cfg.dt));
  hdr.emplace_back("max_ticks", std::to_string(cfg.max_ticks));
  hdr.emplace_back("carts", std::to_string(cfg.carts.size()));
  hdr.emplace_back("noise.brightness", fmt_double(cfg.noise.brightness));
  hdr.emplace_back("noise.sigma", fmt_double(cfg.noise.sigma));
  hdr.emplace_back("noise.k1", fmt_double(cfg.noise.k1));
  hdr.emplace_back("link.latency", std::to_string(cfg.link.latency_ticks));
  hdr.emplace_back("link.drop", fmt_double(cfg.link.drop_probability));
  hdr.emplace_back("pid", fmt::format("{},{},{}", cfg.gains.kp, cfg.gains.ki, cfg.gains.kd));

  const std::uint64_t noise_seed = derive_seed(cfg.seed, 1);
  Link link(cfg.link.latency_ticks, cfg.link.drop_probability, derive_seed(cfg.seed, 2));
  const Renderer renderer(cfg.camera, cfg.noise.k1);
  const TemplateSet templates = default_templates();
  const int width = cfg.camera.width;
  const int height = cfg.camera.height;
  const RowRange roi{height - std::max(1, height / 10), height};
  const double center_x = (width - 1) / 2.0;

  std::vector<Cart> carts;
  for (std::size_t i = 0; i < cfg.carts.size(); ++i) {
    Cart c;
    c.id = static_cast<int>(i) + 1;
    c.setup = cfg.carts[i];
    c.config.role = c.setup.role;
    c.config.cart_id = c.id;
    c.config.pause_point = c.setup.pause_point;
    c.config.tuning = cfg.tuning;
    c.config.dt = cfg.dt;
    c.config.motor_time_constant = cfg.vehicle.motor_time_constant;
    c.config.map = &map;
    c.vehicle.pose = start_pose(map);
    c.prev_line_x = center_x;
    carts.push_back(std::move(c));
  }

  auto log = [&](std::int64_t tick, int cart, std::string text) {
    report.events.push_back({tick, cart, std::move(text)});
  };

  std::int64_t tick = 0;
  auto all_finished = [&] {
    return std::all_of(carts.begin(), carts.end(), [](const Cart& c) {
      return c.mission.phase == Phase::Done || c.mission.phase == Phase::Fault;
    });
  };

  for (; tick < cfg.max_ticks && !all_finished(); ++tick) {
    for (const Message& m : link.poll(tick)) {
      for (Cart& c : carts) {
        if (c.id == m.sender) continue;
        c.inbox.push_back(m);
        log(tick, c.id, fmt::format("msg:{}:{}:{}:delivered", m.sender, to_string(m.kind), m.seq));
      }
    }

    for (Cart& c : carts) {
      const Phase phase = c.mission.phase;
      const Intent intent = c.mission.intent;

      // Sense.
      SensorBundle sensors;
      sensors.frame_width = width;
      if (needs_camera(phase)) {
        NoiseParams noise = cfg.noise;
        noise.seed = derive_seed(noise_seed, static_cast<std::uint64_t>(tick), static_cast<std::uint64_t>(c.id));
        std::vector<PlacardEntry> held;
        if (phase == Phase::AwaitTarget) {
          const Pose& p = c.vehicle.pose;
          const Vec2 at = p.position() + direction(p.heading) * (cfg.camera.mount_forward + cfg.card_distance);
          held.push_back({c.setup.ward, {at.x, at.y, p.heading}, cfg.detect.glyph_height});
        }
        const Frame frame = renderer.render(map, c.vehicle.pose, noise, held);
        const BinaryFrame bin = preprocess(frame, cfg.camera, cfg.detect.binarize_margin);
        sensors.line = track_guide_line(bin, roi, c.prev_line_x, cfg.line);
        if (phase != Phase::Returning) sensors.detections = detect_in_binary(bin, cfg.camera, templates, cfg.detect);
      }

      // Control.
      MotorCommand cmd;
      if (intent.kind == IntentKind::Follow && !halted_phase(phase)) {
        double u = 0.0;
        if (sensors.line) {
          c.prev_line_x = sensors.line->x;
          std::tie(u, c.pid) = pid_step(c.pid, cfg.gains, (sensors.line->x - center_x) / (width / 2.0));
        }
        cmd = steer(u, cfg.base_duty);
      } else {
        c.pid = {};
        c.prev_line_x = center_x;
        if (intent.kind == IntentKind::Turn && !halted_phase(phase)) {
          const double s = intent.angle > 0.0 ? 1.0 : -1.0;
          cmd = {-s * cfg.turn_duty, s * cfg.turn_duty};
        }
      }

      // Actuate.
      const MotionStep motion = integrate_motion(c.vehicle, cmd, cfg.vehicle, cfg.dt);
      c.vehicle = motion.state;
      c.odo_distance += motion.distance;
      c.odo_heading += motion.rotation;

      // Attendant script.
      const double t = static_cast<double>(tick) * cfg.dt;
      if (c.setup.load && !c.loaded_once && t >= c.setup.load_at) {
        c.vehicle = set_payload(c.vehicle, c.setup.payload_grams, cfg.vehicle);
        c.loaded_once = true;
      }
      if (c.arrival_tick >= 0 && !c.unloaded && phase == Phase::AwaitUnload &&
          static_cast<double>(tick - c.arrival_tick) * cfg.dt >= c.setup.unload_after) {
        c.vehicle = set_payload(c.vehicle, 0.0, cfg.vehicle);
        c.unloaded = true;
      }

      // Mission.
      sensors.loaded = c.vehicle.loaded;
      sensors.odometry_distance = c.odo_distance;
      sensors.odometry_heading = c.odo_heading;
      sensors.speed = 0.5 * (c.vehicle.wheel_speed.left + c.vehicle.wheel_speed.right);
      sensors.yaw_rate = (c.vehicle.wheel_speed.right - c.vehicle.wheel_speed.left) / cfg.vehicle.track_width;
      MissionStepResult r = mission_step(c.mission, c.config, sensors, c.inbox, tick);
      c.inbox.clear();
      c.mission = std::move(r.state);
      for (std::string& e : r.events) log(tick, c.id, std::move(e));
      if (c.mission.phase == Phase::AtWard && c.arrival_tick < 0) c.arrival_tick = tick;
      if (c.mission.phase == Phase::Done && c.done_tick < 0) c.done_tick = tick;
      c.vehicle = set_leds(c.vehicle, red_led(c.mission.phase), yellow_led(c.mission.phase));

      for (const Message& m : r.outbox) {
        const bool ok = link.send(m, tick);
        log(tick, c.id, fmt::format("msg:{}:{}:{}:{}", m.sender, to_string(m.kind), m.seq, ok ? "sent" : "dropped"));
      }

      report.samples.push_back({tick, c.id, c.vehicle.pose, c.mission.phase, c.vehicle.led_red,
                                c.vehicle.led_yellow, c.mission.intent.kind,
                                c.mission.route_progress(c.odo_distance)});
    }
  }
  report.completion_ticks = tick;

  for (const Cart& c : carts) {
    CartOutcome o;
    o.final_phase = c.mission.phase;
    o.target = c.mission.target;
    o.recognized = c.mission.target != 0;
    o.delivered_tick = c.arrival_tick;
    o.done_tick = c.done_tick;
    if (c.mission.phase == Phase::Done) {
      o.kind = OutcomeKind::DeliveredAndReturned;
    } else if (c.mission.phase == Phase::Fault) {
      o.kind = OutcomeKind::Fault;
      o.reason = c.mission.fault;
    } else if (c.mission.delivered) {
      o.kind = OutcomeKind::Delivered;
    }
    report.outcomes.push_back(o);
  }
  report.max_line_deviation = measure_line_deviation(report.samples, map);
  return report;
}

double measure_line_deviation(std::span<const PoseSample> samples, const TrackMap& map) {
  double worst = 0.0;
  for (const PoseSample& s : samples) {
    if (s.phase != Phase::Outbound && s.phase != Phase::Returning) continue;
    worst = std::max(worst, map.distance_to_line(s.pose.position()));
  }
  return worst;
}

}  // namespace wardsim
