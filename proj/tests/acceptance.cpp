// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "wardsim/controller.hpp"
#include "wardsim/corpus.hpp"
#include "wardsim/vehicle.hpp"
#include "wardsim/vision.hpp"

using namespace wardsim;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict ward_coverage() {
  const auto start = std::chrono::steady_clock::now();
  int ok = 0;
  std::string misses;
  for (int w = 1; w <= 8; ++w) {
    const Scenario s = testing::scenario_file(fmt::format("scenarios/ward{}.scn", w));
    const TraceReport r = testing::run(s);
    if (r.outcomes.at(0).kind == OutcomeKind::DeliveredAndReturned) {
      ++ok;
    } else {
      misses += fmt::format(" ward{}={}", w, to_string(r.outcomes[0].kind));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ok == 8 && secs < 10.0, fmt::format("{}/8 DeliveredAndReturned in {:.2f} s{}", ok, secs, misses)};
}

Verdict robust_delivery() {
  bool pass = true;
  std::string detail;
  for (int ward : {1, 4, 7}) {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SimConfig cfg = testing::solo(ward, seed);
      cfg.noise.sigma = 8;
      cfg.noise.brightness = seed % 2 ? 30.0 : -30.0;
      cfg.noise.k1 = 0.05;
      cfg.camera.distortion_k1 = 0.05;
      ok += run_scenario(default_map(), cfg).outcomes[0].kind == OutcomeKind::DeliveredAndReturned;
    }
    pass &= ok >= 18;
    detail += fmt::format("{}ward{} {}/20", detail.empty() ? "" : ", ", ward, ok);
  }
  return {pass, detail};
}

Verdict pid_equivalence() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> err(-1.0, 1.0);
  std::uniform_real_distribution<double> kp_d(0.1, 2.0), ti_d(0.2, 5.0), td_d(0.0, 0.05), t_d(0.005, 0.05);
  double worst_form = 0.0, worst_inc = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double kp = kp_d(rng), ti = ti_d(rng), td = td_d(rng), t = t_d(rng);
    PidGains g = gains_from_classical(kp, ti, td, t);
    g.integral_limit = PidGains::unlimited;
    g.output_limit = PidGains::unlimited;
    std::vector<double> e(100), u(100);
    for (double& x : e) x = err(rng);
    PidState s;
    double sum = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      std::tie(u[k], s) = pid_step(s, g, e[k]);
      sum += e[k];
      const double prev = k == 0 ? e[0] : e[k - 1];
      // Textbook form with Kp, Ti, Td and the sample period.
      const double classical = kp * (e[k] + t / ti * sum + td * (e[k] - prev) / t);
      worst_form = std::max(worst_form, std::abs(u[k] - classical));
      if (k >= 2) {
        const double inc = g.kp * (e[k] - e[k - 1]) + g.ki * e[k] + g.kd * (e[k] - 2 * e[k - 1] + e[k - 2]);
        worst_inc = std::max(worst_inc, std::abs((u[k] - u[k - 1]) - inc));
      }
    }
  }
  return {worst_form <= 1e-12 && worst_inc <= 1e-12,
          fmt::format("max form gap {:.2e}, max incremental gap {:.2e} over 1000 sequences", worst_form, worst_inc)};
}

Verdict vision_accuracy() {
  const CorpusReport r = run_vision_corpus(CorpusGrid{});
  return {r.samples.size() >= 1000 && r.accuracy() >= 0.95 && r.clean_accuracy() == 1.0,
          fmt::format("{} samples, accuracy {:.4f}, clean {:.4f}", r.samples.size(), r.accuracy(),
                      r.clean_accuracy())};
}

Verdict centroid_precision() {
  const TrackMap map = load_map("node P 0 -1\nnode A 0 5\npharmacy P\nedge E P A\n");
  const CameraModel cam;
  const Renderer renderer(cam, 0.0);
  const RowRange roi{cam.height - cam.height / 10, cam.height};
  // Put the line through the floor point seen at the middle of the band.
  const auto q = image_to_floor(cam, 0.5 * (cam.width - 1), 0.5 * (roi.begin + roi.end - 1));
  if (!q) return {false, "band center above the horizon"};
  double worst = 0.0;
  int frames = 0;
  for (double deg = -5.0; deg <= 5.0 + 1e-9; deg += 0.25) {
    const double h = M_PI / 2 + deg * M_PI / 180.0;
    const Vec2 origin = Vec2{0.0, 1.0} - q->x * direction(h) - q->y * Vec2{-std::sin(h), std::cos(h)};
    const Frame f = renderer.render(map, {origin.x, origin.y, h}, {});
    const auto c = line_centroid(preprocess(f, cam), roi);
    if (!c) return {false, fmt::format("no centroid at {} deg", deg)};
    worst = std::max(worst, std::abs(c->x - 0.5 * cam.width));
    ++frames;
  }
  return {worst <= 1.0, fmt::format("max |x - width/2| = {:.3f} px over {} headings", worst, frames)};
}

Verdict coordination() {
  const TrackMap map = default_map();
  const std::int64_t solo3 = run_scenario(map, testing::solo(3)).completion_ticks;
  const std::int64_t solo4 = run_scenario(map, testing::solo(4)).completion_ticks;
  const std::int64_t solo = std::min(solo3, solo4);

  const RoutePlan plan = route_to(map, 4);
  double pause = 0.0;
  for (std::size_t i = 0; i + 2 < plan.size(); ++i) pause += plan[i].length;
  pause += 0.5 * plan[plan.size() - 2].length;

  int ok = 0;
  double overshoot = -1e9;
  std::int64_t slowest = 0;
  std::string misses;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TraceReport r = run_scenario(map, testing::pair(0.5, seed));
    bool safe = true, leds = true, paused = false;
    std::map<std::int64_t, Phase> leader;
    for (const PoseSample& s : r.samples) {
      if (s.cart == 1) leader[s.tick] = s.phase;
    }
    for (const PoseSample& s : r.samples) {
      if (s.cart != 2) continue;
      leds &= s.led_yellow == (s.phase == Phase::PausedAtPoint);
      paused |= s.phase == Phase::PausedAtPoint;
      const auto it = leader.find(s.tick);
      const Phase lp = it == leader.end() ? Phase::Done : it->second;
      if (lp != Phase::Returning && lp != Phase::Done) {
        overshoot = std::max(overshoot, s.route_progress - pause);
        safe &= s.route_progress <= pause;
      }
    }
    const bool both = r.outcomes[0].kind == OutcomeKind::DeliveredAndReturned &&
                      r.outcomes[1].kind == OutcomeKind::DeliveredAndReturned;
    const bool in_time = both && r.completion_ticks <= 3 * solo;
    slowest = std::max(slowest, r.completion_ticks);
    if (safe && leds && paused && in_time) {
      ++ok;
    } else {
      misses += fmt::format(" seed{}(safe={} leds={} paused={} time={})", seed, safe, leds, paused, in_time);
    }
  }
  return {ok == 20, fmt::format("{}/20 seeds at drop 0.5; slowest {} ticks vs 3x solo {}; closest approach to "
                                "pause {:.1e} m{}",
                                ok, slowest, 3 * solo, -overshoot, misses)};
}

Verdict determinism() {
  std::vector<std::string> files;
  for (int w = 1; w <= 8; ++w) files.push_back(fmt::format("scenarios/ward{}.scn", w));
  files.push_back("scenarios/coordination.scn");
  files.push_back("scenarios/robust/ward4.scn");
  int same = 0;
  for (const std::string& f : files) {
    const Scenario s = testing::scenario_file(f);
    same += testing::trace_text(testing::run(s)) == testing::trace_text(testing::run(s));
  }
  return {same == static_cast<int>(files.size()),
          fmt::format("{}/{} scenarios byte-identical on rerun", same, files.size())};
}

Verdict kinematics() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> duty(-1.0, 1.0), span(0.001, 0.5), angle(-M_PI, M_PI);
  const VehicleParams p;
  double worst_split = 0.0, worst_drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    VehicleState s;
    s.pose = {duty(rng), duty(rng), angle(rng)};
    s.wheel_speed = {p.v_max * duty(rng), p.v_max * duty(rng)};
    const MotorCommand c{duty(rng), duty(rng)};
    const double dt = span(rng);
    const VehicleState two = apply_motor(apply_motor(s, c, p, dt), c, p, dt);
    const VehicleState one = apply_motor(s, c, p, 2 * dt);
    worst_split = std::max({worst_split, std::abs(two.pose.x - one.pose.x), std::abs(two.pose.y - one.pose.y),
                            std::abs(wrap_angle(two.pose.heading - one.pose.heading))});

    // Opposite duties from opposite wheel speeds: spins in place.
    VehicleState spin;
    spin.pose = s.pose;
    const double w = p.v_max * duty(rng);
    spin.wheel_speed = {-w, w};
    const double d = duty(rng);
    const VehicleState after = apply_motor(spin, {-d, d}, p, dt);
    worst_drift = std::max(worst_drift, norm(after.pose.position() - spin.pose.position()));
  }
  return {worst_split <= 1e-9 && worst_drift <= 1e-9,
          fmt::format("max split-step gap {:.2e}, max in-place drift {:.2e} m over 1000 commands", worst_split,
                      worst_drift)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 ward coverage", ward_coverage},
      {"2 robust delivery", robust_delivery},
      {"3 PID form equivalence", pid_equivalence},
      {"4 vision accuracy", vision_accuracy},
      {"5 line centroid precision", centroid_precision},
      {"6 two-cart coordination", coordination},
      {"7 determinism", determinism},
      {"8 kinematics", kinematics},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.pass;
    fmt::print("{} {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
    std::fflush(stdout);
  }
  return failed;
}
