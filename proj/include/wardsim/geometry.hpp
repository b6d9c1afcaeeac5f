// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wardsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Unit vector pointing along `heading` (radians, counter-clockwise from +x).
inline Vec2 direction(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Planar pose; heading in radians, counter-clockwise from the +x axis.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Closest point on segment [a, b] to p, as the parameter t in [0, 1].
inline double project_onto_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return 0.0;
  return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const double t = project_onto_segment(p, a, b);
  return norm(p - (a + t * (b - a)));
}

}  // namespace wardsim
