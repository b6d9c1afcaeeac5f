// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wardsim/random.hpp"
#include "wardsim/vision.hpp"

namespace wardsim {

namespace {

// Inverse of r_d = r_u (1 + k1 r_u^2) by Newton; the map is monotone for valid k1.
double undistorted_radius(double r_d, double k1) {
  if (k1 == 0.0 || r_d == 0.0) return r_d;
  double r = r_d;
  for (int i = 0; i < 30; ++i) {
    const double f = r * (1.0 + k1 * r * r) - r_d;
    const double df = 1.0 + 3.0 * k1 * r * r;
    const double step = f / df;
    r -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return r;
}

struct VisibleCard {
  const GlyphGrid* grid;
  double glyph_height;
  Vec2 center;  // cart frame
  Vec2 up;
  Vec2 right;
  double half_h;
  double half_w;
  double reach;
};

struct LocalSegment {
  Vec2 a;
  Vec2 b;
  Vec2 lo{};
  Vec2 hi{};
};

double squared_distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 d = p - (a + t * ab);
  return dot(d, d);
}

}  // namespace

double CameraModel::focal_px() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera resolution must be positive");
  if (!(pitch > 0.0 && pitch < 0.5 * std::numbers::pi)) throw std::invalid_argument("camera pitch outside (0, pi/2)");
  if (!(horizontal_fov > 0.0 && horizontal_fov < std::numbers::pi)) {
    throw std::invalid_argument("camera field of view outside (0, pi)");
  }
  if (!(mount_height > 0.0)) throw std::invalid_argument("camera mount height must be positive");
  check_distortion(distortion_k1);
}

Renderer::Renderer(const CameraModel& cam, double true_k1, const SceneStyle& style) : cam_(cam), style_(style) {
  cam_.validate();
  check_distortion(true_k1);
  const int w = cam_.width;
  const int h = cam_.height;
  const double f = cam_.focal_px();
  const double half_diag = 0.5 * std::hypot(double(w), double(h));
  const double sp = std::sin(cam_.pitch);
  const double cp = std::cos(cam_.pitch);
  lut_.assign(std::size_t(w) * h, Vec2{});
  hits_floor_.assign(std::size_t(w) * h, 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double ox = u + 0.5 - 0.5 * w;
      const double oy = v + 0.5 - 0.5 * h;
      const double r_d = std::hypot(ox, oy) / half_diag;
      const double scale = r_d > 0.0 ? undistorted_radius(r_d, true_k1) / r_d : 1.0;
      const double xc = scale * ox / f;  // image right
      const double yc = scale * oy / f;  // image down
      // Cart frame: x forward, y left, z up.
      const double dx = cp - yc * sp;
      const double dy = -xc;
      const double dz = -sp - yc * cp;
      if (dz >= -1e-9) continue;
      const double t = cam_.mount_height / -dz;
      const Vec2 p{cam_.mount_forward + t * dx, t * dy};
      const std::size_t i = std::size_t(v) * w + u;
      lut_[i] = p;
      hits_floor_[i] = 1;
      view_radius_ = std::max(view_radius_, norm(p - Vec2{cam_.mount_forward, 0.0}));
    }
  }
}

std::optional<Vec2> Renderer::floor_point(int u, int v) const {
  const std::size_t i = std::size_t(v) * cam_.width + u;
  if (!hits_floor_[i]) return std::nullopt;
  return lut_[i];
}

Frame Renderer::render(const TrackMap& map, const Pose& pose, const NoiseParams& noise,
                       std::span<const PlacardEntry> cards) const {
  const Vec2 fwd = direction(pose.heading);
  const Vec2 left{-fwd.y, fwd.x};
  const Vec2 origin = pose.position();
  const Vec2 cam_world = origin + cam_.mount_forward * fwd;
  const double half_line = 0.5 * style_.line_width;
  // Everything is moved into the cart frame once so the lookup table applies directly.
  auto to_cart = [&](Vec2 p) {
    const Vec2 d = p - origin;
    return Vec2{dot(d, fwd), dot(d, left)};
  };

  std::vector<LocalSegment> segments;
  for (const Edge& e : map.edges) {
    for (std::size_t i = 0; i + 1 < e.centerline.size(); ++i) {
      const Vec2 a = e.centerline[i];
      const Vec2 b = e.centerline[i + 1];
      if (distance_to_segment(cam_world, a, b) > view_radius_ + half_line) continue;
      LocalSegment s{to_cart(a), to_cart(b)};
      s.lo = Vec2{std::min(s.a.x, s.b.x) - half_line, std::min(s.a.y, s.b.y) - half_line};
      s.hi = Vec2{std::max(s.a.x, s.b.x) + half_line, std::max(s.a.y, s.b.y) + half_line};
      segments.push_back(s);
    }
  }
  std::vector<VisibleCard> visible;
  auto consider = [&](const PlacardEntry& p) {
    const double half_h = 0.5 * p.glyph_height * (1.0 + style_.card_margin);
    const double half_w = 0.5 * p.glyph_height * kGlyphAspect * (1.0 + style_.card_margin);
    if (norm(p.pose.position() - cam_world) > view_radius_ + half_h + half_w) return;
    const double rel = p.pose.heading - pose.heading;
    VisibleCard c{&glyph(p.digit), p.glyph_height, to_cart(p.pose.position()), direction(rel),
                  direction(rel - 0.5 * std::numbers::pi), half_h, half_w, 0.0};
    c.reach = std::hypot(half_h, half_w);
    visible.push_back(c);
  };
  for (const PlacardEntry& c : cards) consider(c);
  for (const PlacardGroup& g : map.placards)
    for (const PlacardEntry& e : g.entries) consider(e);

  const double hl2 = half_line * half_line;
  const int w = cam_.width;
  const int h = cam_.height;
  Frame frame(w, h);
  GaussianSource gauss(noise.seed);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = std::size_t(v) * w + u;
      double value = style_.floor;
      if (hits_floor_[i]) {
        const Vec2 p = lut_[i];
        bool on_card = false;
        for (const VisibleCard& c : visible) {
          const Vec2 d = p - c.center;
          if (std::abs(d.x) > c.reach || std::abs(d.y) > c.reach) continue;
          const double along = dot(d, c.up);
          const double across = dot(d, c.right);
          if (std::abs(along) > c.half_h || std::abs(across) > c.half_w) continue;
          on_card = true;
          const double gw = c.glyph_height * kGlyphAspect;
          const int col = static_cast<int>(std::floor((across / gw + 0.5) * kGlyphSize));
          const int row = static_cast<int>(std::floor((0.5 - along / c.glyph_height) * kGlyphSize));
          if (col >= 0 && col < kGlyphSize && row >= 0 && row < kGlyphSize &&
              (*c.grid)[std::size_t(row) * kGlyphSize + col]) {
            value = style_.ink;
          }
          break;
        }
        if (!on_card) {
          for (const LocalSegment& s : segments) {
            if (p.x < s.lo.x || p.x > s.hi.x || p.y < s.lo.y || p.y > s.hi.y) continue;
            if (squared_distance_to_segment(p, s.a, s.b) <= hl2) {
              value = style_.ink;
              break;
            }
          }
        }
      }
      value += noise.brightness;
      if (noise.sigma > 0.0) value += noise.sigma * gauss.next();
      // Round half up; anything negative clamps to 0 either way.
      const int level = static_cast<int>(std::floor(value + 0.5));
      frame.pixels[i] = static_cast<std::uint8_t>(std::clamp(level, 0, 255));
    }
  }
  return frame;
}

Frame render(const TrackMap& map, const Pose& pose, const CameraModel& cam, const NoiseParams& noise,
             std::span<const PlacardEntry> cards) {
  return Renderer(cam, noise.k1).render(map, pose, noise, cards);
}

}  // namespace wardsim
