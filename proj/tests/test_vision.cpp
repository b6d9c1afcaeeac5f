// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "wardsim/arena.hpp"
#include "wardsim/vision.hpp"

using namespace wardsim;

namespace {

TrackMap straight_line() { return load_map("node P 0 -1\nnode A 0 5\npharmacy P\nedge E P A\n"); }

// Pinhole projection written out from the camera rotation, for checking the
// renderer independently of its lookup table.
std::optional<Vec2> project(const CameraModel& cam, const Pose& pose, Vec2 world) {
  const Vec2 rel = world - pose.position();
  const double fwd = rel.x * std::cos(pose.heading) + rel.y * std::sin(pose.heading) - cam.mount_forward;
  const double left = -rel.x * std::sin(pose.heading) + rel.y * std::cos(pose.heading);
  const double up = -cam.mount_height;
  // Optical axis pitched down: z_c forward, x_c right, y_c down.
  const double zc = fwd * std::cos(cam.pitch) - up * std::sin(cam.pitch);
  const double xc = -left;
  const double yc = -fwd * std::sin(cam.pitch) - up * std::cos(cam.pitch);
  if (zc <= 0) return std::nullopt;
  const double f = 0.5 * cam.width / std::tan(0.5 * cam.horizontal_fov);
  return Vec2{f * xc / zc + 0.5 * cam.width - 0.5, f * yc / zc + 0.5 * cam.height - 0.5};
}

double dark_run_center(const Frame& f, int row) {
  double sum = 0;
  int n = 0;
  for (int x = 0; x < f.width; ++x) {
    if (f.at(x, row) < 115) {
      sum += x;
      ++n;
    }
  }
  REQUIRE(n > 0);
  return sum / n;
}

// Union-find labelling under 8-connectivity.
std::vector<int> label_oracle(const BinaryFrame& b) {
  std::vector<int> parent(b.bits.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int y = 0; y < b.height; ++y) {
    for (int x = 0; x < b.width; ++x) {
      if (!b.at(x, y)) continue;
      for (auto [dx, dy] : {std::pair{-1, 0}, {-1, -1}, {0, -1}, {1, -1}}) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= b.width || !b.at(nx, ny)) continue;
        parent[find(y * b.width + x)] = find(ny * b.width + nx);
      }
    }
  }
  std::vector<int> out(b.bits.size(), -1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (b.bits[i]) out[i] = find(static_cast<int>(i));
  }
  return out;
}

BinaryFrame square_at(BinaryFrame b, int x0, int y0, int size) {
  for (int y = y0; y < y0 + size; ++y)
    for (int x = x0; x < x0 + size; ++x) b.at(x, y) = 1;
  return b;
}

Frame render_card(int digit, double ahead, double lateral, const NoiseParams& noise = {}, double k1 = 0.0) {
  const TrackMap blank;
  CameraModel cam;
  const PlacardEntry card{digit, {cam.mount_forward + ahead, lateral, 0.0}, 0.04};
  return Renderer(cam, k1).render(blank, {0, 0, 0}, noise, std::span(&card, 1));
}

// Least-squares residual variance of per-row foreground centroids around a fitted line.
double row_fit_residual(const BinaryFrame& b, int y0, int y1) {
  std::vector<double> ys, xs;
  for (int y = y0; y < y1; ++y) {
    double s = 0;
    int n = 0;
    for (int x = 0; x < b.width; ++x) {
      if (b.at(x, y)) {
        s += x;
        ++n;
      }
    }
    if (n) {
      ys.push_back(y);
      xs.push_back(s / n);
    }
  }
  const double n = static_cast<double>(ys.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double sxy = 0, syy = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sxy += (ys[i] - my) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / syy;
  double r = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double e = xs[i] - (mx + slope * (ys[i] - my));
    r += e * e;
  }
  return r / n;
}

}  // namespace

TEST_SUITE("vision") {
  TEST_CASE("centered straight line gives a dark run at the image center") {
    const CameraModel cam;
    const Frame f = render(straight_line(), {0, 0, M_PI / 2}, cam, {});
    CHECK(std::abs(dark_run_center(f, cam.height - 1) - 0.5 * cam.width) <= 1.0);
  }

  TEST_CASE("nothing in view binarizes to an empty frame") {
    const CameraModel cam;
    const Frame f = render(straight_line(), {2.0, 0, M_PI / 2}, cam, {});
    CHECK(adaptive_binarize(f).count() == 0);
  }

  TEST_CASE("a cart left of the line sees it right of center where the projection says") {
    const CameraModel cam;
    const Pose pose{-0.05, 0.0, M_PI / 2};
    const Frame f = render(straight_line(), pose, cam, {});
    const int row = cam.height - 1;
    const double seen = dark_run_center(f, row);
    CHECK(seen > 0.5 * cam.width);
    // Where the projected line crosses the bottom row.
    const auto a = project(cam, pose, {0.0, 0.0});
    const auto b = project(cam, pose, {0.0, 0.3});
    REQUIRE(a);
    REQUIRE(b);
    const double t = (row - a->y) / (b->y - a->y);
    CHECK(std::abs(seen - (a->x + t * (b->x - a->x))) < 1.0);
  }

  TEST_CASE("ground-plane projection helpers invert each other") {
    const CameraModel cam;
    for (double u : {0.0, 40.5, 79.5, 159.0}) {
      for (double v : {30.0, 60.0, 119.0}) {
        const auto p = image_to_floor(cam, u, v);
        REQUIRE(p);
        const auto q = floor_to_image(cam, *p);
        REQUIRE(q);
        CHECK(q->x == doctest::Approx(u).epsilon(1e-9).scale(1.0));
        CHECK(q->y == doctest::Approx(v).epsilon(1e-9).scale(1.0));
        const auto o = project(cam, {0, 0, 0}, *p);
        CHECK(o->x == doctest::Approx(u).epsilon(1e-9).scale(1.0));
      }
    }
  }

  TEST_CASE("binarization basics") {
    Frame uniform(16, 8, 200);
    CHECK(adaptive_binarize(uniform).count() == 0);

    Frame half(16, 8, 255);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) half.at(x, y) = 0;
    const BinaryFrame b = adaptive_binarize(half);
    CHECK(b.count() == 64);
    CHECK(b.at(0, 0) == 1);
    CHECK(b.at(15, 7) == 0);
  }

  TEST_CASE("binarization ignores a global brightness offset") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> px(40, 215);
    std::uniform_int_distribution<int> off(-40, 40);
    for (int trial = 0; trial < 200; ++trial) {
      Frame f(32, 24);
      for (auto& p : f.pixels) p = static_cast<std::uint8_t>(px(rng));
      const int b = off(rng);
      Frame g = f;
      for (auto& p : g.pixels) p = static_cast<std::uint8_t>(p + b);
      CHECK(adaptive_binarize(f) == adaptive_binarize(g));
    }
    const Frame f = render(straight_line(), {0.01, 0, M_PI / 2 + 0.05}, CameraModel{}, {});
    Frame g = f;
    for (auto& p : g.pixels) p = static_cast<std::uint8_t>(p + 30);
    CHECK(adaptive_binarize(f) == adaptive_binarize(g));
  }

  TEST_CASE("undistortion") {
    const CameraModel cam;
    const Frame f = render(straight_line(), {0.03, 0, M_PI / 2}, cam, {}, {});
    CHECK(undistort(f, 0.0) == f);
    CHECK_THROWS_AS(undistort(f, -0.5), std::invalid_argument);

    // The radial map fixes the image center.
    Frame g(cam.width, cam.height, 100);
    g.at(cam.width / 2, cam.height / 2) = 7;
    for (double k1 : {-0.2, 0.05, 0.1}) CHECK(undistort(g, k1).at(cam.width / 2, cam.height / 2) == 7);
  }

  TEST_CASE("undistortion straightens a distorted off-center line") {
    CameraModel cam;
    const Pose pose{0.04, 0, M_PI / 2};
    const Frame f = Renderer(cam, 0.1).render(straight_line(), pose, {0, 0, 0.1, 0});
    const BinaryFrame raw = adaptive_binarize(f);
    const BinaryFrame fixed = undistort(raw, 0.1);
    const double before = row_fit_residual(raw, 5, cam.height - 5);
    const double after = row_fit_residual(fixed, 5, cam.height - 5);
    CHECK(after < 0.5);
    CHECK(after < before);
  }

  TEST_CASE("line centroid") {
    BinaryFrame b(64, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 30; x <= 34; ++x) b.at(x, y) = 1;
    LineParams p;
    p.min_count = 5;
    const auto r = line_centroid(b, {0, 10}, p);
    REQUIRE(r);
    CHECK(r->x == doctest::Approx(32.0));
    CHECK(r->confidence > 0.0);
    CHECK(r->confidence <= 1.0);

    CHECK_FALSE(line_centroid(BinaryFrame(64, 10), {0, 10}, p));

    BinaryFrame fork(80, 10);
    for (int y = 0; y < 10; ++y) {
      for (int x = 18; x <= 22; ++x) fork.at(x, y) = 1;
      for (int x = 58; x <= 62; ++x) fork.at(x, y) = 1;
    }
    const auto m = line_centroid(fork, {0, 10}, p);
    REQUIRE(m);
    CHECK(m->x == doctest::Approx(40.0));
  }

  TEST_CASE("tracker keeps the branch nearest the previous reading") {
    BinaryFrame fork(80, 10);
    for (int y = 0; y < 10; ++y) {
      for (int x = 18; x <= 22; ++x) fork.at(x, y) = 1;
      for (int x = 58; x <= 62; ++x) fork.at(x, y) = 1;
    }
    LineParams p;
    p.min_count = 5;
    CHECK(track_guide_line(fork, {0, 10}, 25.0, p)->x == doctest::Approx(20.0));
    CHECK(track_guide_line(fork, {0, 10}, 70.0, p)->x == doctest::Approx(60.0));
  }

  TEST_CASE("centered line reads at the image center for small heading errors") {
    const CameraModel cam;
    const TrackMap map = straight_line();
    const Renderer r(cam, 0.0);
    const int rows = cam.height / 10;
    const RowRange roi{cam.height - rows, cam.height};
    const auto q = image_to_floor(cam, 0.5 * (cam.width - 1), 0.5 * (roi.begin + roi.end - 1));
    REQUIRE(q);
    for (double deg = -5.0; deg <= 5.0; deg += 0.5) {
      const double heading = M_PI / 2 + deg * M_PI / 180.0;
      const Vec2 at{0.0, 1.0};
      const Vec2 origin = at - q->x * direction(heading) - q->y * Vec2{-std::sin(heading), std::cos(heading)};
      const Frame f = r.render(map, {origin.x, origin.y, heading}, {});
      const auto reading = track_guide_line(preprocess(f, cam), roi, 0.5 * (cam.width - 1));
      REQUIRE(reading);
      CHECK(std::abs(reading->x - 0.5 * cam.width) <= 1.0);
    }
  }

  TEST_CASE("contour extraction") {
    CHECK(extract_contours(BinaryFrame(20, 20)).empty());

    const auto one = extract_contours(square_at(BinaryFrame(20, 20), 3, 4, 5));
    REQUIRE(one.size() == 1);
    CHECK(one[0].width == 5);
    CHECK(one[0].height == 5);
    CHECK(one[0].area == 25);

    BinaryFrame diag = square_at(square_at(BinaryFrame(20, 20), 2, 2, 3), 5, 5, 3);
    CHECK(extract_contours(diag).size() == 1);

    BinaryFrame two = square_at(square_at(BinaryFrame(20, 20), 12, 2, 3), 2, 9, 3);
    const auto sorted = extract_contours(two);
    REQUIRE(sorted.size() == 2);
    CHECK(sorted[0].x < sorted[1].x);
  }

  TEST_CASE("contours partition the foreground like an independent labelling") {
    std::mt19937_64 rng(21);
    std::bernoulli_distribution ink(0.3);
    for (int trial = 0; trial < 100; ++trial) {
      BinaryFrame b(30, 20);
      for (auto& bit : b.bits) bit = ink(rng);
      const auto blobs = extract_contours(b, 1);
      const auto oracle = label_oracle(b);

      std::map<int, int> oracle_sizes;
      for (int l : oracle) {
        if (l >= 0) ++oracle_sizes[l];
      }
      REQUIRE(blobs.size() == oracle_sizes.size());

      std::vector<int> owner(b.bits.size(), -1);
      int covered = 0;
      for (std::size_t k = 0; k < blobs.size(); ++k) {
        const Blob& bl = blobs[k];
        std::set<int> labels;
        for (int my = 0; my < bl.height; ++my) {
          for (int mx = 0; mx < bl.width; ++mx) {
            if (!bl.at(mx, my)) continue;
            const int i = (bl.y + my) * b.width + bl.x + mx;
            CHECK(owner[i] == -1);
            owner[i] = static_cast<int>(k);
            labels.insert(oracle[i]);
            ++covered;
          }
        }
        REQUIRE(labels.size() == 1);
        CHECK(oracle_sizes[*labels.begin()] == bl.area);
      }
      CHECK(static_cast<std::size_t>(covered) == b.count());
    }
  }

  TEST_CASE("template matching") {
    const TemplateSet t = default_templates();
    REQUIRE(t.size() == 8);
    for (int d = 1; d <= 8; ++d) {
      const auto m = match_digit(blob_from_grid(glyph(d)), t);
      REQUIRE(m);
      CHECK(m->digit == d);
      CHECK(m->score == 1.0);
    }

    GlyphGrid full;
    full.fill(1);
    CHECK_FALSE(match_digit(blob_from_grid(full), t));

    // "1" shifted right by one pixel inside a larger canvas.
    BinaryFrame canvas(20, 20);
    for (int y = 0; y < kGlyphSize; ++y)
      for (int x = 0; x < kGlyphSize; ++x) canvas.at(x + 3, y + 2) = glyph(1)[y * kGlyphSize + x];
    const auto blobs = extract_contours(canvas);
    REQUIRE(blobs.size() == 1);
    const auto shifted = match_digit(blobs[0], t);
    REQUIRE(shifted);
    CHECK(shifted->digit == 1);
    CHECK(shifted->score >= 0.85);
  }

  TEST_CASE("glyph font is well separated") {
    for (int a = 1; a <= 8; ++a) {
      for (int b = a + 1; b <= 8; ++b) {
        int ham = 0;
        for (int i = 0; i < kGlyphSize * kGlyphSize; ++i) ham += glyph(a)[i] != glyph(b)[i];
        CHECK(ham >= 38);
      }
    }
    CHECK_THROWS_AS(glyph(0), std::out_of_range);
    CHECK_THROWS_AS(glyph(9), std::out_of_range);
  }

  TEST_CASE("placard detection end to end") {
    const CameraModel cam;
    const TemplateSet t = default_templates();
    CHECK(detect_placards(render(straight_line(), {0, 0, M_PI / 2}, cam, {}), cam, t).empty());

    for (int d = 1; d <= 8; ++d) {
      const auto dets = detect_placards(render_card(d, 0.13, 0.0), cam, t);
      REQUIRE(dets.size() == 1);
      CHECK(dets[0].digit == d);
      CHECK(dets[0].score >= 0.85);
      CHECK(dets[0].range_z > 0.0);
    }
  }

  TEST_CASE("four placards at the far junction read left to right") {
    const TrackMap m = default_map();
    const CameraModel cam;
    const Frame f = render(m, {0.0, 2.85, M_PI / 2}, cam, {});
    const auto dets = detect_placards(f, cam, default_templates());
    REQUIRE(dets.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(dets[i].digit == 5 + i);
    for (int i = 0; i + 1 < 4; ++i) CHECK(dets[i].image_x < dets[i + 1].image_x);
  }

  TEST_CASE("range estimate shrinks as a card approaches") {
    const CameraModel cam;
    const TemplateSet t = default_templates();
    double last = 1e9;
    for (double ahead : {0.18, 0.15, 0.12}) {
      const auto dets = detect_placards(render_card(3, ahead, 0.0), cam, t);
      REQUIRE(dets.size() == 1);
      CHECK(dets[0].range_z < last);
      last = dets[0].range_z;
    }
  }

  TEST_CASE("rendering is deterministic in the noise seed") {
    const CameraModel cam;
    const NoiseParams n{10, 8, 0.05, 99};
    const Frame a = render(default_map(), {0, 0.5, M_PI / 2}, cam, n);
    const Frame b = render(default_map(), {0, 0.5, M_PI / 2}, cam, n);
    CHECK(a == b);
    NoiseParams other = n;
    other.seed = 100;
    CHECK_FALSE(render(default_map(), {0, 0.5, M_PI / 2}, cam, other) == a);
  }

  TEST_CASE("frames export as plain PGM") {
    Frame f(3, 2, 9);
    f.at(2, 1) = 255;
    std::ostringstream out;
    write_pgm(out, f);
    CHECK(out.str() == "P2\n3 2\n255\n9 9 9\n9 9 255\n");
  }

  TEST_CASE("camera validation") {
    CameraModel cam;
    cam.pitch = 0;
    CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
    cam = CameraModel{};
    cam.width = 0;
    CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
  }
}
