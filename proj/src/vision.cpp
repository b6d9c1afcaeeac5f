// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "wardsim/vision.hpp"

namespace wardsim {

namespace {

// Source pixel for output pixel (u, v) under the radial model, or false when it
// falls outside the frame.
bool distorted_source(int u, int v, int w, int h, double k1, int& su, int& sv) {
  const double half_diag = 0.5 * std::hypot(double(w), double(h));
  const double ox = u + 0.5 - 0.5 * w;
  const double oy = v + 0.5 - 0.5 * h;
  const double r2 = (ox * ox + oy * oy) / (half_diag * half_diag);
  const double s = 1.0 + k1 * r2;
  su = static_cast<int>(std::floor(0.5 * w + s * ox));
  sv = static_cast<int>(std::floor(0.5 * h + s * oy));
  return su >= 0 && su < w && sv >= 0 && sv < h;
}

template <class Grid, class Fill>
Grid remap(const Grid& src, const std::vector<std::uint8_t>& data, std::vector<std::uint8_t> Grid::*member,
           double k1, Fill fill) {
  Grid out = src;
  auto& dst = out.*member;
  for (int v = 0; v < src.height; ++v) {
    for (int u = 0; u < src.width; ++u) {
      int su = 0;
      int sv = 0;
      dst[std::size_t(v) * src.width + u] = distorted_source(u, v, src.width, src.height, k1, su, sv)
                                                ? data[std::size_t(sv) * src.width + su]
                                                : fill;
    }
  }
  return out;
}

}  // namespace

std::size_t BinaryFrame::count() const { return std::size_t(std::count(bits.begin(), bits.end(), 1)); }

BinaryFrame adaptive_binarize(const Frame& f, int margin) {
  BinaryFrame out(f.width, f.height);
  const std::int64_t n = static_cast<std::int64_t>(f.pixels.size());
  if (n == 0) return out;
  const std::int64_t sum = std::accumulate(f.pixels.begin(), f.pixels.end(), std::int64_t{0});
  // p < sum / n - margin  <=>  (p + margin) * n < sum
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    out.bits[i] = (std::int64_t(f.pixels[i]) + margin) * n < sum ? 1 : 0;
  }
  return out;
}

void check_distortion(double k1) {
  if (!std::isfinite(k1) || k1 <= -1.0 / 3.0) {
    throw std::invalid_argument("distortion k1 makes the radial map non-monotone");
  }
}

Frame undistort(const Frame& f, double k1) {
  check_distortion(k1);
  if (k1 == 0.0 || f.pixels.empty()) return f;
  const auto sum = std::accumulate(f.pixels.begin(), f.pixels.end(), std::uint64_t{0});
  const auto mean = static_cast<std::uint8_t>((sum + f.pixels.size() / 2) / f.pixels.size());
  return remap(f, f.pixels, &Frame::pixels, k1, mean);
}

BinaryFrame undistort(const BinaryFrame& f, double k1) {
  check_distortion(k1);
  if (k1 == 0.0) return f;
  return remap(f, f.bits, &BinaryFrame::bits, k1, std::uint8_t{0});
}

std::optional<LineReading> line_centroid(const BinaryFrame& b, RowRange roi, const LineParams& params) {
  roi.begin = std::max(roi.begin, 0);
  roi.end = std::min(roi.end, b.height);
  std::int64_t count = 0;
  std::int64_t col_sum = 0;
  for (int y = roi.begin; y < roi.end; ++y) {
    for (int x = 0; x < b.width; ++x) {
      if (b.at(x, y)) {
        ++count;
        col_sum += x;
      }
    }
  }
  if (count == 0 || count < params.min_count) return std::nullopt;
  const double rows = std::max(1, roi.end - roi.begin);
  const double expected = rows * params.expected_width_px;
  return LineReading{double(col_sum) / double(count), std::clamp(double(count) / expected, 0.0, 1.0)};
}

std::optional<LineReading> track_guide_line(const BinaryFrame& b, RowRange roi, double prev_x,
                                            const LineParams& params) {
  roi.begin = std::max(roi.begin, 0);
  roi.end = std::min(roi.end, b.height);
  if (roi.end <= roi.begin) return std::nullopt;
  const int w = b.width;
  const int rows = roi.end - roi.begin;
  // Anchor on the lowest ROI row with any ink; after undistortion the very
  // bottom rows can be empty fill.
  int anchor = -1;
  for (int y = rows - 1; y >= 0 && anchor < 0; --y) {
    for (int x = 0; x < w; ++x) {
      if (b.at(x, roi.begin + y)) {
        anchor = y;
        break;
      }
    }
  }
  if (anchor < 0) return std::nullopt;
  std::vector<int> label(std::size_t(w) * rows, 0);
  std::vector<std::pair<int, int>> stack;
  int next_label = 0;
  int best_label = 0;
  double best_dist = 0.0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!b.at(x, roi.begin + y) || label[std::size_t(y) * w + x]) continue;
      const int id = ++next_label;
      std::int64_t bottom_sum = 0;
      int bottom_count = 0;
      stack.assign(1, {x, y});
      label[std::size_t(y) * w + x] = id;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        if (cy == anchor) {
          bottom_sum += cx;
          ++bottom_count;
        }
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= rows) continue;
            int& l = label[std::size_t(ny) * w + nx];
            if (l || !b.at(nx, roi.begin + ny)) continue;
            l = id;
            stack.push_back({nx, ny});
          }
        }
      }
      if (bottom_count == 0) continue;
      const double dist = std::abs(double(bottom_sum) / bottom_count - prev_x);
      if (best_label == 0 || dist < best_dist) {
        best_label = id;
        best_dist = dist;
      }
    }
  }
  if (best_label == 0) return std::nullopt;

  BinaryFrame kept(b.width, b.height);
  const double wide = params.wide_factor * params.expected_width_px;
  for (int y = 0; y < rows; ++y) {
    int n = 0;
    for (int x = 0; x < w; ++x) n += label[std::size_t(y) * w + x] == best_label;
    if (n == 0 || n > wide) continue;
    for (int x = 0; x < w; ++x) {
      if (label[std::size_t(y) * w + x] == best_label) kept.at(x, roi.begin + y) = 1;
    }
  }
  return line_centroid(kept, roi, params);
}

std::vector<Blob> extract_contours(const BinaryFrame& b, int min_area) {
  const int w = b.width;
  const int h = b.height;
  std::vector<int> label(std::size_t(w) * h, 0);
  std::vector<std::pair<int, int>> pixels;
  std::vector<Blob> blobs;
  int next_label = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!b.at(x, y) || label[std::size_t(y) * w + x]) continue;
      const int id = ++next_label;
      pixels.assign(1, {x, y});
      label[std::size_t(y) * w + x] = id;
      for (std::size_t head = 0; head < pixels.size(); ++head) {
        const auto [cx, cy] = pixels[head];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            int& l = label[std::size_t(ny) * w + nx];
            if (l || !b.at(nx, ny)) continue;
            l = id;
            pixels.push_back({nx, ny});
          }
        }
      }
      if (static_cast<int>(pixels.size()) < min_area) continue;
      int x0 = w, y0 = h, x1 = -1, y1 = -1;
      double sx = 0.0, sy = 0.0;
      for (auto [px, py] : pixels) {
        x0 = std::min(x0, px);
        y0 = std::min(y0, py);
        x1 = std::max(x1, px);
        y1 = std::max(y1, py);
        sx += px;
        sy += py;
      }
      Blob blob;
      blob.x = x0;
      blob.y = y0;
      blob.width = x1 - x0 + 1;
      blob.height = y1 - y0 + 1;
      blob.area = static_cast<int>(pixels.size());
      blob.cx = sx / blob.area;
      blob.cy = sy / blob.area;
      blob.touches_border = x0 == 0 || y0 == 0 || x1 == w - 1 || y1 == h - 1;
      blob.mask.assign(std::size_t(blob.width) * blob.height, 0);
      for (auto [px, py] : pixels) blob.mask[std::size_t(py - y0) * blob.width + (px - x0)] = 1;
      blobs.push_back(std::move(blob));
    }
  }
  std::stable_sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) { return a.x < b.x; });
  return blobs;
}

Blob blob_from_grid(const GlyphGrid& grid) {
  Blob blob;
  blob.width = kGlyphSize;
  blob.height = kGlyphSize;
  blob.mask.assign(grid.begin(), grid.end());
  blob.area = static_cast<int>(std::count(grid.begin(), grid.end(), 1));
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < kGlyphSize; ++y)
    for (int x = 0; x < kGlyphSize; ++x)
      if (grid[std::size_t(y) * kGlyphSize + x]) {
        sx += x;
        sy += y;
      }
  if (blob.area > 0) {
    blob.cx = sx / blob.area;
    blob.cy = sy / blob.area;
  }
  return blob;
}

TemplateSet default_templates() {
  TemplateSet set;
  for (int d = 1; d <= 8; ++d) set.push_back({d, normalize_blob(blob_from_grid(glyph(d)))});
  return set;
}

GlyphGrid normalize_blob(const Blob& blob) {
  GlyphGrid out{};
  if (blob.width <= 0 || blob.height <= 0) return out;
  const double sx = double(blob.width) / kGlyphSize;
  const double sy = double(blob.height) / kGlyphSize;
  for (int r = 0; r < kGlyphSize; ++r) {
    const double y0 = r * sy;
    const double y1 = (r + 1) * sy;
    for (int c = 0; c < kGlyphSize; ++c) {
      const double x0 = c * sx;
      const double x1 = (c + 1) * sx;
      double ink = 0.0;
      for (int y = static_cast<int>(y0); y < blob.height && y < y1; ++y) {
        const double wy = std::min(y1, y + 1.0) - std::max(y0, double(y));
        if (wy <= 0.0) continue;
        for (int x = static_cast<int>(x0); x < blob.width && x < x1; ++x) {
          const double wx = std::min(x1, x + 1.0) - std::max(x0, double(x));
          if (wx > 0.0 && blob.at(x, y)) ink += wx * wy;
        }
      }
      out[std::size_t(r) * kGlyphSize + c] = ink >= 0.5 * sx * sy ? 1 : 0;
    }
  }
  return out;
}

std::vector<double> template_scores(const Blob& blob, const TemplateSet& templates) {
  const GlyphGrid g = normalize_blob(blob);
  std::vector<double> scores;
  scores.reserve(templates.size());
  for (const DigitTemplate& t : templates) {
    int diff = 0;
    for (std::size_t i = 0; i < g.size(); ++i) diff += g[i] != t.grid[i];
    scores.push_back(1.0 - double(diff) / double(g.size()));
  }
  return scores;
}

std::optional<DigitMatch> match_digit(const Blob& blob, const TemplateSet& templates, const MatchParams& params) {
  if (templates.empty()) return std::nullopt;
  const std::vector<double> scores = template_scores(blob, templates);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  double runner = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (i != best) runner = std::max(runner, scores[i]);
  if (scores[best] < params.accept_threshold || scores[best] - runner < params.margin) return std::nullopt;
  return DigitMatch{templates[best].digit, scores[best], runner};
}

BinaryFrame preprocess(const Frame& f, const CameraModel& cam, int margin) {
  return undistort(adaptive_binarize(f, margin), cam.distortion_k1);
}

std::optional<Vec2> image_to_floor(const CameraModel& cam, double u, double v) {
  const double f = cam.focal_px();
  const double xc = (u + 0.5 - 0.5 * cam.width) / f;
  const double yc = (v + 0.5 - 0.5 * cam.height) / f;
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  const double dz = -sp - yc * cp;
  if (dz >= -1e-9) return std::nullopt;
  const double t = cam.mount_height / -dz;
  return Vec2{cam.mount_forward + t * (cp - yc * sp), -t * xc};
}

std::optional<Vec2> floor_to_image(const CameraModel& cam, Vec2 p) {
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  const double dx = p.x - cam.mount_forward;
  const double dz = -cam.mount_height;
  const double depth = dx * cp - dz * sp;  // along the optical axis
  if (depth <= 1e-9) return std::nullopt;
  const double f = cam.focal_px();
  const double xc = -p.y / depth;
  const double yc = (-dx * sp - dz * cp) / depth;
  return Vec2{xc * f + 0.5 * cam.width - 0.5, yc * f + 0.5 * cam.height - 0.5};
}

Blob rectify_blob(const Blob& blob, const CameraModel& cam, int size) {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (int my = 0; my < blob.height; ++my) {
    for (int mx = 0; mx < blob.width; ++mx) {
      if (!blob.at(mx, my)) continue;
      for (double cu : {-0.5, 0.5}) {
        for (double cv : {-0.5, 0.5}) {
          const auto p = image_to_floor(cam, blob.x + mx + cu, blob.y + my + cv);
          if (!p) return blob;
          x_lo = std::min(x_lo, p->x);
          x_hi = std::max(x_hi, p->x);
          y_lo = std::min(y_lo, p->y);
          y_hi = std::max(y_hi, p->y);
        }
      }
    }
  }
  if (!(x_hi > x_lo && y_hi > y_lo)) return blob;

  Blob out;
  out.width = size;
  out.height = size;
  out.mask.assign(std::size_t(size) * size, 0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const Vec2 floor{x_hi - (i + 0.5) / size * (x_hi - x_lo), y_hi - (j + 0.5) / size * (y_hi - y_lo)};
      const auto px = floor_to_image(cam, floor);
      if (!px) continue;
      const int mx = static_cast<int>(std::lround(px->x)) - blob.x;
      const int my = static_cast<int>(std::lround(px->y)) - blob.y;
      if (mx < 0 || my < 0 || mx >= blob.width || my >= blob.height) continue;
      out.mask[std::size_t(i) * size + j] = blob.at(mx, my);
    }
  }
  // Crop to the ink so the matcher's bounding-box resampling sees the glyph edge to edge.
  int c0 = size, c1 = -1, r0 = size, r1 = -1;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      if (!out.mask[std::size_t(i) * size + j]) continue;
      r0 = std::min(r0, i);
      r1 = std::max(r1, i);
      c0 = std::min(c0, j);
      c1 = std::max(c1, j);
    }
  }
  if (r1 < 0) return blob;
  Blob cropped;
  cropped.x = blob.x;
  cropped.y = blob.y;
  cropped.width = c1 - c0 + 1;
  cropped.height = r1 - r0 + 1;
  cropped.mask.assign(std::size_t(cropped.width) * cropped.height, 0);
  for (int i = r0; i <= r1; ++i) {
    for (int j = c0; j <= c1; ++j) {
      const std::uint8_t bit = out.mask[std::size_t(i) * size + j];
      cropped.mask[std::size_t(i - r0) * cropped.width + (j - c0)] = bit;
      cropped.area += bit;
    }
  }
  cropped.cx = blob.cx;
  cropped.cy = blob.cy;
  cropped.touches_border = blob.touches_border;
  return cropped;
}

std::vector<DigitDetection> detect_in_binary(const BinaryFrame& b, const CameraModel& cam,
                                             const TemplateSet& templates, const DetectParams& params) {
  std::vector<DigitDetection> out;
  const double focal = cam.focal_px();
  for (const Blob& blob : extract_contours(b, params.min_area)) {
    if (blob.touches_border || blob.height < params.min_height) continue;
    const auto m = match_digit(params.rectify ? rectify_blob(blob, cam) : blob, templates, params.match);
    if (!m) continue;
    out.push_back({m->digit, blob.cx, blob.cy, params.glyph_height * focal / blob.height, m->score});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DigitDetection& a, const DigitDetection& b) { return a.image_x < b.image_x; });
  return out;
}

std::vector<DigitDetection> detect_placards(const Frame& f, const CameraModel& cam, const TemplateSet& templates,
                                            const DetectParams& params) {
  return detect_in_binary(preprocess(f, cam, params.binarize_margin), cam, templates, params);
}

void write_pgm(std::ostream& out, const Frame& f) {
  out << "P2\n" << f.width << ' ' << f.height << "\n255\n";
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) out << int(f.at(x, y)) << (x + 1 < f.width ? ' ' : '\n');
  }
}

}  // namespace wardsim
