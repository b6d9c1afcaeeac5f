// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wardsim/arena.hpp"
#include "wardsim/geometry.hpp"
#include "wardsim/glyphs.hpp"

namespace wardsim {

/// Pinhole camera looking down at the floor from the cart. Radial distortion
/// uses r_d = r_u (1 + k1 r_u^2) with r normalized by the half image diagonal.
struct CameraModel {
  double mount_height = 0.12;   // m above the floor
  double mount_forward = 0.0;   // m ahead of the axle midpoint
  double pitch = 0.7853981633974483;  // rad below horizontal
  double horizontal_fov = 1.0471975511965976;  // rad
  int width = 160;
  int height = 120;
  double distortion_k1 = 0.0;  // what the pipeline corrects for

  double focal_px() const;
  /// Throws std::invalid_argument on a non-physical camera.
  void validate() const;
};

/// Image-formation disturbances: global brightness offset, per-pixel
/// Gaussian noise and the true lens distortion.
struct NoiseParams {
  double brightness = 0.0;
  double sigma = 0.0;
  double k1 = 0.0;
  std::uint64_t seed = 0;
};

struct SceneStyle {
  int floor = 180;
  int ink = 50;
  double line_width = 0.02;   // m
  double card_margin = 0.25;  // blank border around a glyph, fraction of its size
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0) : width(w), height(h), pixels(std::size_t(w) * h, fill) {}
  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Foreground (line or ink) is 1.
struct BinaryFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryFrame() = default;
  BinaryFrame(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}
  std::uint8_t at(int x, int y) const { return bits[std::size_t(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return bits[std::size_t(y) * width + x]; }
  std::size_t count() const;
  friend bool operator==(const BinaryFrame&, const BinaryFrame&) = default;
};

/// Renders frames for one camera and one true distortion. The per-pixel floor
/// lookup is built once; render() itself is const and thread-safe.
class Renderer {
 public:
  Renderer(const CameraModel& cam, double true_k1, const SceneStyle& style = {});

  /// `cards` are extra placards (e.g. a card held in front of the cart);
  /// they occlude the guide line.
  Frame render(const TrackMap& map, const Pose& pose, const NoiseParams& noise,
               std::span<const PlacardEntry> cards = {}) const;

  /// Floor point (cart frame, x forward, y left) seen by pixel (u, v), if any.
  std::optional<Vec2> floor_point(int u, int v) const;
  const CameraModel& camera() const { return cam_; }

 private:
  CameraModel cam_;
  SceneStyle style_;
  std::vector<Vec2> lut_;
  std::vector<std::uint8_t> hits_floor_;
  double view_radius_ = 0.0;
};

Frame render(const TrackMap& map, const Pose& pose, const CameraModel& cam, const NoiseParams& noise,
             std::span<const PlacardEntry> cards = {});

/// Foreground iff intensity < mean - margin. Evaluated in integers, so adding a
/// constant to every pixel (without clipping) never changes the result.
BinaryFrame adaptive_binarize(const Frame& f, int margin = 30);

/// Throws std::invalid_argument when the radial model is not monotone over the
/// image (k1 <= -1/3).
void check_distortion(double k1);

/// Reverse-maps each output pixel through the radial model with
/// nearest-neighbour sampling. Pixels mapping outside the source take the mean
/// intensity (background for binary frames).
Frame undistort(const Frame& f, double k1);
BinaryFrame undistort(const BinaryFrame& f, double k1);

struct RowRange {
  int begin = 0;  // inclusive
  int end = 0;    // exclusive
};

struct LineReading {
  double x = 0.0;
  double confidence = 0.0;
};

struct LineParams {
  int min_count = 24;
  double expected_width_px = 24.0;
  /// Rows wider than this multiple of the expected width are junction
  /// cross-bars and are ignored by track_guide_line().
  double wide_factor = 2.0;
};

/// Mean foreground column over `roi`; nullopt below min_count pixels.
std::optional<LineReading> line_centroid(const BinaryFrame& b, RowRange roi, const LineParams& params = {});

/// Keeps the component touching the lowest inked ROI row closest to `prev_x`, drops
/// cross-bar rows, then takes line_centroid().
std::optional<LineReading> track_guide_line(const BinaryFrame& b, RowRange roi, double prev_x,
                                            const LineParams& params = {});

struct Blob {
  int x = 0;  // bounding box
  int y = 0;
  int width = 0;
  int height = 0;
  int area = 0;
  double cx = 0.0;  // centroid
  double cy = 0.0;
  bool touches_border = false;
  std::vector<std::uint8_t> mask;  // width * height, row-major

  std::uint8_t at(int mx, int my) const { return mask[std::size_t(my) * width + mx]; }
};

/// 8-connected components with area >= min_area, sorted by left edge.
std::vector<Blob> extract_contours(const BinaryFrame& b, int min_area = 9);

/// Blob of a whole grid (every cell of the given mask, no border flag).
Blob blob_from_grid(const GlyphGrid& grid);

struct DigitTemplate {
  int digit = 0;
  GlyphGrid grid{};
};

using TemplateSet = std::vector<DigitTemplate>;

TemplateSet default_templates();

/// Area-weighted resampling of the blob's bounding box to the template grid.
GlyphGrid normalize_blob(const Blob& blob);

struct MatchParams {
  double accept_threshold = 0.85;
  double margin = 0.05;
};

struct DigitMatch {
  int digit = 0;
  double score = 0.0;
  double runner_up = 0.0;
};

/// Score against every template: 1 - hamming / N^2.
std::vector<double> template_scores(const Blob& blob, const TemplateSet& templates);
std::optional<DigitMatch> match_digit(const Blob& blob, const TemplateSet& templates,
                                      const MatchParams& params = {});

struct DigitDetection {
  int digit = 0;
  double image_x = 0.0;
  double image_y = 0.0;
  double range_z = 0.0;  // m, from blob height
  double score = 0.0;
};

struct DetectParams {
  int binarize_margin = 30;
  int min_area = 9;
  int min_height = 6;
  MatchParams match;
  double glyph_height = 0.04;  // m, for ranging
  /// Undo the ground-plane foreshortening of each blob before matching.
  bool rectify = true;
};

/// Floor point (cart frame) seen at undistorted pixel coordinates (u, v);
/// nullopt at or above the horizon.
std::optional<Vec2> image_to_floor(const CameraModel& cam, double u, double v);
/// Undistorted pixel coordinates of a floor point; nullopt behind the camera.
std::optional<Vec2> floor_to_image(const CameraModel& cam, Vec2 p);

/// Top-down resampling of a blob of floor ink: far edge up, cart-left on
/// the left. Returns the blob unchanged if part of it lies above the horizon.
Blob rectify_blob(const Blob& blob, const CameraModel& cam, int size = 48);

/// Binarize then undistort with the camera's k1.
BinaryFrame preprocess(const Frame& f, const CameraModel& cam, int margin = 30);

std::vector<DigitDetection> detect_placards(const Frame& f, const CameraModel& cam, const TemplateSet& templates,
                                            const DetectParams& params = {});
/// Same, on an already preprocessed frame.
std::vector<DigitDetection> detect_in_binary(const BinaryFrame& b, const CameraModel& cam,
                                             const TemplateSet& templates, const DetectParams& params = {});

/// Plain-text PGM (P2).
void write_pgm(std::ostream& out, const Frame& f);

}  // namespace wardsim
