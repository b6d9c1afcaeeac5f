// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/corpus.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>

#include "wardsim/errors.hpp"
#include "wardsim/random.hpp"

namespace wardsim {

std::size_t CorpusGrid::size() const {
  return digits.size() * column_shifts.size() * row_shifts.size() * k1_values.size() *
         brightness_values.size() * sigma_values.size();
}

void CorpusGrid::validate() const {
  if (size() == 0) throw ValidationError("corpus grid is empty");
  for (int d : digits) {
    if (d < 1 || d > 8) throw ValidationError(fmt::format("digit {} is out of range 1..8", d));
  }
  for (double s : sigma_values) {
    if (s < 0.0) throw ValidationError("noise sigma must be non-negative");
  }
  if (!(card_distance > 0.0) || !(glyph_height > 0.0)) throw ValidationError("card geometry must be positive");
}

double CorpusReport::accuracy() const {
  if (samples.empty()) return 1.0;
  std::size_t ok = 0;
  for (const CorpusSample& s : samples) ok += s.correct();
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

double CorpusReport::clean_accuracy() const {
  std::size_t n = 0, ok = 0;
  for (const CorpusSample& s : samples) {
    if (!s.clean()) continue;
    ++n;
    ok += s.correct();
  }
  return n == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(n);
}

CorpusReport run_vision_corpus(const CorpusGrid& grid, const CameraModel& camera) {
  grid.validate();
  try {
    camera.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }

  const TrackMap blank;  // no guide line, only the card
  const TemplateSet templates = default_templates();
  const Pose origin{0.0, 0.0, 0.0};
  const double cx = (camera.width - 1) / 2.0;
  const double cy = (camera.height - 1) / 2.0;
  const auto nominal = floor_to_image(camera, {camera.mount_forward + grid.card_distance, 0.0});
  if (!nominal) throw ValidationError("card is not in front of the camera");
  DetectParams detect;
  detect.glyph_height = grid.glyph_height;

  CorpusReport report;
  report.samples.reserve(grid.size());
  std::uint64_t index = 0;
  for (double k1 : grid.k1_values) {
    check_distortion(k1);
    CameraModel cam = camera;
    cam.distortion_k1 = k1;
    const Renderer renderer(cam, k1);
    for (double brightness : grid.brightness_values) {
      for (double sigma : grid.sigma_values) {
        for (int digit : grid.digits) {
          for (int dv : grid.row_shifts) {
            for (int du : grid.column_shifts) {
              const auto at = image_to_floor(camera, nominal->x + du, nominal->y + dv);
              if (!at) throw ValidationError("shifted card is above the horizon");
              const PlacardEntry card{digit, {at->x, at->y, 0.0}, grid.glyph_height};
              const NoiseParams noise{brightness, sigma, k1, derive_seed(grid.seed, index++)};
              const Frame frame = renderer.render(blank, origin, noise, std::span(&card, 1));
              const auto dets = detect_placards(frame, cam, templates, detect);

              CorpusSample s{digit, 0, 0.0, k1, brightness, sigma, du, dv};
              double best = INFINITY;
              for (const DigitDetection& d : dets) {
                const double r = std::hypot(d.image_x - cx, d.image_y - cy);
                if (r < best) {
                  best = r;
                  s.predicted = d.digit;
                  s.score = d.score;
                }
              }
              report.samples.push_back(s);
            }
          }
        }
      }
    }
  }
  return report;
}

void write_corpus(std::ostream& out, const CorpusReport& report) {
  out << "label,predicted,score,k1,brightness,noise\n";
  for (const CorpusSample& s : report.samples) {
    out << fmt::format("{},{},{:.4f},{},{},{}\n", s.label, s.predicted, s.score, s.k1, s.brightness, s.sigma);
  }
  out << fmt::format("# samples={} accuracy={:.4f} clean_accuracy={:.4f}\n", report.samples.size(),
                     report.accuracy(), report.clean_accuracy());
}

}  // namespace wardsim
