// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wardsim/vision.hpp"

namespace wardsim {

/// Grid of rendering conditions for the labelled digit corpus. Every
/// combination of the listed values produces one sample.
struct CorpusGrid {
  std::vector<int> digits{1, 2, 3, 4, 5, 6, 7, 8};
  /// Card translations in image pixels, applied to the card center.
  std::vector<int> column_shifts{-2, -1, 0, 1, 2};
  std::vector<int> row_shifts{-2, -1, 0, 1, 2};
  std::vector<double> k1_values{0.0, 0.05, 0.1};
  std::vector<double> brightness_values{-30.0, 0.0, 30.0};
  std::vector<double> sigma_values{0.0, 8.0};
  double card_distance = 0.13;  // m ahead of the camera
  double glyph_height = 0.04;   // m
  std::uint64_t seed = 1;

  std::size_t size() const;
  /// Throws ValidationError for an empty grid or out-of-range digits.
  void validate() const;
};

struct CorpusSample {
  int label = 0;
  int predicted = 0;  // 0 when nothing was recognized
  double score = 0.0;
  double k1 = 0.0;
  double brightness = 0.0;
  double sigma = 0.0;
  int column_shift = 0;
  int row_shift = 0;

  bool correct() const { return label == predicted; }
  bool clean() const { return k1 == 0.0 && brightness == 0.0 && sigma == 0.0; }
};

struct CorpusReport {
  std::vector<CorpusSample> samples;

  double accuracy() const;
  /// Accuracy over the undistorted, noise-free samples at nominal brightness (1.0 if there are none).
  double clean_accuracy() const;
};

/// Renders every grid cell through the camera model and classifies it with
/// the placard detector, which is told the true distortion coefficient.
CorpusReport run_vision_corpus(const CorpusGrid& grid, const CameraModel& camera = {});

/// `label,predicted,score,k1,brightness,noise` per sample, then an accuracy line.
void write_corpus(std::ostream& out, const CorpusReport& report);

}  // namespace wardsim
