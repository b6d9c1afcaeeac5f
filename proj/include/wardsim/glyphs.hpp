// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace wardsim {

inline constexpr int kGlyphSize = 16;

using GlyphGrid = std::array<std::uint8_t, kGlyphSize * kGlyphSize>;

/// Built-in block font for digits 1..8, row-major, 1 = ink. Every glyph
/// touches all four cell edges, so bounding-box normalization leaves it
/// unchanged. Throws std::out_of_range outside 1..8.
const GlyphGrid& glyph(int digit);

}  // namespace wardsim
