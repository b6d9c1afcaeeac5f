// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/glyphs.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace wardsim {

namespace {

// Seven-segment-inspired, with a serifed 1, an open-topped 4, a hooked 6 and a
// diagonal 7 so that every pair differs in at least 38 of 256 cells.
constexpr std::string_view kArt[8] = {
    // 1
    ".....######....."
    "...########....."
    ".##########....."
    ".#####.####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    ".......####....."
    "################"
    "################"
    "################",
    // 2
    ".#############.."
    "################"
    "###..........###"
    ".............###"
    ".............###"
    "............####"
    "..........#####."
    "........#####..."
    "......#####....."
    "....#####......."
    "..#####........."
    ".####..........."
    "####............"
    "################"
    "################"
    "################",
    // 3
    "###############."
    "################"
    ".............###"
    ".............###"
    ".............###"
    ".............###"
    ".....###########"
    ".....###########"
    ".............###"
    ".............###"
    ".............###"
    ".............###"
    ".............###"
    "################"
    "################"
    "###############.",
    // 4
    "........####...."
    ".......#####...."
    "......######...."
    ".....###.###...."
    "....###..###...."
    "...###...###...."
    "..###....###...."
    ".###.....###...."
    "###......###...."
    "################"
    "################"
    "################"
    ".........###...."
    ".........###...."
    ".........###...."
    ".........###....",
    // 5
    "################"
    "################"
    "################"
    "###............."
    "###............."
    "###............."
    "###############."
    "################"
    ".............###"
    ".............###"
    ".............###"
    ".............###"
    ".............###"
    "################"
    "################"
    "###############.",
    // 6
    "......#########."
    "....###########."
    "...####........."
    "..###..........."
    ".###............"
    "###............."
    "###############."
    "################"
    "###..........###"
    "###..........###"
    "###..........###"
    "###..........###"
    "###..........###"
    "################"
    "################"
    ".##############.",
    // 7
    "################"
    "################"
    "################"
    "............####"
    "...........####."
    "...........####."
    "..........####.."
    ".........####..."
    ".........####..."
    "........####...."
    ".......####....."
    ".......####....."
    "......####......"
    ".....####......."
    ".....####......."
    "....####........",
    // 8
    ".##############."
    "################"
    "###..........###"
    "###..........###"
    "###..........###"
    "###..........###"
    ".##############."
    ".##############."
    "###..........###"
    "###..........###"
    "###..........###"
    "###..........###"
    "###..........###"
    "################"
    "################"
    ".##############.",
};

std::array<GlyphGrid, 8> build() {
  std::array<GlyphGrid, 8> out{};
  for (int d = 0; d < 8; ++d) {
    for (int i = 0; i < kGlyphSize * kGlyphSize; ++i) out[d][i] = kArt[d][i] == '#' ? 1 : 0;
  }
  return out;
}

}  // namespace

const GlyphGrid& glyph(int digit) {
  static const std::array<GlyphGrid, 8> glyphs = build();
  if (digit < 1 || digit > 8) throw std::out_of_range("no glyph for digit " + std::to_string(digit));
  return glyphs[digit - 1];
}

}  // namespace wardsim
