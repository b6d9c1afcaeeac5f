// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wardsim/sim.hpp"

namespace wardsim {

/// A runnable scenario: map reference, simulation config and optional
/// expected outcome per cart.
///
/// File format, one `key = value` per line, `#` starts a comment:
///
///   map = builtin:default        # or a path relative to the scenario file
///   seed = 7
///   cart1.ward = 2
///   cart1.role = leader          # solo | leader | follower
///   cart2.pause_point = 0 1.5
///   link.drop = 0.2
///   expect = DeliveredAndReturned
struct Scenario {
  std::string name;
  std::string map = "builtin:default";
  std::filesystem::path base_dir;
  SimConfig config;
  std::vector<OutcomeKind> expected;  // empty, one for all carts, or one per cart

  /// True when no expectation is set or every cart matches it.
  bool matches(const TraceReport& report) const;
};

/// Throws ParseError with the offending line on syntax errors or unknown keys
/// and ValidationError on bad values.
Scenario parse_scenario(std::string_view text, std::string name = "scenario",
                        const std::filesystem::path& base_dir = {});

/// Throws std::runtime_error("scenario not found: ...") when the file is missing.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Loads the referenced map (built-in or file).
TrackMap resolve_map(const Scenario& scenario);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace wardsim
