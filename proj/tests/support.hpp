// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include "wardsim/scenario.hpp"
#include "wardsim/sim.hpp"

namespace wardsim::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(WARDSIM_SOURCE_DIR) / rel;
}

inline Scenario scenario_file(const std::string& rel) { return load_scenario_file(source_path(rel)); }

inline TraceReport run(const Scenario& s) { return run_scenario(resolve_map(s), s.config); }

inline std::string trace_text(const TraceReport& r) {
  std::ostringstream out;
  write_trace(out, r);
  return out.str();
}

/// One solo cart to `ward` with every default.
inline SimConfig solo(int ward, std::uint64_t seed = 1) {
  SimConfig c;
  c.seed = seed;
  c.carts = {CartSetup{}};
  c.carts[0].ward = ward;
  return c;
}

/// Leader to ward 3, follower to ward 4, default pause point.
inline SimConfig pair(double drop, std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.link.drop_probability = drop;
  c.carts = {CartSetup{}, CartSetup{}};
  c.carts[0].ward = 3;
  c.carts[0].role = Role::Leader;
  c.carts[1].ward = 4;
  c.carts[1].role = Role::Follower;
  return c;
}

}  // namespace wardsim::testing
