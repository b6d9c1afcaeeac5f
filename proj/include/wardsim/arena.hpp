// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wardsim/geometry.hpp"

namespace wardsim {

using NodeId = std::string;
using EdgeId = std::string;

struct Node {
  NodeId id;
  Vec2 position;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Guide-line segment between two nodes. The centerline is a polyline; maps
/// built from text always produce the straight two-point form.
struct Edge {
  EdgeId id;
  NodeId a;
  NodeId b;
  std::vector<Vec2> centerline;

  double length() const;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Tier { Near, Mid, Far };

/// One digit placard lying on the floor. `pose.heading` is the direction the
/// top of the glyph points to.
struct PlacardEntry {
  int digit = 0;
  Pose pose;
  double glyph_height = 0.04;
  friend bool operator==(const PlacardEntry&, const PlacardEntry&) = default;
};

/// Placards read together when approaching one junction.
struct PlacardGroup {
  NodeId junction;
  std::vector<PlacardEntry> entries;
  friend bool operator==(const PlacardGroup&, const PlacardGroup&) = default;
};

struct Ward {
  int id = 0;
  NodeId node;
  Tier tier = Tier::Near;
  /// Index into TrackMap::placards of the group read at this ward's branch.
  std::optional<std::size_t> placard;
  friend bool operator==(const Ward&, const Ward&) = default;
};

struct PausePoint {
  Vec2 position;
  EdgeId edge;
  friend bool operator==(const PausePoint&, const PausePoint&) = default;
};

/// Glyph width as a fraction of its height, shared by renderer and map checks.
inline constexpr double kGlyphAspect = 0.7;

/// Immutable after construction by load_map() or default_map().
struct TrackMap {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<Ward> wards;
  std::vector<PlacardGroup> placards;
  NodeId pharmacy;
  double corridor_width = 0.30;
  std::vector<PausePoint> pause_points;

  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;
  const Ward* find_ward(int id) const;
  /// Edges incident to `node`.
  std::vector<const Edge*> incident(std::string_view node) const;
  /// Distance from p to the nearest guide-line centerline point.
  double distance_to_line(Vec2 p) const;

  friend bool operator==(const TrackMap&, const TrackMap&) = default;
};

enum class JunctionAction { Straight, Left, Right, Stop };

/// One edge of a route and the action taken at its far end.
struct RouteStep {
  EdgeId edge;  // empty for the zero-length route
  NodeId from;
  NodeId to;
  double length = 0.0;
  JunctionAction action = JunctionAction::Stop;
  friend bool operator==(const RouteStep&, const RouteStep&) = default;
};

using RoutePlan = std::vector<RouteStep>;

/// Parses the line-oriented map format. Throws ParseError (with line number)
/// on malformed records and ValidationError when the map violates an
/// invariant.
TrackMap load_map(std::string_view text);
std::string serialize_map(const TrackMap& map);

/// Checks every TrackMap invariant; throws ValidationError naming the first
/// violation.
void validate_map(const TrackMap& map);

TrackMap default_map();

/// Throws std::out_of_range for ids outside 1..8.
Tier classify_ward(int id);

/// Shortest route (by length) from the pharmacy to `ward`. Throws
/// ValidationError if the ward is unknown or unreachable.
RoutePlan route_to(const TrackMap& map, int ward);
RoutePlan route_between(const TrackMap& map, std::string_view from, std::string_view to);

/// The return route: edges reversed, turns mirrored, ending with Stop.
RoutePlan reverse_plan(const RoutePlan& plan);

double plan_length(const RoutePlan& plan);
JunctionAction mirror(JunctionAction a);

/// Point at `offset` meters along the straight edge walked from `from`.
Vec2 point_along(const TrackMap& map, const RouteStep& step, double offset);

std::string_view to_string(Tier t);
std::string_view to_string(JunctionAction a);

}  // namespace wardsim
