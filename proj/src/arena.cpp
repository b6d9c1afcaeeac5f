// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/arena.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wardsim/errors.hpp"

namespace wardsim {

namespace {

// Competition-style layout: straight spine north from the pharmacy, two cross
// junctions (wards 1/2 then 3/4), and a far T junction whose arms end in two
// more T junctions carrying wards 5/6 and 7/8.
constexpr std::string_view kDefaultMap = R"(# default ward-delivery arena
width 0.3
node P 0 0
node J1 0 1
node J2 0 2
node J3 0 3
node J4 -1 3
node J5 1 3
node W1 -0.5 1
node W2 0.5 1
node W3 -0.5 2
node W4 0.5 2
node W5 -1 2.5
node W6 -1 3.5
node W7 1 3.5
node W8 1 2.5
pharmacy P
edge S1 P J1
edge S2 J1 J2
edge S3 J2 J3
edge A4 J3 J4
edge A5 J3 J5
edge E1 J1 W1
edge E2 J1 W2
edge E3 J2 W3
edge E4 J2 W4
edge E5 J4 W5
edge E6 J4 W6
edge E7 J5 W7
edge E8 J5 W8
ward 1 W1
ward 2 W2
ward 3 W3
ward 4 W4
ward 5 W5
ward 6 W6
ward 7 W7
ward 8 W8
# placard <junction> <digit> <x> <y> <heading-rad> <glyph-height>
placard J1 1 -0.05 0.88 1.5707963267948966 0.04
placard J1 2 0.05 0.88 1.5707963267948966 0.04
placard J2 3 -0.05 1.88 1.5707963267948966 0.04
placard J2 4 0.05 1.88 1.5707963267948966 0.04
placard J3 5 -0.066 3.07 1.5707963267948966 0.04
placard J3 6 -0.03 3.07 1.5707963267948966 0.04
placard J3 7 0.03 3.07 1.5707963267948966 0.04
placard J3 8 0.066 3.07 1.5707963267948966 0.04
placard J4 5 -0.88 2.95 3.141592653589793 0.04
placard J4 6 -0.88 3.05 3.141592653589793 0.04
placard J5 7 0.88 3.05 0 0.04
placard J5 8 0.88 2.95 0 0.04
)";

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view tok, int line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

int parse_digit(std::string_view tok, int line) {
  int v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void expect_args(const std::vector<std::string_view>& toks, std::size_t n, int line) {
  if (toks.size() != n) {
    throw ParseError(line, "'" + std::string(toks[0]) + "' expects " + std::to_string(n - 1) +
                               " arguments, got " + std::to_string(toks.size() - 1));
  }
}

Vec2 node_pos(const TrackMap& map, std::string_view id) {
  const Node* n = map.find_node(id);
  if (!n) throw ValidationError("unknown node '" + std::string(id) + "'");
  return n->position;
}

Vec2 polyline_point(const std::vector<Vec2>& line, double offset) {
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const double seg = norm(line[i + 1] - line[i]);
    if (offset <= seg || i + 2 == line.size()) {
      const double t = seg > 0.0 ? std::clamp(offset / seg, 0.0, 1.0) : 0.0;
      return line[i] + t * (line[i + 1] - line[i]);
    }
    offset -= seg;
  }
  return line.empty() ? Vec2{} : line.front();
}

// Derived fields: tiers, placard links, pause points.
void finalize(TrackMap& map) {
  for (Ward& w : map.wards) {
    w.tier = classify_ward(w.id);
    w.placard.reset();
    std::optional<std::size_t> fallback;
    for (std::size_t g = 0; g < map.placards.size(); ++g) {
      const auto& grp = map.placards[g];
      const bool has_digit = std::any_of(grp.entries.begin(), grp.entries.end(),
                                         [&](const PlacardEntry& e) { return e.digit == w.id; });
      if (!has_digit) continue;
      if (!fallback) fallback = g;
      for (const Edge* e : map.incident(grp.junction)) {
        if (e->a == w.node || e->b == w.node) w.placard = g;
      }
    }
    if (!w.placard) w.placard = fallback;
  }
  map.pause_points.clear();
  for (const Edge& e : map.edges) {
    map.pause_points.push_back({polyline_point(e.centerline, 0.5 * e.length()), e.id});
  }
}

double turn_angle(Vec2 in, Vec2 out) { return std::atan2(cross(in, out), dot(in, out)); }

JunctionAction classify_turn(Vec2 in, Vec2 out) {
  const double a = turn_angle(in, out);
  if (std::abs(a) < std::numbers::pi / 4.0) return JunctionAction::Straight;
  return a > 0.0 ? JunctionAction::Left : JunctionAction::Right;
}

}  // namespace

double Edge::length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < centerline.size(); ++i) total += norm(centerline[i + 1] - centerline[i]);
  return total;
}

const Node* TrackMap::find_node(std::string_view id) const {
  for (const Node& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const Edge* TrackMap::find_edge(std::string_view id) const {
  for (const Edge& e : edges)
    if (e.id == id) return &e;
  return nullptr;
}

const Ward* TrackMap::find_ward(int id) const {
  for (const Ward& w : wards)
    if (w.id == id) return &w;
  return nullptr;
}

std::vector<const Edge*> TrackMap::incident(std::string_view node) const {
  std::vector<const Edge*> out;
  for (const Edge& e : edges)
    if (e.a == node || e.b == node) out.push_back(&e);
  return out;
}

double TrackMap::distance_to_line(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges) {
    for (std::size_t i = 0; i + 1 < e.centerline.size(); ++i) {
      best = std::min(best, distance_to_segment(p, e.centerline[i], e.centerline[i + 1]));
    }
  }
  return best;
}

Tier classify_ward(int id) {
  if (id < 1 || id > 8) throw std::out_of_range("ward id " + std::to_string(id) + " outside 1..8");
  if (id <= 2) return Tier::Near;
  if (id <= 4) return Tier::Mid;
  return Tier::Far;
}

void validate_map(const TrackMap& map) {
  if (map.nodes.empty()) throw ValidationError("map has no nodes");
  std::set<std::string_view> ids;
  for (const Node& n : map.nodes) {
    if (!ids.insert(n.id).second) throw ValidationError("duplicate node '" + n.id + "'");
  }
  std::set<std::string_view> edge_ids;
  for (const Edge& e : map.edges) {
    if (!edge_ids.insert(e.id).second) throw ValidationError("duplicate edge '" + e.id + "'");
    if (!map.find_node(e.a) || !map.find_node(e.b)) {
      throw ValidationError("edge '" + e.id + "' references an unknown node");
    }
    if (e.a == e.b) throw ValidationError("edge '" + e.id + "' is a self loop");
    if (e.centerline.size() < 2 || e.length() <= 0.0) {
      throw ValidationError("edge '" + e.id + "' has zero length");
    }
  }
  if (!(map.corridor_width > 0.0)) throw ValidationError("corridor width must be positive");
  if (!map.find_node(map.pharmacy)) throw ValidationError("missing pharmacy");

  std::set<int> ward_ids;
  for (const Ward& w : map.wards) {
    if (w.id < 1 || w.id > 8) throw ValidationError("ward id " + std::to_string(w.id) + " outside 1..8");
    if (!ward_ids.insert(w.id).second) throw ValidationError("duplicate ward " + std::to_string(w.id));
    if (!map.find_node(w.node)) throw ValidationError("ward " + std::to_string(w.id) + " on unknown node");
  }

  // Connectivity: breadth-first from the pharmacy must reach every node.
  std::set<std::string_view> seen{map.pharmacy};
  std::deque<std::string_view> frontier{map.pharmacy};
  while (!frontier.empty()) {
    const std::string_view cur = frontier.front();
    frontier.pop_front();
    for (const Edge* e : map.incident(cur)) {
      const std::string_view next = e->a == cur ? e->b : e->a;
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  if (seen.size() != map.nodes.size()) throw ValidationError("graph is not connected");

  const double half_width = 0.5 * map.corridor_width;
  for (const PlacardGroup& g : map.placards) {
    if (!map.find_node(g.junction)) {
      throw ValidationError("placard group on unknown junction '" + g.junction + "'");
    }
    if (g.entries.empty() || g.entries.size() > 4) {
      throw ValidationError("placard group at '" + g.junction + "' must hold 1..4 entries");
    }
    for (const PlacardEntry& e : g.entries) {
      if (e.digit < 1 || e.digit > 8) throw ValidationError("placard digit outside 1..8");
      if (!(e.glyph_height > 0.0)) throw ValidationError("placard glyph height must be positive");
      if (map.distance_to_line(e.pose.position()) > half_width) {
        throw ValidationError("placard " + std::to_string(e.digit) + " at '" + g.junction +
                              "' lies outside the corridor");
      }
    }
  }
}

TrackMap load_map(std::string_view text) {
  TrackMap map;
  int pharmacy_records = 0;
  bool any_record = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    any_record = true;
    const std::string_view kind = toks[0];
    if (kind == "node") {
      expect_args(toks, 4, line_no);
      map.nodes.push_back({std::string(toks[1]), {parse_number(toks[2], line_no), parse_number(toks[3], line_no)}});
    } else if (kind == "edge") {
      expect_args(toks, 4, line_no);
      Edge e{std::string(toks[1]), std::string(toks[2]), std::string(toks[3]), {}};
      const Node* a = map.find_node(e.a);
      const Node* b = map.find_node(e.b);
      if (!a || !b) throw ParseError(line_no, "edge '" + e.id + "' references an undeclared node");
      e.centerline = {a->position, b->position};
      map.edges.push_back(std::move(e));
    } else if (kind == "ward") {
      if (toks.size() < 3) throw ParseError(line_no, "'ward' expects <digit> <node> [<digit> ...]");
      const std::string node(toks[2]);
      map.wards.push_back({parse_digit(toks[1], line_no), node, Tier::Near, std::nullopt});
      for (std::size_t i = 3; i < toks.size(); ++i) {
        map.wards.push_back({parse_digit(toks[i], line_no), node, Tier::Near, std::nullopt});
      }
    } else if (kind == "pharmacy") {
      expect_args(toks, 2, line_no);
      map.pharmacy = std::string(toks[1]);
      ++pharmacy_records;
    } else if (kind == "width") {
      expect_args(toks, 2, line_no);
      map.corridor_width = parse_number(toks[1], line_no);
    } else if (kind == "placard") {
      expect_args(toks, 7, line_no);
      const std::string junction(toks[1]);
      PlacardEntry entry{parse_digit(toks[2], line_no),
                         {parse_number(toks[3], line_no), parse_number(toks[4], line_no),
                          parse_number(toks[5], line_no)},
                         parse_number(toks[6], line_no)};
      auto it = std::find_if(map.placards.begin(), map.placards.end(),
                             [&](const PlacardGroup& g) { return g.junction == junction; });
      if (it == map.placards.end()) {
        map.placards.push_back({junction, {entry}});
      } else {
        it->entries.push_back(entry);
      }
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(kind) + "'");
    }
  }
  if (!any_record) throw ParseError(0, "empty map");
  if (pharmacy_records == 0) throw ValidationError("missing pharmacy");
  if (pharmacy_records > 1) throw ValidationError("exactly one pharmacy required");
  for (const Ward& w : map.wards) {
    if (w.id < 1 || w.id > 8) throw ValidationError("ward id " + std::to_string(w.id) + " outside 1..8");
  }
  finalize(map);
  validate_map(map);
  return map;
}

std::string serialize_map(const TrackMap& map) {
  std::ostringstream out;
  out << "width " << format_number(map.corridor_width) << '\n';
  for (const Node& n : map.nodes) {
    out << "node " << n.id << ' ' << format_number(n.position.x) << ' ' << format_number(n.position.y) << '\n';
  }
  out << "pharmacy " << map.pharmacy << '\n';
  for (const Edge& e : map.edges) out << "edge " << e.id << ' ' << e.a << ' ' << e.b << '\n';
  for (const Ward& w : map.wards) out << "ward " << w.id << ' ' << w.node << '\n';
  for (const PlacardGroup& g : map.placards) {
    for (const PlacardEntry& e : g.entries) {
      out << "placard " << g.junction << ' ' << e.digit << ' ' << format_number(e.pose.x) << ' '
          << format_number(e.pose.y) << ' ' << format_number(e.pose.heading) << ' '
          << format_number(e.glyph_height) << '\n';
    }
  }
  return out.str();
}

TrackMap default_map() { return load_map(kDefaultMap); }

JunctionAction mirror(JunctionAction a) {
  switch (a) {
    case JunctionAction::Left: return JunctionAction::Right;
    case JunctionAction::Right: return JunctionAction::Left;
    default: return a;
  }
}

RoutePlan route_between(const TrackMap& map, std::string_view from, std::string_view to) {
  if (!map.find_node(from) || !map.find_node(to)) throw ValidationError("route endpoint is not a map node");
  if (from == to) return {RouteStep{"", std::string(from), std::string(to), 0.0, JunctionAction::Stop}};

  // Dijkstra over edge lengths; ties broken by node id for determinism.
  std::map<std::string_view, double> dist;
  std::map<std::string_view, const Edge*> via;
  using Item = std::pair<double, std::string_view>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[from] = 0.0;
  open.push({0.0, from});
  while (!open.empty()) {
    auto [d, cur] = open.top();
    open.pop();
    if (d > dist[cur]) continue;
    if (cur == to) break;
    for (const Edge* e : map.incident(cur)) {
      const std::string_view next = e->a == cur ? std::string_view(e->b) : std::string_view(e->a);
      const double nd = d + e->length();
      auto it = dist.find(next);
      if (it == dist.end() || nd < it->second) {
        dist[next] = nd;
        via[next] = e;
        open.push({nd, next});
      }
    }
  }
  if (!via.count(to)) {
    throw ValidationError("node '" + std::string(to) + "' is unreachable from '" + std::string(from) + "'");
  }

  RoutePlan plan;
  for (std::string_view cur = to; cur != from;) {
    const Edge* e = via.at(cur);
    const std::string_view prev = e->a == cur ? std::string_view(e->b) : std::string_view(e->a);
    plan.push_back({e->id, std::string(prev), std::string(cur), e->length(), JunctionAction::Stop});
    cur = prev;
  }
  std::reverse(plan.begin(), plan.end());
  for (std::size_t i = 0; i + 1 < plan.size(); ++i) {
    const Vec2 junction = node_pos(map, plan[i].to);
    const Vec2 in = junction - node_pos(map, plan[i].from);
    const Vec2 out = node_pos(map, plan[i + 1].to) - junction;
    plan[i].action = classify_turn(in, out);
  }
  return plan;
}

RoutePlan route_to(const TrackMap& map, int ward) {
  const Ward* w = map.find_ward(ward);
  if (!w) throw ValidationError("ward " + std::to_string(ward) + " is not on the map");
  return route_between(map, map.pharmacy, w->node);
}

RoutePlan reverse_plan(const RoutePlan& plan) {
  RoutePlan out;
  out.reserve(plan.size());
  for (std::size_t k = plan.size(); k-- > 0;) {
    const RouteStep& s = plan[k];
    RouteStep r{s.edge, s.to, s.from, s.length, JunctionAction::Stop};
    if (k > 0) r.action = mirror(plan[k - 1].action);
    out.push_back(std::move(r));
  }
  return out;
}

double plan_length(const RoutePlan& plan) {
  double total = 0.0;
  for (const RouteStep& s : plan) total += s.length;
  return total;
}

Vec2 point_along(const TrackMap& map, const RouteStep& step, double offset) {
  const Vec2 a = node_pos(map, step.from);
  const Vec2 b = node_pos(map, step.to);
  const double len = norm(b - a);
  if (len <= 0.0) return a;
  return a + std::clamp(offset / len, 0.0, 1.0) * (b - a);
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Near: return "Near";
    case Tier::Mid: return "Mid";
    case Tier::Far: return "Far";
  }
  return "?";
}

std::string_view to_string(JunctionAction a) {
  switch (a) {
    case JunctionAction::Straight: return "Straight";
    case JunctionAction::Left: return "Left";
    case JunctionAction::Right: return "Right";
    case JunctionAction::Stop: return "Stop";
  }
  return "?";
}

}  // namespace wardsim
