// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "wardsim/sim.hpp"

namespace wardsim {

void write_trace(std::ostream& out, const TraceReport& report) {
  for (const auto& [k, v] : report.header) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const CartOutcome& o = report.outcomes[i];
    out << "# outcome." << i + 1 << '=' << to_string(o.kind);
    if (!o.reason.empty()) out << ':' << o.reason;
    out << '\n';
  }
  out << "# completion_ticks=" << report.completion_ticks << '\n';
  out << "tick,cart,x,y,heading,phase,event\n";

  // Events and samples are both produced in (tick, cart) order.
  std::size_t ev = 0;
  for (const PoseSample& s : report.samples) {
    const std::string pose = fmt::format("{},{},{:.6f},{:.6f},{:.6f},{}", s.tick, s.cart, s.pose.x, s.pose.y,
                                         s.pose.heading, to_string(s.phase));
    bool any = false;
    while (ev < report.events.size() &&
           (report.events[ev].tick < s.tick || (report.events[ev].tick == s.tick && report.events[ev].cart <= s.cart))) {
      if (report.events[ev].tick == s.tick && report.events[ev].cart == s.cart) {
        out << pose << ',' << report.events[ev].text << '\n';
        any = true;
      }
      ++ev;
    }
    if (!any) out << pose << ",\n";
  }
}

void write_svg(std::ostream& out, const TrackMap& map, const TraceReport* report) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  for (const Node& n : map.nodes) {
    lo_x = std::min(lo_x, n.position.x);
    hi_x = std::max(hi_x, n.position.x);
    lo_y = std::min(lo_y, n.position.y);
    hi_y = std::max(hi_y, n.position.y);
  }
  const double pad = 0.3;
  const double scale = 200.0;  // px per m
  const double w = (hi_x - lo_x + 2 * pad) * scale;
  const double h = (hi_y - lo_y + 2 * pad) * scale;
  auto px = [&](Vec2 p) { return Vec2{(p.x - lo_x + pad) * scale, (hi_y + pad - p.y) * scale}; };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}">)", w, h) << '\n';
  out << R"(<rect width="100%" height="100%" fill="#f4f4f0"/>)" << '\n';
  for (const Edge& e : map.edges) {
    out << R"(<polyline fill="none" stroke="#222" stroke-width="4" points=")";
    for (const Vec2& p : e.centerline) {
      const Vec2 q = px(p);
      out << fmt::format("{:.1f},{:.1f} ", q.x, q.y);
    }
    out << "\"/>\n";
  }
  for (const Node& n : map.nodes) {
    const Vec2 q = px(n.position);
    const bool home = n.id == map.pharmacy;
    out << fmt::format(R"(<circle cx="{:.1f}" cy="{:.1f}" r="6" fill="{}"/>)", q.x, q.y, home ? "#2a7" : "#555")
        << '\n';
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="12" font-family="sans-serif">{}</text>)", q.x + 8,
                       q.y - 8, n.id)
        << '\n';
  }
  for (const PlacardGroup& g : map.placards) {
    for (const PlacardEntry& e : g.entries) {
      const Vec2 q = px(e.pose.position());
      out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="10" fill="#a22">{}</text>)", q.x - 3, q.y + 3,
                         e.digit)
          << '\n';
    }
  }
  if (report) {
    static constexpr std::string_view kColors[] = {"#1f6fd1", "#d1701f"};
    const int carts = static_cast<int>(report->outcomes.size());
    for (int c = 1; c <= carts; ++c) {
      out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points=")", kColors[(c - 1) % 2]);
      for (const PoseSample& s : report->samples) {
        if (s.cart != c) continue;
        const Vec2 q = px(s.pose.position());
        out << fmt::format("{:.1f},{:.1f} ", q.x, q.y);
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace wardsim
