// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/scenario.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wardsim/errors.hpp"

namespace wardsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, int line) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ParseError(line, fmt::format("not a number: '{}'", v));
  return out;
}

long long to_int(std::string_view v, int line) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ParseError(line, fmt::format("not an integer: '{}'", v));
  return out;
}

bool to_bool(std::string_view v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ParseError(line, fmt::format("not a boolean: '{}'", v));
}

Role to_role(std::string_view v, int line) {
  if (v == "solo") return Role::Solo;
  if (v == "leader") return Role::Leader;
  if (v == "follower") return Role::Follower;
  throw ParseError(line, fmt::format("unknown role '{}'", v));
}

std::vector<std::string_view> split(std::string_view v, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = sep == ' ' ? v.find_first_of(" \t") : v.find(sep);
    const std::string_view head = trim(v.substr(0, pos));
    if (!head.empty() || sep != ' ') out.push_back(head);
    if (pos == std::string_view::npos) break;
    v.remove_prefix(pos + 1);
  }
  return out;
}

using Setter = std::function<void(Scenario&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& global_keys() {
  static const std::map<std::string, Setter, std::less<>> keys = {
      {"map", [](Scenario& s, std::string_view v, int) { s.map = std::string(v); }},
      {"name", [](Scenario& s, std::string_view v, int) { s.name = std::string(v); }},
      {"seed", [](Scenario& s, std::string_view v, int l) {
         s.config.seed = static_cast<std::uint64_t>(to_int(v, l));
       }},
      {"dt", [](Scenario& s, std::string_view v, int l) { s.config.dt = to_double(v, l); }},
      {"max_ticks", [](Scenario& s, std::string_view v, int l) { s.config.max_ticks = to_int(v, l); }},
      {"carts", [](Scenario& s, std::string_view v, int l) {
         const long long n = to_int(v, l);
         if (n < 1 || n > 2) throw ParseError(l, "carts must be 1 or 2");
         s.config.carts.resize(static_cast<std::size_t>(n));
       }},
      {"noise.sigma", [](Scenario& s, std::string_view v, int l) { s.config.noise.sigma = to_double(v, l); }},
      {"noise.brightness",
       [](Scenario& s, std::string_view v, int l) { s.config.noise.brightness = to_double(v, l); }},
      {"noise.k1", [](Scenario& s, std::string_view v, int l) {
         s.config.noise.k1 = to_double(v, l);
         s.config.camera.distortion_k1 = s.config.noise.k1;
       }},
      {"link.drop", [](Scenario& s, std::string_view v, int l) {
         s.config.link.drop_probability = to_double(v, l);
       }},
      {"link.latency", [](Scenario& s, std::string_view v, int l) {
         s.config.link.latency_ticks = static_cast<int>(to_int(v, l));
       }},
      {"link.retry", [](Scenario& s, std::string_view v, int l) {
         s.config.tuning.retry_interval = static_cast<int>(to_int(v, l));
       }},
      {"pid.kp", [](Scenario& s, std::string_view v, int l) { s.config.gains.kp = to_double(v, l); }},
      {"pid.ki", [](Scenario& s, std::string_view v, int l) { s.config.gains.ki = to_double(v, l); }},
      {"pid.kd", [](Scenario& s, std::string_view v, int l) { s.config.gains.kd = to_double(v, l); }},
      {"pid.integral_limit",
       [](Scenario& s, std::string_view v, int l) { s.config.gains.integral_limit = to_double(v, l); }},
      {"pid.output_limit",
       [](Scenario& s, std::string_view v, int l) { s.config.gains.output_limit = to_double(v, l); }},
      {"base_duty", [](Scenario& s, std::string_view v, int l) { s.config.base_duty = to_double(v, l); }},
      {"turn_duty", [](Scenario& s, std::string_view v, int l) { s.config.turn_duty = to_double(v, l); }},
      {"expect", [](Scenario& s, std::string_view v, int l) {
         s.expected.clear();
         for (std::string_view item : split(v, ',')) {
           auto k = parse_outcome(item);
           if (!k) throw ParseError(l, fmt::format("unknown outcome '{}'", item));
           s.expected.push_back(*k);
         }
       }},
  };
  return keys;
}

void set_cart_key(CartSetup& c, std::string_view field, std::string_view v, int l) {
  if (field == "ward") {
    c.ward = static_cast<int>(to_int(v, l));
  } else if (field == "role") {
    c.role = to_role(v, l);
  } else if (field == "load") {
    c.load = to_bool(v, l);
  } else if (field == "load_at") {
    c.load_at = to_double(v, l);
  } else if (field == "unload_after") {
    c.unload_after = to_double(v, l);
  } else if (field == "payload") {
    c.payload_grams = to_double(v, l);
  } else if (field == "pause_point") {
    const auto xy = split(v, ' ');
    if (xy.size() != 2) throw ParseError(l, "pause_point needs two coordinates");
    c.pause_point = Vec2{to_double(xy[0], l), to_double(xy[1], l)};
  } else {
    throw ParseError(l, fmt::format("unknown cart key '{}'", field));
  }
}

}  // namespace

bool Scenario::matches(const TraceReport& report) const {
  if (expected.empty()) return true;
  if (expected.size() != 1 && expected.size() != report.outcomes.size()) return false;
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const OutcomeKind want = expected.size() == 1 ? expected[0] : expected[i];
    if (report.outcomes[i].kind != want) return false;
  }
  return true;
}

Scenario parse_scenario(std::string_view text, std::string name, const std::filesystem::path& base_dir) {
  Scenario s;
  s.name = std::move(name);
  s.base_dir = base_dir;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line_no, "expected 'key = value'");

    if (key.starts_with("cart")) {
      const auto dot = key.find('.');
      if (dot == std::string_view::npos) throw ParseError(line_no, fmt::format("unknown key '{}'", key));
      const long long idx = to_int(key.substr(4, dot - 4), line_no);
      if (idx < 1 || idx > 2) throw ParseError(line_no, "cart index must be 1 or 2");
      if (s.config.carts.size() < static_cast<std::size_t>(idx)) s.config.carts.resize(idx);
      set_cart_key(s.config.carts[idx - 1], key.substr(dot + 1), value, line_no);
      continue;
    }
    const auto& keys = global_keys();
    auto it = keys.find(key);
    if (it == keys.end()) throw ParseError(line_no, fmt::format("unknown key '{}'", key));
    it->second(s, value, line_no);
  }
  s.config.gains.sample_period = s.config.dt;
  s.config.map_name = s.map;
  s.config.validate();
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw std::runtime_error("scenario not found: " + path.string());
  return parse_scenario(read_text_file(path), path.stem().string(), path.parent_path());
}

TrackMap resolve_map(const Scenario& scenario) {
  if (scenario.map == "builtin:default") return default_map();
  std::filesystem::path p = scenario.map;
  if (p.is_relative()) p = scenario.base_dir / p;
  if (!std::filesystem::is_regular_file(p)) throw std::runtime_error("map not found: " + p.string());
  return load_map(read_text_file(p));
}

}  // namespace wardsim
