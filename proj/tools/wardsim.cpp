// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

// wardsim: run delivery scenarios, batch suites, the vision corpus and map renders.
//
// Exit codes: 0 success, 1 expectation failure, 2 usage or input error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>

#include "wardsim/corpus.hpp"
#include "wardsim/errors.hpp"
#include "wardsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace wardsim;

namespace {

constexpr int kOk = 0;
constexpr int kExpectationFailed = 1;
constexpr int kInputError = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<std::int64_t> max_ticks;
  std::optional<double> noise;
  std::optional<double> k1;
  std::optional<double> drop;
  std::optional<int> latency;

  void apply(Scenario& s) const {
    SimConfig& c = s.config;
    if (seed) c.seed = *seed;
    if (dt) {
      c.dt = *dt;
      c.gains.sample_period = *dt;
    }
    if (max_ticks) c.max_ticks = *max_ticks;
    if (noise) c.noise.sigma = *noise;
    if (k1) {
      c.noise.k1 = *k1;
      c.camera.distortion_k1 = *k1;
    }
    if (drop) c.link.drop_probability = *drop;
    if (latency) c.link.latency_ticks = *latency;
    c.validate();
  }
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Global random seed");
  cmd->add_option("--dt", o.dt, "Timestep in seconds");
  cmd->add_option("--max-ticks", o.max_ticks, "Tick budget");
  cmd->add_option("--noise", o.noise, "Pixel noise sigma");
  cmd->add_option("--k1", o.k1, "Radial distortion coefficient");
  cmd->add_option("--drop", o.drop, "Link drop probability");
  cmd->add_option("--latency", o.latency, "Link latency in ticks");
}

std::string outcome_text(const CartOutcome& o) {
  std::string s(to_string(o.kind));
  if (!o.reason.empty()) s += "(" + o.reason + ")";
  return s;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
}

int cmd_run(const fs::path& path, const Overrides& o, const std::string& trace, const std::string& svg) {
  Scenario s = load_scenario_file(path);
  o.apply(s);
  const TrackMap map = resolve_map(s);
  const TraceReport r = run_scenario(map, s.config);
  if (!trace.empty()) write_file(trace, [&](std::ostream& out) { write_trace(out, r); });
  if (!svg.empty()) write_file(svg, [&](std::ostream& out) { write_svg(out, map, &r); });

  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    const CartOutcome& c = r.outcomes[i];
    std::cout << fmt::format("cart {}: ward {} target {} {}\n", i + 1, s.config.carts[i].ward, c.target,
                             outcome_text(c));
  }
  std::cout << fmt::format("ticks {} ({:.2f} s), max line deviation {:.4f} m\n", r.completion_ticks,
                           static_cast<double>(r.completion_ticks) * s.config.dt, r.max_line_deviation);
  const bool ok = s.matches(r);
  if (!s.expected.empty()) std::cout << (ok ? "expectation met\n" : "expectation FAILED\n");
  return ok ? kOk : kExpectationFailed;
}

struct SuiteRow {
  std::string name;
  std::string error;
  Scenario scenario;
  TraceReport report;
};

int cmd_suite(const fs::path& dir, const Overrides& o) {
  if (!fs::is_directory(dir)) throw std::runtime_error("scenario directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".scn") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  // Scenarios share nothing mutable, so they run concurrently; output stays in name order.
  std::vector<std::future<SuiteRow>> jobs;
  for (const fs::path& f : files) {
    jobs.push_back(std::async(std::launch::async, [f, &o] {
      SuiteRow row;
      row.name = f.stem().string();
      try {
        row.scenario = load_scenario_file(f);
        o.apply(row.scenario);
        row.report = run_scenario(resolve_map(row.scenario), row.scenario.config);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return row;
    }));
  }

  std::cout << fmt::format("{:<16} {:>4} {:<5} {:<10} {:<10} {:<6}\n", "scenario", "ward", "tier", "recognized",
                           "delivered", "result");
  int failed = 0;
  for (auto& job : jobs) {
    const SuiteRow row = job.get();
    if (!row.error.empty()) {
      ++failed;
      std::cout << fmt::format("{:<16} error: {}\n", row.name, row.error);
      continue;
    }
    const bool pass = row.scenario.matches(row.report);
    failed += !pass;
    for (std::size_t i = 0; i < row.report.outcomes.size(); ++i) {
      const CartOutcome& c = row.report.outcomes[i];
      const int ward = row.scenario.config.carts[i].ward;
      const bool delivered = c.kind == OutcomeKind::DeliveredAndReturned || c.kind == OutcomeKind::Delivered;
      std::cout << fmt::format("{:<16} {:>4} {:<5} {:<10} {:<10} {:<6}\n", i == 0 ? row.name : "", ward,
                               to_string(classify_ward(ward)), c.recognized && c.target == ward ? "yes" : "no",
                               delivered ? "yes" : "no", i == 0 ? (pass ? "pass" : "FAIL") : "");
    }
  }
  std::cout << fmt::format("{}/{} scenarios passed\n", files.size() - failed, files.size());
  return failed == 0 ? kOk : kExpectationFailed;
}

int cmd_corpus(const std::string& out_path, std::optional<double> noise, std::optional<double> k1,
               std::optional<std::uint64_t> seed) {
  CorpusGrid grid;
  if (noise) grid.sigma_values = {*noise};
  if (k1) grid.k1_values = {*k1};
  if (seed) grid.seed = *seed;
  const CorpusReport r = run_vision_corpus(grid);
  if (!out_path.empty()) write_file(out_path, [&](std::ostream& out) { write_corpus(out, r); });
  std::cout << fmt::format("samples {} accuracy {:.4f} clean {:.4f}\n", r.samples.size(), r.accuracy(),
                           r.clean_accuracy());
  return kOk;
}

int cmd_render_map(const std::string& map_ref, const std::string& svg) {
  const TrackMap map = map_ref == "builtin:default" ? default_map() : load_map(read_text_file(map_ref));
  if (svg.empty()) {
    write_svg(std::cout, map);
  } else {
    write_file(svg, [&](std::ostream& out) { write_svg(out, map); });
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ward-delivery cart simulator"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string scenario_path, trace_path, svg_path, suite_dir, corpus_out, map_ref = "builtin:default";

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--trace", trace_path, "Write the CSV trace here");
  run->add_option("--svg", svg_path, "Write an SVG of map and trajectories here");
  add_override_flags(run, overrides);

  auto* suite = app.add_subcommand("suite", "Run every .scn file in a directory");
  suite->add_option("directory", suite_dir, "Scenario directory")->required();
  add_override_flags(suite, overrides);

  std::optional<double> corpus_noise, corpus_k1;
  std::optional<std::uint64_t> corpus_seed;
  auto* corpus = app.add_subcommand("vision-corpus", "Generate and classify the labelled digit corpus");
  corpus->add_option("output", corpus_out, "Per-sample CSV output path");
  corpus->add_option("--noise", corpus_noise, "Use a single pixel noise sigma");
  corpus->add_option("--k1", corpus_k1, "Use a single distortion coefficient");
  corpus->add_option("--seed", corpus_seed, "Noise seed");

  auto* render = app.add_subcommand("render-map", "Draw a map as SVG");
  render->add_option("map", map_ref, "Map file or builtin:default");
  render->add_option("--svg", svg_path, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*run) return cmd_run(scenario_path, overrides, trace_path, svg_path);
    if (*suite) return cmd_suite(suite_dir, overrides);
    if (*corpus) return cmd_corpus(corpus_out, corpus_noise, corpus_k1, corpus_seed);
    if (*render) return cmd_render_map(map_ref, svg_path);
  } catch (const ParseError& e) {
    std::cerr << "wardsim: parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "wardsim: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
