// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wardsim/corpus.hpp"
#include "wardsim/errors.hpp"

using namespace wardsim;

TEST_SUITE("scenario") {
  TEST_CASE("keys map onto the configuration") {
    const Scenario s = parse_scenario(R"(
# two carts
seed = 9
dt = 0.01
max_ticks = 1234
noise.sigma = 4
noise.brightness = -30
noise.k1 = 0.05
link.drop = 0.25
link.latency = 3
link.retry = 10
pid.kp = 0.7
cart1.ward = 3
cart1.role = leader
cart2.ward = 4
cart2.role = follower
cart2.pause_point = 0 1.5
cart2.load_at = 1.5
expect = DeliveredAndReturned, Delivered
)");
    const SimConfig& c = s.config;
    CHECK(c.seed == 9);
    CHECK(c.dt == 0.01);
    CHECK(c.gains.sample_period == 0.01);
    CHECK(c.max_ticks == 1234);
    CHECK(c.noise.sigma == 4);
    CHECK(c.noise.brightness == -30);
    CHECK(c.noise.k1 == 0.05);
    CHECK(c.camera.distortion_k1 == 0.05);
    CHECK(c.link.drop_probability == 0.25);
    CHECK(c.link.latency_ticks == 3);
    CHECK(c.tuning.retry_interval == 10);
    CHECK(c.gains.kp == 0.7);
    REQUIRE(c.carts.size() == 2);
    CHECK(c.carts[0].role == Role::Leader);
    CHECK(c.carts[1].ward == 4);
    REQUIRE(c.carts[1].pause_point);
    CHECK(c.carts[1].pause_point->y == 1.5);
    CHECK(c.carts[1].load_at == 1.5);
    CHECK(s.expected == std::vector<OutcomeKind>{OutcomeKind::DeliveredAndReturned, OutcomeKind::Delivered});
  }

  TEST_CASE("syntax errors name the line") {
    auto line_of = [](const char* text) {
      try {
        parse_scenario(text);
      } catch (const ParseError& e) {
        return e.line();
      }
      return -1;
    };
    CHECK(line_of("seed = 1\nbogus = 2\n") == 2);
    CHECK(line_of("\n\nseed = one\n") == 3);
    CHECK(line_of("cart1.colour = red\n") == 1);
    CHECK(line_of("cart3.ward = 1\n") == 1);
    CHECK(line_of("just words\n") == 1);
    CHECK(line_of("expect = Delivered, Lost\n") == 1);
    CHECK(line_of("cart1.role = captain\n") == 1);
  }

  TEST_CASE("bad values fail validation") {
    CHECK_THROWS_AS(parse_scenario("cart1.ward = 9\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("dt = -0.1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("link.drop = 2\n"), ValidationError);
  }

  TEST_CASE("expectations") {
    TraceReport r;
    r.outcomes.resize(2);
    r.outcomes[0].kind = OutcomeKind::DeliveredAndReturned;
    r.outcomes[1].kind = OutcomeKind::Fault;
    Scenario s;
    CHECK(s.matches(r));
    s.expected = {OutcomeKind::DeliveredAndReturned};
    CHECK_FALSE(s.matches(r));
    s.expected = {OutcomeKind::DeliveredAndReturned, OutcomeKind::Fault};
    CHECK(s.matches(r));
  }

  TEST_CASE("files and map references") {
    CHECK_THROWS_WITH_AS(load_scenario_file("/nonexistent/x.scn"), doctest::Contains("scenario not found"),
                         std::runtime_error);

    const auto dir = std::filesystem::temp_directory_path() / "wardsim_scenario_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "tiny.map") << "node P 0 0\nnode A 0 1\npharmacy P\nedge E P A\nward 1 A\n";
    std::ofstream(dir / "tiny.scn") << "map = tiny.map\ncart1.ward = 1\n";
    const Scenario s = load_scenario_file(dir / "tiny.scn");
    CHECK(s.name == "tiny");
    CHECK(resolve_map(s).find_ward(1));

    std::ofstream(dir / "lost.scn") << "map = nowhere.map\n";
    CHECK_THROWS_AS(resolve_map(load_scenario_file(dir / "lost.scn")), std::runtime_error);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("shipped scenarios parse and name their wards") {
    for (int w = 1; w <= 8; ++w) {
      const Scenario s = testing::scenario_file("scenarios/ward" + std::to_string(w) + ".scn");
      CHECK(s.config.carts.size() == 1);
      CHECK(s.config.carts[0].ward == w);
      CHECK(s.expected == std::vector<OutcomeKind>{OutcomeKind::DeliveredAndReturned});
    }
    const Scenario c = testing::scenario_file("scenarios/coordination.scn");
    REQUIRE(c.config.carts.size() == 2);
    CHECK(classify_ward(c.config.carts[0].ward) == Tier::Mid);
  }
}

TEST_SUITE("corpus") {
  TEST_CASE("an empty grid is rejected") {
    CorpusGrid g;
    g.digits.clear();
    CHECK(g.size() == 0);
    CHECK_THROWS_AS(run_vision_corpus(g), ValidationError);
    g = CorpusGrid{};
    g.digits = {9};
    CHECK_THROWS_AS(g.validate(), ValidationError);
  }

  TEST_CASE("the default grid is large enough") { CHECK(CorpusGrid{}.size() >= 1000); }

  TEST_CASE("clean samples are all recognized") {
    CorpusGrid g;
    g.k1_values = {0.0};
    g.brightness_values = {0.0};
    g.sigma_values = {0.0};
    const CorpusReport r = run_vision_corpus(g);
    CHECK(r.samples.size() == g.size());
    CHECK(r.accuracy() == 1.0);
    CHECK(r.clean_accuracy() == 1.0);

    std::ostringstream out;
    write_corpus(out, r);
    const std::string text = out.str();
    CHECK(text.starts_with("label,predicted,score,k1,brightness,noise\n"));
    CHECK(text.find("accuracy=1.0000") != std::string::npos);
  }
}
