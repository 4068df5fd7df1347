#include <catch2/catch_amalgamated.hpp>

#include "mco/config.hpp"

using namespace mco;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("an empty document yields the all-defaults scenario", "[config]") {
  Scenario cfg = parse_scenario("{}");
  Scenario def;
  CHECK(cfg.duration_s == def.duration_s);
  CHECK(cfg.seed == def.seed);
  CHECK(cfg.road.density_veh_per_km == def.road.density_veh_per_km);
  CHECK(cfg.spectrum.tx_power_dbm == def.spectrum.tx_power_dbm);
  CHECK(cfg.access.datarate_bps == def.access.datarate_bps);
  CHECK(cfg.facilities.target_cbr == def.facilities.target_cbr);
  REQUIRE(cfg.templates.size() == 1);
  CHECK(cfg.templates[0].fraction == 1.0);
}

TEST_CASE("unknown keys are rejected with their full path", "[config]") {
  CHECK_THROWS_WITH(parse_scenario(R"({"durationn_s": 5})"),
                    ContainsSubstring("durationn_s"));
  CHECK_THROWS_WITH(parse_scenario(R"({"road": {"lenght_m": 100}})"),
                    ContainsSubstring("road.lenght_m"));
  CHECK_THROWS_WITH(
      parse_scenario(R"({"templates": [{"name": "a", "flows": [{"typ": "cam"}]}]})"),
      ContainsSubstring("templates[0].flows[0].typ"));
}

TEST_CASE("validation failures cite the offending key", "[config]") {
  CHECK_THROWS_WITH(parse_scenario(R"({"road": {"density_veh_per_km": -1}})"),
                    ContainsSubstring("density_veh_per_km"));
  CHECK_THROWS_WITH(
      parse_scenario(
          R"({"templates": [{"name": "a", "fraction": 0.5}, {"name": "b", "fraction": 0.4}]})"),
      ContainsSubstring("fractions must sum to 1"));
  CHECK_THROWS_WITH(
      parse_scenario(
          R"({"templates": [{"name": "a", "flows": [{"type": "CAM", "rate_hz": -2}]}]})"),
      ContainsSubstring("rate_hz"));
}

TEST_CASE("bad enum and channel names fail with context", "[config]") {
  CHECK_THROWS_WITH(
      parse_scenario(R"({"templates": [{"name": "a", "flows": [{"type": "CAMX"}]}]})"),
      ContainsSubstring("CAMX"));
  CHECK_THROWS_WITH(
      parse_scenario(
          R"({"templates": [{"name": "a", "flows": [{"type": "CAM", "preferred": "SCH9"}]}]})"),
      ContainsSubstring("SCH9"));
  CHECK_THROWS_WITH(parse_scenario(R"({"templates": [{"name": "a", "release": "R3"}]})"),
                    ContainsSubstring("R3"));
  CHECK_THROWS_WITH(parse_scenario(R"({"duration_s": "ten"})"),
                    ContainsSubstring("duration_s"));
  CHECK_THROWS_WITH(parse_scenario("{nope"), ContainsSubstring("malformed"));
}

TEST_CASE("a scenario survives the emit-parse round trip", "[config]") {
  Scenario cfg;
  cfg.duration_s = 12.5;
  cfg.seed = 42;
  cfg.warmup_s = 1.0;
  cfg.trace = true;
  cfg.road.length_m = 1500.0;
  cfg.road.lanes = 3;
  cfg.spectrum.propagation.shadowing_sigma_db = 2.0;
  cfg.access.legislative_duty = 0.08;
  cfg.facilities.offload_threshold = 0.58;

  TemplateSpec car;
  car.name = "car";
  car.fraction = 0.75;
  car.transceivers = 2;
  car.channel_policy = PolicyKind::balanced;
  car.gatekeeper = GatekeeperMode::legislative;
  car.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0});
  car.flows.push_back(FlowSpec{MsgType::cpm, 7.0, 800, channel::sch0, {channel::sch1}});
  TemplateSpec legacy;
  legacy.name = "legacy";
  legacy.fraction = 0.25;
  legacy.release = Release::r1;
  legacy.offload_enabled = false;
  legacy.silent = true;
  legacy.flows.push_back(FlowSpec{MsgType::cam, 5.0, 400});
  cfg.templates = {car, legacy};

  std::string text = emit_scenario(cfg);
  Scenario back = parse_scenario(text);
  CHECK(emit_scenario(back) == text);

  CHECK(back.seed == 42);
  CHECK(back.templates[0].channel_policy == PolicyKind::balanced);
  CHECK(back.templates[0].flows[1].preferred.has_value());
  CHECK(*back.templates[0].flows[1].preferred == channel::sch0);
  CHECK(back.templates[1].silent);
  CHECK(back.templates[1].release == Release::r1);
}

TEST_CASE("round-tripped scenarios drive identical simulations", "[config]") {
  Scenario cfg;
  cfg.duration_s = 2.0;
  cfg.seed = 9;
  cfg.road.length_m = 300.0;
  cfg.road.density_veh_per_km = 40.0;
  TemplateSpec t;
  t.name = "car";
  t.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0});
  cfg.templates = {t};

  Scenario back = parse_scenario(emit_scenario(cfg));
  CHECK(emit_scenario(back) == emit_scenario(cfg));
}
