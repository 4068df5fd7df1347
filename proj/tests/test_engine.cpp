#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mco/engine.hpp"

using namespace mco;

namespace {

Scenario small_scenario() {
  Scenario cfg;
  cfg.duration_s = 5.0;
  cfg.seed = 1;
  cfg.road.length_m = 200.0;
  cfg.road.lanes = 2;
  cfg.road.density_veh_per_km = 50.0;
  TemplateSpec t;
  t.name = "car";
  t.fraction = 1.0;
  t.flows.push_back(FlowSpec{MsgType::cam, 10.0, 400});
  cfg.templates = {t};
  return cfg;
}

// Station counts are Poisson draws, so tests that need an exact population
// probe seeds until the draw lands on it.
std::uint64_t seed_with_count(Scenario cfg, int want, std::uint64_t from = 1) {
  for (std::uint64_t s = from; s < from + 200; ++s) {
    cfg.seed = s;
    CounterRng rng(stream_key(s, Stream::station_count));
    if (rng.poisson(cfg.expected_station_count()) == want) return s;
  }
  FAIL("no seed in range yields the wanted station count");
  return 0;
}

}  // namespace

TEST_CASE("prr_range follows the first-crossing rule", "[metrics]") {
  Metrics m;
  int cam = static_cast<int>(MsgType::cam);

  SECTION("uniform success out to 500 m ends at the last midpoint") {
    for (int b = 0; b < 50; ++b) m.prr[cam][b] = {100, 100};
    CHECK(prr_range(m, MsgType::cam, 0.9) == Catch::Approx(495.0));
  }
  SECTION("uniform failure yields zero") {
    for (int b = 0; b < 50; ++b) m.prr[cam][b] = {100, 10};
    CHECK(prr_range(m, MsgType::cam, 0.9) == 0.0);
  }
  SECTION("first crossing wins despite later recovery") {
    m.prr[cam][0] = {100, 100};
    m.prr[cam][1] = {100, 95};
    m.prr[cam][2] = {100, 85};
    m.prr[cam][3] = {100, 95};
    CHECK(prr_range(m, MsgType::cam, 0.9) == Catch::Approx(15.0));
  }
  SECTION("empty bins neither break nor extend the chain") {
    m.prr[cam][0] = {100, 100};
    m.prr[cam][1] = {100, 100};
    m.prr[cam][3] = {100, 100};
    CHECK(prr_range(m, MsgType::cam, 0.9) == Catch::Approx(35.0));
  }
  SECTION("target must be a proper ratio") {
    CHECK_THROWS_AS(prr_range(m, MsgType::cam, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(prr_range(m, MsgType::cam, 1.0), std::invalid_argument);
  }
}

TEST_CASE("a zero duration run produces an empty, valid result", "[engine]") {
  Scenario cfg = small_scenario();
  cfg.duration_s = 0.0;
  Metrics m = run_scenario(cfg);
  CHECK(m.duration_s == 0.0);
  CHECK(m.flows.empty());
  CHECK(m.received == 0);
  CHECK(m.decoded == 0);
  for (int c = 0; c < kChannelCount; ++c) CHECK(m.cbr[c].empty());
  CHECK_FALSE(m.fcl_log.empty());
}

TEST_CASE("an isolated station loses nothing to the channel", "[engine]") {
  Scenario cfg = small_scenario();
  cfg.road.length_m = 20.0;
  cfg.road.density_veh_per_km = 50.0;
  cfg.seed = seed_with_count(cfg, 1);
  Metrics m = run_scenario(cfg);

  REQUIRE(m.station_count == 1);
  REQUIRE(m.flows.size() == 1);
  const FlowCounters& f = m.flows.begin()->second;
  CHECK(f.generated > 0);
  CHECK(f.generated == f.sent + f.gatekeeper_discarded);
  CHECK(f.withdrawn() == 0);
  CHECK(f.offloaded == 0);
  CHECK(m.received == 0);
  CHECK(m.decoded == 0);
  for (int b = 0; b < kBinCount; ++b)
    CHECK(m.prr[static_cast<int>(MsgType::cam)][b].attempts == 0);
}

TEST_CASE("two stations in range decode every frame", "[engine]") {
  Scenario cfg = small_scenario();
  cfg.duration_s = 10.0;
  cfg.road.length_m = 30.0;
  cfg.road.lanes = 1;
  cfg.road.density_veh_per_km = 70.0;
  cfg.templates[0].flows[0].rate_hz = 2.0;

  // Probe for a pair whose spacing falls in the second distance bin.
  std::uint64_t seed = 0;
  for (std::uint64_t s = 1; s < 400 && seed == 0; ++s) {
    cfg.seed = s;
    CounterRng rng(stream_key(s, Stream::station_count));
    if (rng.poisson(cfg.expected_station_count()) != 2) continue;
    World probe(cfg);
    double x0 = probe.stations()[0].x;
    double x1 = probe.stations()[1].x;
    if (std::abs(x0 - x1) >= 10.0 && std::abs(x0 - x1) < 20.0) seed = s;
  }
  REQUIRE(seed != 0);
  cfg.seed = seed;
  Metrics m = run_scenario(cfg);

  int cam = static_cast<int>(MsgType::cam);
  const PrrBin& bin = m.prr[cam][1];
  CHECK(bin.attempts > 0);
  CHECK(bin.decoded == bin.attempts);
  CHECK(bin.prr() == 1.0);
  for (int b = 0; b < kBinCount; ++b) {
    if (b != 1) CHECK(m.prr[cam][b].attempts == 0);
  }
  std::uint64_t sent = 0;
  for (const auto& [id, f] : m.flows) sent += f.sent;
  CHECK(m.decoded == sent);
}

TEST_CASE("identical seeds reproduce identical results bit for bit",
          "[engine][determinism]") {
  Scenario cfg = small_scenario();
  cfg.duration_s = 3.0;
  cfg.templates[0].flows.push_back(FlowSpec{MsgType::cpm, 5.0, 0});
  cfg.seed = 7;
  Metrics a = run_scenario(cfg);
  Metrics b = run_scenario(cfg);
  REQUIRE(serialize(a) == serialize(b));

  cfg.seed = 8;
  Metrics c = run_scenario(cfg);
  CHECK(serialize(a) != serialize(c));
}

TEST_CASE("every generated message reaches exactly one terminal outcome",
          "[engine][conservation]") {
  CounterRng meta(stream_key(0x5eed, Stream::scenario_case, 1));
  for (int rep = 0; rep < 8; ++rep) {
    Scenario cfg = small_scenario();
    cfg.duration_s = 1.0 + meta.next_unit() * 2.0;
    cfg.seed = 100 + rep;
    cfg.road.length_m = 100.0 + meta.next_unit() * 400.0;
    cfg.road.density_veh_per_km = 20.0 + meta.next_unit() * 120.0;
    cfg.templates[0].flows.clear();
    cfg.templates[0].flows.push_back(FlowSpec{MsgType::cam, 10.0, 0});
    if (meta.next_below_eq(1) == 1)
      cfg.templates[0].flows.push_back(
          FlowSpec{MsgType::cpm, 10.0, 0, channel::sch0, {channel::sch1}});
    if (meta.next_below_eq(1) == 1) cfg.templates[0].transceivers = 2;

    CAPTURE(rep, cfg.seed, cfg.duration_s, cfg.road.density_veh_per_km);
    World world(cfg);
    for (const auto& st : world.stations()) {
      for (const auto& fl : st.flows) {
        std::set<ChannelId> allowed{fl.fcp.preferred_channel};
        allowed.insert(fl.fcp.alternative_channels.begin(),
                       fl.fcp.alternative_channels.end());
        for (ChannelId c : fl.fcl.granted_channels) CHECK(allowed.count(c) == 1);
      }
    }
    Metrics m = world.run();
    for (const auto& [id, f] : m.flows) {
      CAPTURE(id);
      CHECK(f.generated ==
            f.sent + f.offloaded + f.withdrawn() + f.gatekeeper_discarded);
    }
    CHECK(m.decoded <= m.received);
  }
}

TEST_CASE("release one stations stay on the safety channel", "[engine]") {
  Scenario cfg = small_scenario();
  cfg.duration_s = 2.0;
  cfg.templates[0].release = Release::r1;
  cfg.templates[0].offload_enabled = false;
  cfg.seed = 3;
  World world(cfg);
  REQUIRE_FALSE(world.stations().empty());
  for (const auto& st : world.stations()) {
    REQUIRE(st.groups.size() == 1);
    CHECK(st.groups[0].channel() == channel::sch0);
    for (const auto& fl : st.flows) {
      REQUIRE(fl.fcl.granted_channels.size() == 1);
      CHECK(fl.fcl.granted_channels[0] == channel::sch0);
    }
  }
  Metrics m = world.run();
  CHECK(m.total_offloaded() == 0);
}

TEST_CASE("channel load measurements match hand-computed duty", "[engine][cbr]") {
  Scenario cfg = small_scenario();
  cfg.duration_s = 10.0;
  cfg.road.length_m = 20.0;
  cfg.templates[0].flows[0] = FlowSpec{MsgType::cam, 5.0, 400};
  cfg.trace = true;

  double airtime = frame_airtime_s(400 + cfg.header_bytes, cfg.access.datarate_bps,
                                   cfg.access.overhead_s);
  // Needs the last transmission finished before the final window closes, so
  // probe seeds until the whole-run busy time is observable.
  bool done = false;
  for (std::uint64_t s = 1; s < 40 && !done; ++s) {
    cfg.seed = seed_with_count(cfg, 1, s);
    s = cfg.seed;
    Metrics m = run_scenario(cfg);
    double last_start = 0.0;
    for (const auto& ev : m.trace) {
      if (ev.kind == "tx_start") last_start = ev.time;
    }
    if (last_start + airtime > cfg.duration_s) continue;

    REQUIRE(m.flows.size() == 1);
    const FlowCounters& f = m.flows.begin()->second;
    REQUIRE(f.generated == 50);
    REQUIRE(f.sent == 50);
    double busy = 0.0;
    for (const auto& [t, cbr] : m.cbr_series(channel::sch0)) busy += cbr * cfg.cbr_window_s;
    REQUIRE(busy == Catch::Approx(50.0 * airtime).margin(1e-9));
    done = true;
  }
  REQUIRE(done);
}
