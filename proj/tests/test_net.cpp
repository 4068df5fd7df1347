#include <catch2/catch_amalgamated.hpp>

#include "mco/net.hpp"
#include "mco/rng.hpp"

using namespace mco;

TEST_CASE("route down wraps the message for the bound channel", "[net]") {
  GaghBinding gagh(40);
  gagh.bind(3, {1, channel::sch0, "G5"});
  Message m;
  m.id = 77;
  m.size_bytes = 400;
  m.priority = 1;
  auto f = gagh.route_down(m, 3, 1.5);
  REQUIRE(f.has_value());
  CHECK(f->channel == channel::sch0);
  CHECK(f->group_id == 1);
  CHECK(f->size_bytes == 440);
  CHECK(f->priority == 1);
  CHECK(f->enqueued_at == 1.5);
}

TEST_CASE("route down fails for an unbound ali", "[net]") {
  GaghBinding gagh;
  Message m;
  CHECK_FALSE(gagh.route_down(m, 9, 0.0).has_value());
}

TEST_CASE("route up returns the payload unchanged", "[net]") {
  GaghBinding gagh(40);
  gagh.bind(1, {2, channel::sch1, "G5"});
  Message m;
  m.id = 12345;
  m.size_bytes = 350;
  m.created_at = 2.25;
  auto f = gagh.route_down(m, 1, 2.25);
  REQUIRE(f.has_value());
  auto up = GaghBinding::route_up(*f);
  CHECK(up.id == m.id);
  CHECK(up.size_bytes == m.size_bytes);
  CHECK(up.created_at == m.created_at);
}

TEST_CASE("merge prefers the freshest local report", "[net]") {
  std::vector<ChannelReport> local = {{channel::sch0, 0.30, 1.0, 0, true},
                                      {channel::sch0, 0.40, 2.0, 0, true}};
  std::vector<ChannelReport> neighbor = {{channel::sch0, 0.90, 2.5, 7, false}};
  auto view = merge_channel_reports(local, neighbor, 2.6, 1.0);
  REQUIRE(view.cbr(channel::sch0).has_value());
  CHECK(*view.cbr(channel::sch0) == Catch::Approx(0.40));
  CHECK(view.get(channel::sch0)->local);
}

TEST_CASE("merge falls back to the freshest neighbor report", "[net]") {
  std::vector<ChannelReport> neighbor = {{channel::sch5, 0.20, 1.0, 3, false},
                                         {channel::sch5, 0.25, 1.8, 9, false}};
  auto view = merge_channel_reports({}, neighbor, 2.0, 1.5);
  REQUIRE(view.cbr(channel::sch5).has_value());
  CHECK(*view.cbr(channel::sch5) == Catch::Approx(0.25));
  CHECK(view.get(channel::sch5)->source_station == 9);
  CHECK_FALSE(view.get(channel::sch5)->local);
}

TEST_CASE("merge drops stale reports", "[net]") {
  std::vector<ChannelReport> local = {{channel::sch0, 0.30, 1.0, 0, true}};
  std::vector<ChannelReport> neighbor = {{channel::sch1, 0.50, 0.5, 4, false}};
  auto view = merge_channel_reports(local, neighbor, 3.0, 1.0);
  CHECK_FALSE(view.cbr(channel::sch0).has_value());
  CHECK_FALSE(view.cbr(channel::sch1).has_value());
}

TEST_CASE("merge never lets a neighbor shadow usable local data", "[net]") {
  CounterRng rng(stream_key(0x5eed, Stream::scenario_case, 4));
  for (int trial = 0; trial < 300; ++trial) {
    double now = rng.next_range(5.0, 10.0);
    double staleness = rng.next_range(0.2, 2.0);
    std::vector<ChannelReport> local, neighbor;
    int nl = rng.next_int_range(0, 5);
    int nn = rng.next_int_range(0, 8);
    for (int i = 0; i < nl; ++i) {
      local.push_back({ChannelId{static_cast<std::uint8_t>(rng.next_int_range(0, 6))},
                       rng.next_unit(), now - rng.next_range(0.0, 3.0), 0, true});
    }
    for (int i = 0; i < nn; ++i) {
      neighbor.push_back({ChannelId{static_cast<std::uint8_t>(rng.next_int_range(0, 6))},
                          rng.next_unit(), now - rng.next_range(0.0, 3.0),
                          rng.next_int_range(1, 50), false});
    }
    auto view = merge_channel_reports(local, neighbor, now, staleness);
    for (int s = 0; s < kChannelCount; ++s) {
      ChannelId c{static_cast<std::uint8_t>(s)};
      const auto& entry = view.get(c);
      bool has_fresh_local = false;
      double best_local = -1.0;
      for (const auto& r : local) {
        if (r.channel == c && now - r.timestamp <= staleness) {
          has_fresh_local = true;
          best_local = std::max(best_local, r.timestamp);
        }
      }
      if (has_fresh_local) {
        REQUIRE(entry.has_value());
        CHECK(entry->local);
        CHECK(entry->timestamp == Catch::Approx(best_local));
      }
      if (entry) CHECK(now - entry->timestamp <= staleness + 1e-12);
    }
  }
}
