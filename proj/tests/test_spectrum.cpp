#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mco/channel.hpp"
#include "mco/propagation.hpp"
#include "mco/rng.hpp"

using namespace mco;

TEST_CASE("channel plan tiles the band without gap or overlap", "[spectrum]") {
  const auto& plan = default_channel_plan();
  double edge = 5855.0;
  for (const auto& e : plan.entries()) {
    CHECK(e.low_edge_mhz == Catch::Approx(edge));
    CHECK(e.high_edge_mhz == Catch::Approx(edge + 10.0));
    edge = e.high_edge_mhz;
  }
  CHECK(edge == Catch::Approx(5925.0));
}

TEST_CASE("channel plan assigns usage classes", "[spectrum]") {
  const auto& plan = default_channel_plan();
  CHECK(plan.entry(channel::sch0).usage == ChannelUsage::safety_primary);
  CHECK(plan.entry(channel::sch0).low_edge_mhz == Catch::Approx(5895.0));
  CHECK(plan.entry(channel::sch0).high_edge_mhz == Catch::Approx(5905.0));
  CHECK(plan.entry(channel::sch3).usage == ChannelUsage::non_safety);
  CHECK(plan.entry(channel::sch4).usage == ChannelUsage::non_safety);
  CHECK(plan.entry(channel::sch3).low_edge_mhz == Catch::Approx(5855.0));
  CHECK(plan.entry(channel::sch6).usage == ChannelUsage::urban_rail_priority);
  CHECK(plan.entry(channel::sch6).high_edge_mhz == Catch::Approx(5925.0));
  CHECK(plan.entry(channel::sch1).low_edge_mhz == Catch::Approx(5875.0));
  CHECK(plan.entry(channel::sch2).low_edge_mhz == Catch::Approx(5885.0));
  CHECK(plan.entry(channel::sch5).low_edge_mhz == Catch::Approx(5905.0));
}

TEST_CASE("channel names map to slots bijectively", "[spectrum]") {
  for (int s = 0; s < kChannelCount; ++s) {
    ChannelId id{static_cast<std::uint8_t>(s)};
    CHECK(channel_from_name(channel_name(id)) == id);
  }
  CHECK(channel_from_name("SCH0").index() == 4);
  CHECK(channel_from_name("SCH3").index() == 0);
  CHECK(channel_from_name("SCH6").index() == 6);
  CHECK_THROWS_AS(channel_from_name("SCH7"), std::invalid_argument);
}

TEST_CASE("urban rail channel gated by absence flag", "[spectrum]") {
  auto without = usable_channels(default_channel_plan(), false);
  auto with = usable_channels(default_channel_plan(), true);
  CHECK_FALSE(without[channel::sch6.slot]);
  CHECK(with[channel::sch6.slot]);
  for (int s = 0; s < kChannelCount - 1; ++s) CHECK(without[s]);
}

TEST_CASE("path loss at 100 m", "[spectrum]") {
  PropagationConfig cfg;
  double expected = 47.86 + 10.0 * 2.3 * std::log10(100.0);
  CHECK(path_loss_db(100.0, cfg) == Catch::Approx(expected));
  CHECK(path_loss_db(100.0, cfg) == Catch::Approx(93.86));
}

TEST_CASE("path loss grows by 23 dB per decade", "[spectrum]") {
  PropagationConfig cfg;
  CHECK(path_loss_db(1000.0, cfg) - path_loss_db(100.0, cfg) == Catch::Approx(23.0));
  CHECK(path_loss_db(10.0, cfg) - path_loss_db(1.0, cfg) == Catch::Approx(23.0));
}

TEST_CASE("path loss clamps below one metre and rejects non-positive distance", "[spectrum]") {
  PropagationConfig cfg;
  CHECK(path_loss_db(0.5, cfg) == Catch::Approx(cfg.reference_loss_db));
  CHECK(path_loss_db(1.0, cfg) == Catch::Approx(cfg.reference_loss_db));
  CHECK_THROWS_AS(path_loss_db(0.0, cfg), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-3.0, cfg), std::domain_error);
}

TEST_CASE("path loss strictly increases beyond one metre", "[spectrum]") {
  PropagationConfig cfg;
  CounterRng rng(stream_key(0x5eed, Stream::scenario_case, 1));
  for (int i = 0; i < 200; ++i) {
    double d1 = rng.next_range(1.0, 5000.0);
    double d2 = d1 + rng.next_range(0.001, 100.0);
    CHECK(path_loss_db(d2, cfg) > path_loss_db(d1, cfg));
  }
}

TEST_CASE("adjacent channel suppression by slot separation", "[spectrum]") {
  AciProfile profile;
  CHECK(aci_attenuation_db(channel::sch0, channel::sch0, profile) == 0.0);
  CHECK(aci_attenuation_db(channel::sch0, channel::sch2, profile) == Catch::Approx(33.0));
  CHECK(aci_attenuation_db(channel::sch0, channel::sch5, profile) == Catch::Approx(33.0));
  CHECK(aci_attenuation_db(channel::sch0, channel::sch1, profile) >= 65.0);
  CHECK(aci_attenuation_db(channel::sch0, channel::sch6, profile) >= 65.0);
  CHECK(aci_attenuation_db(channel::sch3, channel::sch6, profile) >= 65.0);
  CHECK(aci_attenuation_db(channel::sch2, channel::sch0, profile) ==
        aci_attenuation_db(channel::sch0, channel::sch2, profile));
}

TEST_CASE("aci profile validation", "[spectrum]") {
  CHECK_THROWS_AS(AciProfile({1.0, 33.0, 65.0}), std::invalid_argument);
  CHECK_THROWS_AS(AciProfile({0.0, 40.0, 30.0}), std::invalid_argument);
  CHECK_THROWS_AS(AciProfile({0.0, 33.0, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(AciProfile(std::vector<double>{}), std::invalid_argument);
  CHECK_NOTHROW(AciProfile({0.0, 30.0, 70.0, 90.0}, 70.0));
}

TEST_CASE("sinr of two equal powers is zero against negligible noise", "[spectrum]") {
  double s = sinr_db(-60.0, {{-60.0, 0.0}}, -200.0);
  CHECK(std::abs(s) < 1e-6);
}

TEST_CASE("sinr sums interference in the linear domain", "[spectrum]") {
  double signal = -60.0;
  double denom = std::pow(10.0, (-60.0 - 33.0) / 10.0) + std::pow(10.0, -95.0 / 10.0);
  double expected = signal - 10.0 * std::log10(denom);
  CHECK(sinr_db(signal, {{-60.0, 33.0}}, -95.0) == Catch::Approx(expected).epsilon(1e-12));

  denom = std::pow(10.0, -72.0 / 10.0) + std::pow(10.0, -81.0 / 10.0) +
          std::pow(10.0, -95.0 / 10.0);
  expected = -65.0 - 10.0 * std::log10(denom);
  CHECK(sinr_db(-65.0, {{-39.0, 33.0}, {-81.0, 0.0}}, -95.0) ==
        Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adding interferers never raises sinr", "[spectrum]") {
  CounterRng rng(stream_key(0x5eed, Stream::scenario_case, 2));
  for (int i = 0; i < 300; ++i) {
    double signal = rng.next_range(-95.0, -40.0);
    std::vector<Interferer> set;
    double prev = sinr_db(signal, set, -95.0);
    int n = rng.next_int_range(1, 6);
    for (int k = 0; k < n; ++k) {
      set.push_back({rng.next_range(-110.0, -50.0), rng.next_range(0.0, 65.0)});
      double cur = sinr_db(signal, set, -95.0);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("decode threshold is inclusive", "[spectrum]") {
  PropagationConfig cfg;
  CHECK(decode_success(5.0, cfg));
  CHECK(decode_success(5.0001, cfg));
  CHECK_FALSE(decode_success(4.9999, cfg));
}
