#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mco/traffic.hpp"

using namespace mco;

TEST_CASE("catalog figures", "[traffic]") {
  const auto& cam = catalog_profile(MsgType::cam);
  CHECK(cam.min_rate_hz == 1.0);
  CHECK(cam.max_rate_hz == 10.0);
  CHECK(cam.min_size_bytes == 400);
  CHECK(cam.max_size_bytes == 400);

  const auto& pcm = catalog_profile(MsgType::pcm);
  CHECK(pcm.min_rate_hz == 50.0);
  CHECK(pcm.max_rate_hz == 50.0);
  CHECK(pcm.min_size_bytes == 400);

  const auto& cpm = catalog_profile(MsgType::cpm);
  CHECK(cpm.min_rate_hz == 1.0);
  CHECK(cpm.max_rate_hz == 10.0);
  CHECK(cpm.min_size_bytes == 1000);
  CHECK(cpm.max_size_bytes == 1000);

  const auto& denm = catalog_profile(MsgType::denm);
  CHECK(denm.min_size_bytes == 350);
  CHECK(denm.max_size_bytes == 1000);

  const auto& spat = catalog_profile(MsgType::spat_map);
  CHECK(spat.min_rate_hz == 10.0);
  CHECK(spat.max_rate_hz == 50.0);
  CHECK(spat.min_size_bytes == 1200);

  CHECK(catalog_profile(MsgType::vam).min_size_bytes == 350);
  CHECK(catalog_profile(MsgType::mcm).min_size_bytes == 1000);
}

TEST_CASE("catalog priorities and budgets", "[traffic]") {
  CHECK(catalog_profile(MsgType::pcm).priority == 0);
  CHECK(catalog_profile(MsgType::cam).priority == 1);
  CHECK(catalog_profile(MsgType::denm).priority == 1);
  CHECK(catalog_profile(MsgType::vam).priority == 2);
  CHECK(catalog_profile(MsgType::spat_map).priority == 2);
  CHECK(catalog_profile(MsgType::cpm).priority == 3);
  CHECK(catalog_profile(MsgType::mcm).priority == 3);

  CHECK(catalog_profile(MsgType::cam).latency_budget_s == Catch::Approx(0.1));
  CHECK(catalog_profile(MsgType::vam).latency_budget_s == Catch::Approx(0.1));
  CHECK(catalog_profile(MsgType::pcm).latency_budget_s == Catch::Approx(0.1));
  CHECK(catalog_profile(MsgType::cpm).latency_budget_s == Catch::Approx(0.2));
  CHECK(catalog_profile(MsgType::mcm).latency_budget_s == Catch::Approx(0.2));
  CHECK(catalog_profile(MsgType::denm).latency_budget_s == Catch::Approx(0.2));
  CHECK(catalog_profile(MsgType::spat_map).latency_budget_s == Catch::Approx(0.2));
}

TEST_CASE("message type names round-trip", "[traffic]") {
  for (MsgType t : kAllMsgTypes) CHECK(msg_type_from_name(msg_type_name(t)) == t);
  CHECK_THROWS_AS(msg_type_from_name("IVIM"), std::invalid_argument);
}

TEST_CASE("fixed-rate generator emits exactly rate times window messages", "[traffic]") {
  Generator gen(catalog_profile(MsgType::pcm), 7, 3, 50.0, 42);
  int count = 0;
  double t = gen.next_fire_at();
  double window_end = t + 1.0;
  while (gen.next_fire_at() < window_end - 1e-12) {
    gen.generate(gen.next_fire_at());
    ++count;
  }
  CHECK(count == 50);
}

TEST_CASE("generator spacing follows the current rate", "[traffic]") {
  Generator gen(catalog_profile(MsgType::cam), 1, 1, 10.0, 42);
  double t1 = gen.next_fire_at();
  gen.generate(t1);
  double t2 = gen.next_fire_at();
  CHECK(t2 - t1 == Catch::Approx(0.1));
  gen.generate(t2);
  gen.adapt_rate(5.0);
  gen.generate(gen.next_fire_at());
  double t4 = gen.next_fire_at();
  CHECK(t4 == Catch::Approx(t2 + 0.1 + 0.2));
}

TEST_CASE("generator is deterministic per seed and stream", "[traffic]") {
  Generator a(catalog_profile(MsgType::denm), 9, 4, 10.0, 1234);
  Generator b(catalog_profile(MsgType::denm), 9, 4, 10.0, 1234);
  for (int i = 0; i < 50; ++i) {
    auto ma = a.generate(a.next_fire_at());
    auto mb = b.generate(b.next_fire_at());
    CHECK(ma.id == mb.id);
    CHECK(ma.size_bytes == mb.size_bytes);
    CHECK(ma.created_at == mb.created_at);
  }
  Generator c(catalog_profile(MsgType::denm), 9, 4, 10.0, 1235);
  Generator d(catalog_profile(MsgType::denm), 9, 4, 10.0, 1234);
  bool any_diff = false;
  for (int i = 0; i < 50; ++i) {
    if (c.generate(c.next_fire_at()).size_bytes != d.generate(d.next_fire_at()).size_bytes)
      any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("generator rejects early calls and draws sizes within range", "[traffic]") {
  Generator gen(catalog_profile(MsgType::denm), 2, 5, 10.0, 7);
  CHECK_THROWS_AS(gen.generate(gen.next_fire_at() - 0.05), std::logic_error);
  std::set<int> sizes;
  for (int i = 0; i < 200; ++i) {
    auto m = gen.generate(gen.next_fire_at());
    CHECK(m.size_bytes >= 350);
    CHECK(m.size_bytes <= 1000);
    sizes.insert(m.size_bytes);
  }
  CHECK(sizes.size() > 10);
}

TEST_CASE("rate adaptation clamps to profile bounds", "[traffic]") {
  Generator gen(catalog_profile(MsgType::cam), 1, 1, 10.0, 42);
  CHECK(gen.adapt_rate(25.0) == Catch::Approx(10.0));
  CHECK(gen.adapt_rate(0.2) == Catch::Approx(1.0));
  CHECK(gen.adapt_rate(4.0) == Catch::Approx(4.0));
}

TEST_CASE("channel demand arithmetic for a single profile", "[traffic]") {
  double airtime = 8.0 * 400 / 6e6 + 110e-6;
  double expected = 100 * 10.0 * airtime / 0.62;
  double got = channel_demand({{catalog_profile(MsgType::cam), 100, 10.0}}, 0.62, 6e6, 110e-6);
  CHECK(got == Catch::Approx(expected).epsilon(1e-12));
  CHECK(got == Catch::Approx(1.0376).margin(0.0005));
}

TEST_CASE("channel demand is additive over entries", "[traffic]") {
  std::vector<DemandEntry> both = {{catalog_profile(MsgType::cam), 100, 10.0},
                                   {catalog_profile(MsgType::cpm), 50, 5.0}};
  double sum = channel_demand({both[0]}, 1.0, 6e6, 110e-6) +
               channel_demand({both[1]}, 1.0, 6e6, 110e-6);
  CHECK(channel_demand(both, 1.0, 6e6, 110e-6) == Catch::Approx(sum).epsilon(1e-12));
  CHECK_THROWS_AS(channel_demand(both, 0.0, 6e6, 110e-6), std::domain_error);
}

TEST_CASE("full catalog at max rates needs more than one channel", "[traffic]") {
  std::vector<DemandEntry> all;
  for (MsgType t : kAllMsgTypes) {
    const auto& p = catalog_profile(t);
    all.push_back({p, 100, p.max_rate_hz});
  }
  CHECK(channel_demand(all, 1.0, 6e6, 110e-6) > 1.0);
  std::vector<DemandEntry> cam_only = {
      {catalog_profile(MsgType::cam), 100, catalog_profile(MsgType::cam).max_rate_hz}};
  CHECK(channel_demand(cam_only, 1.0, 6e6, 110e-6) < 1.0);
}
