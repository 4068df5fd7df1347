// Walks the dual-transceiver setup through a quiet and a congested highway
// and shows where the perception flow ends up in each case.

#include <cstdio>

#include "mco/presets.hpp"
#include "mco/engine.hpp"

int main() {
  using namespace mco;

  for (double density : {20.0, 150.0}) {
    Scenario cfg = presets::dual_transceiver_offload(density);
    cfg.seed = 1;
    Metrics m = run_scenario(cfg);

    std::uint64_t generated = 0, sent = 0, offloaded = 0;
    for (const auto& [id, f] : m.flows) {
      generated += f.generated;
      sent += f.sent;
      offloaded += f.offloaded;
    }
    auto mean_cbr = [&](ChannelId c) {
      double sum = 0.0;
      auto series = m.cbr_series(c);
      for (const auto& [t, v] : series) sum += v;
      return series.empty() ? 0.0 : sum / series.size();
    };

    std::printf("density %5.0f veh/km: %3d stations, %6llu generated, %6llu on preferred, "
                "%5llu offloaded | CBR SCH0 %.3f SCH1 %.3f\n",
                density, m.station_count, (unsigned long long)generated,
                (unsigned long long)sent, (unsigned long long)offloaded,
                mean_cbr(channel::sch0), mean_cbr(channel::sch1));
  }
  return 0;
}
