#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mco/config.hpp"
#include "mco/metrics.hpp"
#include "mco/runner.hpp"

namespace mco {

inline constexpr int kOutputSchemaVersion = 1;

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kCbrCsvHeader = "seed,channel,t,cbr";
inline constexpr const char* kPrrCsvHeader = "seed,msg_type,bin_m,prr,n";

inline void append_cbr_csv(std::ostream& os, const Metrics& m, std::uint64_t seed) {
  for (int slot = 0; slot < kChannelCount; ++slot) {
    ChannelId c{static_cast<std::uint8_t>(slot)};
    for (const auto& [t, cbr] : m.cbr_series(c)) {
      os << seed << ',' << channel_name(c) << ',' << detail::num(t) << ','
         << detail::num(cbr) << '\n';
    }
  }
}

inline void append_prr_csv(std::ostream& os, const Metrics& m, std::uint64_t seed) {
  for (MsgType type : kAllMsgTypes) {
    int ti = static_cast<int>(type);
    for (int b = 0; b < kBinCount; ++b) {
      const PrrBin& bin = m.prr[ti][b];
      if (bin.attempts == 0) continue;
      os << seed << ',' << msg_type_name(type) << ',' << (b * kBinWidthM + kBinWidthM / 2)
         << ',' << detail::num(bin.prr()) << ',' << bin.attempts << '\n';
    }
  }
}

// One event per line. Payloads are pre-rendered key fragments, so a line is
// assembled rather than built through a document object.
inline void write_trace_jsonl(std::ostream& os, const Metrics& m) {
  for (const auto& ev : m.trace) {
    os << "{\"kind\":\"" << ev.kind << "\",\"time\":" << detail::num(ev.time)
       << ",\"station\":" << ev.station;
    if (!ev.payload.empty()) os << ',' << ev.payload;
    os << "}\n";
  }
}

// Cross-seed aggregation for the headline quantities; everything fancier
// lives in the per-seed CSVs.
inline json summary_json(const Scenario& base, const std::vector<std::uint64_t>& seeds,
                         const std::vector<Metrics>& runs, const std::string& preset = "") {
  std::map<std::string, std::vector<double>> series;
  for (const auto& m : runs) {
    double generated = 0.0, sent = 0.0, offloaded = 0.0, withdrawn = 0.0, discarded = 0.0;
    for (const auto& [id, f] : m.flows) {
      generated += f.generated;
      sent += f.sent;
      offloaded += f.offloaded;
      withdrawn += f.withdrawn();
      discarded += f.gatekeeper_discarded;
    }
    series["generated"].push_back(generated);
    series["sent"].push_back(sent);
    series["offloaded"].push_back(offloaded);
    series["withdrawn"].push_back(withdrawn);
    series["gatekeeper_discarded"].push_back(discarded);
    series["stations"].push_back(m.station_count);
    series["decoded"].push_back(static_cast<double>(m.decoded));
    double range = 0.0;
    try {
      range = prr_range(m, MsgType::cam, 0.9);
    } catch (const std::invalid_argument&) {
    }
    series["cam_prr_range_m"].push_back(range);
    for (int slot = 0; slot < kChannelCount; ++slot) {
      ChannelId c{static_cast<std::uint8_t>(slot)};
      auto ts = m.cbr_series(c);
      if (ts.empty()) continue;
      double mean = 0.0;
      for (const auto& [t, v] : ts) mean += v;
      series["cbr_" + channel_name(c)].push_back(mean / ts.size());
    }
  }

  json doc;
  doc["schema_version"] = kOutputSchemaVersion;
  if (!preset.empty()) doc["preset"] = preset;
  doc["seeds"] = seeds;
  doc["scenario"] = scenario_to_json(base);
  json metrics = json::object();
  for (const auto& [name, xs] : series) {
    Aggregate a = aggregate(xs);
    metrics[name] = {{"mean", a.mean}, {"ci95", a.ci95}, {"n", a.n}};
  }
  doc["metrics"] = metrics;
  return doc;
}

}  // namespace mco
