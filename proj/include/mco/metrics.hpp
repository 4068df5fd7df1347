#pragma once

#include <array>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mco/channel.hpp"
#include "mco/facilities.hpp"
#include "mco/traffic.hpp"

namespace mco {

inline constexpr double kBinWidthM = 10.0;
inline constexpr double kMaxRangeM = 600.0;
inline constexpr int kBinCount = 60;

struct FlowCounters {
  int station = 0;
  MsgType type = MsgType::cam;
  std::uint64_t generated = 0;
  std::uint64_t sent = 0;
  std::uint64_t offloaded = 0;
  std::uint64_t withdrawn_latency = 0;
  std::uint64_t withdrawn_no_resources = 0;
  std::uint64_t withdrawn_preempt = 0;
  std::uint64_t gatekeeper_discarded = 0;

  std::uint64_t withdrawn() const {
    return withdrawn_latency + withdrawn_no_resources + withdrawn_preempt;
  }
};

struct PrrBin {
  std::uint64_t attempts = 0;
  std::uint64_t decoded = 0;

  double prr() const { return attempts == 0 ? 0.0 : static_cast<double>(decoded) / attempts; }
};

struct FclRecord {
  double time = 0.0;
  int station = 0;
  int flow_id = 0;
  FclStatus status = FclStatus::denied;
  double granted_rate_hz = 0.0;
  std::vector<ChannelId> channels;
};

struct TraceEvent {
  double time = 0.0;
  std::string kind;
  int station = 0;
  std::string payload;  // preformatted JSON object body
};

struct Metrics {
  double duration_s = 0.0;
  double cbr_window_s = 0.1;
  int station_count = 0;
  std::uint64_t seed = 0;

  std::map<int, FlowCounters> flows;
  // slot -> window start time -> (sum of station CBR samples, sample count)
  std::array<std::map<std::int64_t, std::pair<double, std::uint32_t>>, kChannelCount> cbr;
  std::array<std::array<PrrBin, kBinCount>, kMsgTypeCount> prr;
  // same bins keyed by the transmitter's station template
  std::vector<std::array<std::array<PrrBin, kBinCount>, kMsgTypeCount>> prr_by_template;
  std::vector<FclRecord> fcl_log;
  std::uint64_t received = 0;
  std::uint64_t decoded = 0;

  bool trace_enabled = false;
  std::vector<TraceEvent> trace;

  void add_cbr_sample(ChannelId c, std::int64_t window_index, double value) {
    auto& cell = cbr[c.slot][window_index];
    cell.first += value;
    cell.second += 1;
  }

  std::vector<std::pair<double, double>> cbr_series(ChannelId c) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& [w, cell] : cbr[c.slot]) {
      if (cell.second > 0) out.push_back({w * cbr_window_s, cell.first / cell.second});
    }
    return out;
  }

  std::uint64_t total_offloaded() const {
    std::uint64_t n = 0;
    for (const auto& [id, f] : flows) n += f.offloaded;
    return n;
  }

  std::uint64_t total_withdrawn() const {
    std::uint64_t n = 0;
    for (const auto& [id, f] : flows) n += f.withdrawn();
    return n;
  }
};

// Largest bin midpoint whose PRR meets the target with every nearer populated
// bin also meeting it. Empty bins neither break nor extend the streak.
inline double prr_range(const Metrics& m, MsgType type, double target) {
  if (target <= 0.0 || target >= 1.0) throw std::invalid_argument("prr target must be in (0,1)");
  const auto& bins = m.prr[static_cast<int>(type)];
  double range = 0.0;
  for (int b = 0; b < kBinCount; ++b) {
    if (bins[b].attempts == 0) continue;
    if (bins[b].prr() < target) break;
    range = (b + 0.5) * kBinWidthM;
  }
  return range;
}

namespace detail {

inline void put(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  out += buf;
}

}  // namespace detail

// Canonical byte representation; two runs agree exactly iff their metrics do.
inline std::string serialize(const Metrics& m) {
  std::string out;
  detail::put(out, "metrics v1 seed=%llu stations=%d duration=%a window=%a\n",
              static_cast<unsigned long long>(m.seed), m.station_count, m.duration_s,
              m.cbr_window_s);
  detail::put(out, "totals received=%llu decoded=%llu\n",
              static_cast<unsigned long long>(m.received),
              static_cast<unsigned long long>(m.decoded));
  for (const auto& [id, f] : m.flows) {
    detail::put(out, "flow %d st=%d type=%s gen=%llu sent=%llu off=%llu wl=%llu wn=%llu "
                     "wp=%llu gk=%llu\n",
                id, f.station, msg_type_name(f.type).c_str(),
                static_cast<unsigned long long>(f.generated),
                static_cast<unsigned long long>(f.sent),
                static_cast<unsigned long long>(f.offloaded),
                static_cast<unsigned long long>(f.withdrawn_latency),
                static_cast<unsigned long long>(f.withdrawn_no_resources),
                static_cast<unsigned long long>(f.withdrawn_preempt),
                static_cast<unsigned long long>(f.gatekeeper_discarded));
  }
  for (int slot = 0; slot < kChannelCount; ++slot) {
    for (const auto& [w, cell] : m.cbr[slot]) {
      detail::put(out, "cbr %s w=%lld sum=%a n=%u\n", kSlotNames[slot],
                  static_cast<long long>(w), cell.first, cell.second);
    }
  }
  for (int t = 0; t < kMsgTypeCount; ++t) {
    for (int b = 0; b < kBinCount; ++b) {
      const auto& bin = m.prr[t][b];
      if (bin.attempts == 0) continue;
      detail::put(out, "prr %s bin=%d n=%llu ok=%llu\n",
                  msg_type_name(static_cast<MsgType>(t)).c_str(), b,
                  static_cast<unsigned long long>(bin.attempts),
                  static_cast<unsigned long long>(bin.decoded));
    }
  }
  for (std::size_t tm = 0; tm < m.prr_by_template.size(); ++tm) {
    for (int t = 0; t < kMsgTypeCount; ++t) {
      for (int b = 0; b < kBinCount; ++b) {
        const auto& bin = m.prr_by_template[tm][t][b];
        if (bin.attempts == 0) continue;
        detail::put(out, "tprr %zu %s bin=%d n=%llu ok=%llu\n", tm,
                    msg_type_name(static_cast<MsgType>(t)).c_str(), b,
                    static_cast<unsigned long long>(bin.attempts),
                    static_cast<unsigned long long>(bin.decoded));
      }
    }
  }
  for (const auto& r : m.fcl_log) {
    detail::put(out, "fcl t=%a st=%d flow=%d status=%d rate=%a ch=", r.time, r.station,
                r.flow_id, static_cast<int>(r.status), r.granted_rate_hz);
    for (ChannelId c : r.channels) detail::put(out, "%s,", channel_name(c).c_str());
    out += "\n";
  }
  return out;
}

}  // namespace mco
