#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mco/airtime.hpp"
#include "mco/rng.hpp"

namespace mco {

enum class MsgType { cam, denm, spat_map, vam, pcm, cpm, mcm };

inline constexpr MsgType kAllMsgTypes[] = {MsgType::cam, MsgType::denm, MsgType::spat_map,
                                           MsgType::vam, MsgType::pcm,  MsgType::cpm,
                                           MsgType::mcm};
inline constexpr int kMsgTypeCount = 7;

inline std::string msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::cam: return "CAM";
    case MsgType::denm: return "DENM";
    case MsgType::spat_map: return "SPAT_MAP";
    case MsgType::vam: return "VAM";
    case MsgType::pcm: return "PCM";
    case MsgType::cpm: return "CPM";
    case MsgType::mcm: return "MCM";
  }
  throw std::invalid_argument("unknown message type");
}

inline MsgType msg_type_from_name(const std::string& name) {
  for (MsgType t : kAllMsgTypes) {
    if (msg_type_name(t) == name) return t;
  }
  throw std::invalid_argument("unknown message type: " + name);
}

struct TrafficProfile {
  MsgType type = MsgType::cam;
  double min_rate_hz = 1.0;
  double max_rate_hz = 10.0;
  int min_size_bytes = 400;
  int max_size_bytes = 400;
  int priority = 1;  // 0 is most urgent
  double latency_budget_s = 0.1;
};

// Message catalog: generation figures as published, priorities and latency
// budgets chosen for the simulator.
class Catalog {
 public:
  Catalog() {
    add({MsgType::cam, 1.0, 10.0, 400, 400, 1, 0.1});
    add({MsgType::denm, 1.0, 10.0, 350, 1000, 1, 0.2});
    add({MsgType::spat_map, 10.0, 50.0, 1200, 1200, 2, 0.2});
    add({MsgType::vam, 1.0, 10.0, 350, 350, 2, 0.1});
    add({MsgType::pcm, 50.0, 50.0, 400, 400, 0, 0.1});
    add({MsgType::cpm, 1.0, 10.0, 1000, 1000, 3, 0.2});
    add({MsgType::mcm, 1.0, 10.0, 1000, 1000, 3, 0.2});
  }

  const TrafficProfile& profile(MsgType t) const {
    auto it = profiles_.find(t);
    if (it == profiles_.end())
      throw std::out_of_range("catalog has no profile for " + msg_type_name(t));
    return it->second;
  }

  void add(const TrafficProfile& p) { profiles_[p.type] = p; }

 private:
  std::map<MsgType, TrafficProfile> profiles_;
};

inline const Catalog& default_catalog() {
  static const Catalog c;
  return c;
}

inline const TrafficProfile& catalog_profile(MsgType t) { return default_catalog().profile(t); }

struct Message {
  std::uint64_t id = 0;
  MsgType type = MsgType::cam;
  int flow_id = 0;
  int source_station = 0;
  int size_bytes = 0;
  double created_at = 0.0;
  double latency_budget_s = 0.0;
  int priority = 0;
};

// Periodic per-flow source. Rate changes apply from the next emission; sizes
// with a non-degenerate range are drawn per message from the flow's stream.
class Generator {
 public:
  Generator(TrafficProfile profile, int flow_id, int station_id, double rate_hz,
            std::uint64_t root_seed)
      : profile_(profile), flow_id_(flow_id), station_id_(station_id) {
    if (rate_hz <= 0.0) throw std::invalid_argument("generator rate must be positive");
    rate_hz_ = rate_hz;
    CounterRng phase(stream_key(root_seed, Stream::gen_phase, station_id, flow_id));
    next_fire_at_ = phase.next_unit() / rate_hz_;
    size_key_ = stream_key(root_seed, Stream::msg_size, station_id, flow_id);
  }

  double next_fire_at() const { return next_fire_at_; }
  double current_rate_hz() const { return rate_hz_; }
  const TrafficProfile& profile() const { return profile_; }
  std::uint64_t emitted() const { return seq_; }

  Message generate(double now) {
    if (now + 1e-12 < next_fire_at_)
      throw std::logic_error("generate called before the scheduled emission");
    Message m;
    m.id = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(flow_id_)) << 32) | seq_;
    m.type = profile_.type;
    m.flow_id = flow_id_;
    m.source_station = station_id_;
    m.size_bytes = draw_size();
    m.created_at = now;
    m.latency_budget_s = profile_.latency_budget_s;
    m.priority = profile_.priority;
    ++seq_;
    next_fire_at_ += 1.0 / rate_hz_;
    return m;
  }

  // Clamps to the profile's rate bounds; returns the applied rate.
  double adapt_rate(double requested_hz) {
    double r = requested_hz;
    if (r < profile_.min_rate_hz) r = profile_.min_rate_hz;
    if (r > profile_.max_rate_hz) r = profile_.max_rate_hz;
    rate_hz_ = r;
    return r;
  }

  // Hard cap from the grant, allowed to sit below the profile minimum.
  void cap_rate(double cap_hz) {
    if (cap_hz > 0.0 && cap_hz < rate_hz_) rate_hz_ = cap_hz;
  }

 private:
  int draw_size() {
    if (profile_.min_size_bytes == profile_.max_size_bytes) return profile_.min_size_bytes;
    CounterRng rng(mix64(size_key_ ^ seq_));
    return rng.next_int_range(profile_.min_size_bytes, profile_.max_size_bytes);
  }

  TrafficProfile profile_;
  int flow_id_;
  int station_id_;
  double rate_hz_ = 1.0;
  double next_fire_at_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t size_key_ = 0;
};

struct DemandEntry {
  TrafficProfile profile;
  int stations_in_range = 0;
  double rate_hz = 0.0;
};

// Offered load in channel-equivalents: per-entry station count times rate
// times per-message airtime (at the profile's largest size), divided by the
// per-channel airtime capacity target.
inline double channel_demand(const std::vector<DemandEntry>& entries, double capacity,
                             double datarate_bps, double overhead_s) {
  if (capacity <= 0.0) throw std::domain_error("channel_demand: capacity must be positive");
  double total = 0.0;
  for (const auto& e : entries) {
    total += e.stations_in_range * e.rate_hz *
             frame_airtime_s(e.profile.max_size_bytes, datarate_bps, overhead_s);
  }
  return total / capacity;
}

}  // namespace mco
