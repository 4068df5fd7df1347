#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "mco/channel.hpp"
#include "mco/traffic.hpp"

namespace mco {

struct FlowDemand {
  int flow_id = 0;
  int station_id = 0;
  int priority = 0;
  double airtime_fraction = 0.0;
  MsgType type = MsgType::cam;
};

struct ChannelAssignment {
  ChannelId primary;
  std::vector<ChannelId> alternatives;
};

using AssociationMap = std::map<int, ChannelAssignment>;

// Preference order for greedy filling: the primary safety channel first, then
// outward so consecutive picks avoid adjacent slots where possible, non-safety
// channels last.
inline std::vector<ChannelId> default_channel_order() {
  return {channel::sch0, channel::sch1, channel::sch5, channel::sch2,
          channel::sch6, channel::sch4, channel::sch3};
}

enum class PolicyKind { predefined, sequential, balanced };

struct UsagePolicy {
  PolicyKind kind = PolicyKind::predefined;
  double fill_threshold = 0.62;
  std::vector<ChannelId> channel_order = default_channel_order();
  bool urban_rail_absent = false;
};

inline std::vector<ChannelId> policy_channels(const UsagePolicy& policy) {
  std::vector<ChannelId> out;
  for (ChannelId c : policy.channel_order) {
    if (c == channel::sch6 && !policy.urban_rail_absent) continue;
    out.push_back(c);
  }
  return out;
}

struct SequentialResult {
  AssociationMap map;
  std::vector<int> unplaced;
  std::map<int, double> load_by_slot;
};

// Fill channels one at a time in preference order; a flow lands on the first
// channel whose accumulated load stays within the fill threshold. Flows are
// taken most-urgent first.
inline SequentialResult assign_sequential(std::vector<FlowDemand> demands,
                                          const UsagePolicy& policy) {
  for (const auto& d : demands) {
    if (d.airtime_fraction > policy.fill_threshold)
      throw std::invalid_argument("assign_sequential: single demand exceeds fill threshold");
    if (d.airtime_fraction < 0.0)
      throw std::invalid_argument("assign_sequential: negative demand");
  }
  std::stable_sort(demands.begin(), demands.end(), [](const auto& a, const auto& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.flow_id < b.flow_id;
  });
  auto channels = policy_channels(policy);
  SequentialResult res;
  for (const auto& d : demands) {
    bool placed = false;
    for (ChannelId c : channels) {
      double& load = res.load_by_slot[c.slot];
      if (load + d.airtime_fraction <= policy.fill_threshold + 1e-12) {
        load += d.airtime_fraction;
        res.map[d.flow_id] = ChannelAssignment{c, {}};
        placed = true;
        break;
      }
    }
    if (!placed) res.unplaced.push_back(d.flow_id);
  }
  return res;
}

// Longest demand first onto the currently least-loaded usable channel. A
// station with r radios may end up on at most r distinct channels; once the
// budget is spent its remaining flows stay within the channels already used.
// Ties break toward the lowest slot, order of equal demands by flow id.
inline AssociationMap assign_balanced(std::vector<FlowDemand> demands,
                                      const std::vector<ChannelId>& channels,
                                      const std::map<int, int>& radio_counts) {
  if (channels.empty()) throw std::invalid_argument("assign_balanced: no channels");
  std::stable_sort(demands.begin(), demands.end(), [](const auto& a, const auto& b) {
    if (a.airtime_fraction != b.airtime_fraction) return a.airtime_fraction > b.airtime_fraction;
    return a.flow_id < b.flow_id;
  });
  std::map<int, double> load;
  for (ChannelId c : channels) load[c.slot];
  std::map<int, std::vector<ChannelId>> used_by_station;
  AssociationMap out;
  for (const auto& d : demands) {
    auto& used = used_by_station[d.station_id];
    int radios = kChannelCount;
    if (auto it = radio_counts.find(d.station_id); it != radio_counts.end()) radios = it->second;
    const bool budget_spent = static_cast<int>(used.size()) >= radios;
    ChannelId best{};
    bool have = false;
    for (ChannelId c : channels) {
      if (budget_spent &&
          std::find(used.begin(), used.end(), c) == used.end())
        continue;
      if (!have || load[c.slot] < load[best.slot] ||
          (load[c.slot] == load[best.slot] && c.slot < best.slot)) {
        best = c;
        have = true;
      }
    }
    if (!have) throw std::invalid_argument("assign_balanced: radio budget admits no channel");
    load[best.slot] += d.airtime_fraction;
    if (std::find(used.begin(), used.end(), best) == used.end()) used.push_back(best);
    out[d.flow_id] = ChannelAssignment{best, {}};
  }
  return out;
}

using AssociationTable = std::map<MsgType, ChannelAssignment>;

// Shipped placeholder profile: day-one messages stay on the primary safety
// channel, heavier services start there with a spill-over alternative, the
// rest spread over the remaining safety channels.
inline AssociationTable default_association_table() {
  return {
      {MsgType::cam, {channel::sch0, {}}},
      {MsgType::denm, {channel::sch0, {}}},
      {MsgType::vam, {channel::sch0, {channel::sch1}}},
      {MsgType::cpm, {channel::sch0, {channel::sch1}}},
      {MsgType::mcm, {channel::sch1, {channel::sch5}}},
      {MsgType::spat_map, {channel::sch1, {channel::sch5}}},
      {MsgType::pcm, {channel::sch5, {}}},
  };
}

inline AssociationMap assign_predefined(const std::vector<FlowDemand>& flows,
                                        const AssociationTable& table) {
  AssociationMap out;
  for (const auto& f : flows) {
    auto it = table.find(f.type);
    if (it == table.end())
      throw std::invalid_argument("assign_predefined: no table entry for " +
                                  msg_type_name(f.type));
    out[f.flow_id] = it->second;
  }
  return out;
}

}  // namespace mco
