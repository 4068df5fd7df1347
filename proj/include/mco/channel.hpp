#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mco {

// The 5.9 GHz ITS band: seven 10 MHz channels tiling [5855, 5925] MHz.
// A channel is identified by its frequency slot (0 = lowest 10 MHz), so the
// slot distance |i - j| is the adjacency separation used by the leakage
// model. Service names (SCH0..SCH6) map onto slots as the band is allocated:
//
//   slot 0  SCH3  [5855, 5865]  non_safety
//   slot 1  SCH4  [5865, 5875]  non_safety
//   slot 2  SCH1  [5875, 5885]  safety
//   slot 3  SCH2  [5885, 5895]  safety
//   slot 4  SCH0  [5895, 5905]  safety_primary
//   slot 5  SCH5  [5905, 5915]  safety
//   slot 6  SCH6  [5915, 5925]  urban_rail_priority

inline constexpr int kChannelCount = 7;
inline constexpr double kBandLowEdgeMhz = 5855.0;
inline constexpr double kChannelWidthMhz = 10.0;

struct ChannelId {
  std::uint8_t slot = 4;

  constexpr int index() const { return slot; }
  friend constexpr bool operator==(ChannelId a, ChannelId b) { return a.slot == b.slot; }
  friend constexpr bool operator!=(ChannelId a, ChannelId b) { return a.slot != b.slot; }
  friend constexpr bool operator<(ChannelId a, ChannelId b) { return a.slot < b.slot; }
};

namespace channel {
inline constexpr ChannelId sch3{0};
inline constexpr ChannelId sch4{1};
inline constexpr ChannelId sch1{2};
inline constexpr ChannelId sch2{3};
inline constexpr ChannelId sch0{4};
inline constexpr ChannelId sch5{5};
inline constexpr ChannelId sch6{6};
}  // namespace channel

inline constexpr std::array<const char*, kChannelCount> kSlotNames = {
    "SCH3", "SCH4", "SCH1", "SCH2", "SCH0", "SCH5", "SCH6"};

inline std::string channel_name(ChannelId id) {
  if (id.slot >= kChannelCount) throw std::out_of_range("channel slot out of range");
  return kSlotNames[id.slot];
}

inline ChannelId channel_from_name(const std::string& name) {
  for (int s = 0; s < kChannelCount; ++s) {
    if (name == kSlotNames[s]) return ChannelId{static_cast<std::uint8_t>(s)};
  }
  throw std::invalid_argument("unknown channel name: " + name);
}

enum class ChannelUsage { safety_primary, safety, non_safety, urban_rail_priority };

struct ChannelPlanEntry {
  ChannelId id;
  double low_edge_mhz = 0.0;
  double high_edge_mhz = 0.0;
  ChannelUsage usage = ChannelUsage::safety;
};

class ChannelPlan {
 public:
  ChannelPlan() {
    static constexpr std::array<ChannelUsage, kChannelCount> usage = {
        ChannelUsage::non_safety,     ChannelUsage::non_safety,
        ChannelUsage::safety,         ChannelUsage::safety,
        ChannelUsage::safety_primary, ChannelUsage::safety,
        ChannelUsage::urban_rail_priority};
    for (int s = 0; s < kChannelCount; ++s) {
      entries_[s] = ChannelPlanEntry{ChannelId{static_cast<std::uint8_t>(s)},
                                     kBandLowEdgeMhz + s * kChannelWidthMhz,
                                     kBandLowEdgeMhz + (s + 1) * kChannelWidthMhz, usage[s]};
    }
  }

  const std::array<ChannelPlanEntry, kChannelCount>& entries() const { return entries_; }

  const ChannelPlanEntry& entry(ChannelId id) const {
    if (id.slot >= kChannelCount) throw std::out_of_range("channel slot out of range");
    return entries_[id.slot];
  }

 private:
  std::array<ChannelPlanEntry, kChannelCount> entries_;
};

inline const ChannelPlan& default_channel_plan() {
  static const ChannelPlan plan;
  return plan;
}

// Channels a station may occupy under the plan. The urban-rail channel is
// usable only where rail services are known to be absent.
inline std::array<bool, kChannelCount> usable_channels(const ChannelPlan& plan,
                                                       bool urban_rail_absent) {
  std::array<bool, kChannelCount> ok{};
  for (const auto& e : plan.entries()) {
    ok[e.id.slot] = e.usage != ChannelUsage::urban_rail_priority || urban_rail_absent;
  }
  return ok;
}

}  // namespace mco
