#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mco/access.hpp"
#include "mco/channel.hpp"
#include "mco/facilities.hpp"
#include "mco/policy.hpp"
#include "mco/propagation.hpp"
#include "mco/traffic.hpp"

namespace mco {

struct RoadConfig {
  double length_m = 2000.0;
  int lanes = 4;
  double density_veh_per_km = 100.0;
  double speed_mps = 30.0;  // reserved for the motion flag; stations are static by default
};

enum class Release { r1, r2 };

inline std::string release_name(Release r) { return r == Release::r1 ? "R1" : "R2"; }
inline Release release_from_name(const std::string& s) {
  if (s == "R1") return Release::r1;
  if (s == "R2") return Release::r2;
  throw std::invalid_argument("unknown release: " + s);
}

enum class GatekeeperMode { reactive, legislative };

inline std::string gatekeeper_mode_name(GatekeeperMode m) {
  return m == GatekeeperMode::reactive ? "reactive" : "legislative";
}
inline GatekeeperMode gatekeeper_mode_from_name(const std::string& s) {
  if (s == "reactive") return GatekeeperMode::reactive;
  if (s == "legislative") return GatekeeperMode::legislative;
  throw std::invalid_argument("unknown gatekeeper mode: " + s);
}

inline std::string policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::predefined: return "predefined";
    case PolicyKind::sequential: return "sequential";
    case PolicyKind::balanced: return "balanced";
  }
  return "?";
}
inline PolicyKind policy_kind_from_name(const std::string& s) {
  if (s == "predefined") return PolicyKind::predefined;
  if (s == "sequential") return PolicyKind::sequential;
  if (s == "balanced") return PolicyKind::balanced;
  throw std::invalid_argument("unknown channel policy: " + s);
}

struct FlowSpec {
  MsgType type = MsgType::cam;
  double rate_hz = 10.0;
  int size_bytes = 0;  // 0: draw from the profile's size range
  // When preferred is unset the template's channel policy decides.
  std::optional<ChannelId> preferred;
  std::vector<ChannelId> alternatives;
};

struct TemplateSpec {
  std::string name = "default";
  double fraction = 1.0;
  Release release = Release::r2;
  int transceivers = 1;
  PolicyKind channel_policy = PolicyKind::predefined;
  GatekeeperMode gatekeeper = GatekeeperMode::reactive;
  bool offload_enabled = true;
  // Silent stations are placed, allocated, and tuned like any other but never
  // generate traffic; paired experiment arms stay draw-for-draw identical.
  bool silent = false;
  double offload_threshold = -1.0;  // < 0: facilities default
  std::vector<FlowSpec> flows;
};

struct SpectrumConfig {
  PropagationConfig propagation;
  std::vector<double> aci_profile_db = {0.0, 33.0, 65.0};
  double tx_power_dbm = 23.0;
};

struct AccessConfig {
  double datarate_bps = 6e6;
  double overhead_s = 110e-6;
  MacTiming mac;
  double gatekeeper_window_s = 1.0;
  double legislative_duty = 0.10;
};

struct Scenario {
  double duration_s = 10.0;
  std::uint64_t seed = 1;
  double warmup_s = 0.0;
  double cbr_window_s = 0.1;
  double report_staleness_s = 0.5;
  bool urban_rail_absent = false;
  bool trace = false;
  RoadConfig road;
  SpectrumConfig spectrum;
  AccessConfig access;
  FacilitiesConfig facilities;
  int header_bytes = 40;
  std::vector<TemplateSpec> templates = {TemplateSpec{}};

  void validate() const {
    const Catalog catalog = default_catalog();
    if (duration_s < 0.0) throw std::invalid_argument("duration_s must be non-negative");
    if (warmup_s < 0.0) throw std::invalid_argument("warmup_s must be non-negative");
    if (cbr_window_s <= 0.0) throw std::invalid_argument("cbr_window_s must be positive");
    if (road.length_m <= 0.0) throw std::invalid_argument("road.length_m must be positive");
    if (road.lanes < 1) throw std::invalid_argument("road.lanes must be at least 1");
    if (road.density_veh_per_km <= 0.0)
      throw std::invalid_argument("road.density_veh_per_km must be positive");
    if (templates.empty()) throw std::invalid_argument("templates must not be empty");
    AciProfile probe{aci_suppression()};  // validates monotonicity and the gap floor
    (void)probe;
    double total = 0.0;
    for (const auto& t : templates) {
      if (t.fraction < 0.0)
        throw std::invalid_argument("templates." + t.name + ".fraction must be non-negative");
      total += t.fraction;
      if (t.transceivers < 1 || t.transceivers > kChannelCount)
        throw std::invalid_argument("templates." + t.name + ".transceivers out of range");
      if (t.release == Release::r1 && t.transceivers != 1)
        throw std::invalid_argument("templates." + t.name +
                                    ": R1 stations have a single transceiver");
      if (t.flows.size() > 8)
        throw std::invalid_argument("templates." + t.name + ": at most 8 flows per station");
      for (std::size_t i = 0; i < t.flows.size(); ++i) {
        const auto& f = t.flows[i];
        const auto& p = catalog.profile(f.type);
        std::string key = "templates." + t.name + ".flows[" + std::to_string(i) + "]";
        if (f.rate_hz <= 0.0) throw std::invalid_argument(key + ".rate_hz must be positive");
        if (f.rate_hz > p.max_rate_hz + 1e-9)
          throw std::invalid_argument(key + ".rate_hz exceeds the " + msg_type_name(f.type) +
                                      " profile maximum");
        if (f.size_bytes < 0) throw std::invalid_argument(key + ".size_bytes must be non-negative");
        if (f.preferred) {
          for (ChannelId a : f.alternatives) {
            if (a == *f.preferred)
              throw std::invalid_argument(key + ": preferred channel repeated in alternatives");
          }
          if (t.release == Release::r1 && *f.preferred != channel::sch0)
            throw std::invalid_argument(key + ": R1 stations transmit on SCH0 only");
        }
        if (!f.preferred && !f.alternatives.empty())
          throw std::invalid_argument(key + ": alternatives require an explicit preferred channel");
        if (t.release == Release::r1 && !f.alternatives.empty())
          throw std::invalid_argument(key + ": R1 stations have no alternative channels");
      }
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("templates: fractions must sum to 1");
  }

  std::vector<double> aci_suppression() const { return spectrum.aci_profile_db; }

  double expected_station_count() const {
    return road.density_veh_per_km * road.length_m / 1000.0;
  }
};

// Per-flow channel choice for one station, honoring the template's policy.
// Explicit per-flow channels win; otherwise the predefined table or a computed
// assignment over the station's own flows applies.
inline std::vector<ChannelAssignment> resolve_channels(const TemplateSpec& t,
                                                       const Scenario& cfg,
                                                       const Catalog& catalog,
                                                       int station_id) {
  std::vector<ChannelAssignment> out(t.flows.size());
  std::vector<FlowDemand> open;
  std::vector<std::size_t> open_idx;
  for (std::size_t i = 0; i < t.flows.size(); ++i) {
    const auto& f = t.flows[i];
    if (t.release == Release::r1) {
      out[i] = {channel::sch0, {}};
      continue;
    }
    if (f.preferred) {
      out[i] = {*f.preferred, f.alternatives};
      continue;
    }
    const auto& p = catalog.profile(f.type);
    FlowDemand d;
    d.flow_id = static_cast<int>(i);
    d.station_id = station_id;
    d.priority = p.priority;
    int size = f.size_bytes > 0 ? f.size_bytes : p.max_size_bytes;
    d.airtime_fraction =
        f.rate_hz * frame_airtime_s(size + cfg.header_bytes, cfg.access.datarate_bps,
                                    cfg.access.overhead_s);
    d.type = f.type;
    open.push_back(d);
    open_idx.push_back(i);
  }
  if (open.empty()) return out;

  UsagePolicy policy;
  policy.kind = t.channel_policy;
  policy.fill_threshold = cfg.facilities.target_cbr;
  policy.urban_rail_absent = cfg.urban_rail_absent;
  AssociationMap map;
  switch (t.channel_policy) {
    case PolicyKind::predefined:
      map = assign_predefined(open, default_association_table());
      break;
    case PolicyKind::sequential: {
      auto res = assign_sequential(open, policy);
      if (!res.unplaced.empty())
        throw std::invalid_argument("templates." + t.name +
                                    ": sequential policy could not place every flow");
      map = std::move(res.map);
      break;
    }
    case PolicyKind::balanced: {
      std::map<int, int> radios{{station_id, t.transceivers}};
      map = assign_balanced(open, policy_channels(policy), radios);
      break;
    }
  }
  for (std::size_t k = 0; k < open_idx.size(); ++k) out[open_idx[k]] = map.at(open[k].flow_id);
  return out;
}

}  // namespace mco
