#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mco/scenario.hpp"

namespace mco {
namespace presets {

// Single transceiver running the cooperative awareness service alone: CAM on
// the safety channel, nothing to offload, nothing competing.
inline Scenario single_transceiver_cas() {
  Scenario cfg;
  cfg.duration_s = 10.0;
  cfg.warmup_s = 1.0;
  cfg.road.length_m = 1000.0;
  cfg.road.density_veh_per_km = 60.0;
  TemplateSpec t;
  t.name = "vehicle";
  t.transceivers = 1;
  t.gatekeeper = GatekeeperMode::reactive;
  t.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0, channel::sch0, {}});
  cfg.templates = {t};
  return cfg;
}

// Two transceivers, awareness plus collective perception. CPM prefers the
// safety channel and may move to SCH1 once congestion is measured there.
inline Scenario dual_transceiver_offload(double density_veh_per_km = 150.0,
                                         bool offload_enabled = true) {
  Scenario cfg;
  cfg.duration_s = 10.0;
  cfg.warmup_s = 1.0;
  cfg.road.length_m = 2000.0;
  cfg.road.density_veh_per_km = density_veh_per_km;
  TemplateSpec t;
  t.name = "vehicle";
  t.transceivers = 2;
  t.gatekeeper = GatekeeperMode::legislative;
  t.offload_enabled = offload_enabled;
  t.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0, channel::sch0, {}});
  t.flows.push_back(FlowSpec{MsgType::cpm, 10.0, 1000, channel::sch0, {channel::sch1}});
  cfg.templates = {t};
  return cfg;
}

enum class AciArm { baseline, adjacent, separated };

// Highway interference study: a thin tier of stations runs awareness on SCH0
// while the rest of the fleet pushes heavy signal-phase traffic next door,
// hard enough to hold the adjacent channel above 0.6 busy. The baseline arm
// keeps the aggressors placed and tuned but mute, so both arms share every
// placement and backoff draw.
inline Scenario aci_highway(AciArm arm = AciArm::adjacent) {
  Scenario cfg;
  cfg.duration_s = 10.0;
  cfg.warmup_s = 1.0;
  cfg.road.length_m = 2000.0;
  cfg.road.density_veh_per_km = 100.0;

  TemplateSpec victim;
  victim.name = "victim";
  victim.fraction = 0.10;
  victim.transceivers = 1;
  victim.gatekeeper = GatekeeperMode::reactive;
  victim.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0, channel::sch0, {}});

  TemplateSpec aggressor;
  aggressor.name = "aggressor";
  aggressor.fraction = 0.90;
  aggressor.transceivers = 1;
  aggressor.gatekeeper = GatekeeperMode::legislative;
  aggressor.silent = arm == AciArm::baseline;
  ChannelId load_channel = arm == AciArm::separated ? channel::sch1 : channel::sch2;
  aggressor.flows.push_back(FlowSpec{MsgType::spat_map, 25.0, 0, load_channel, {}});
  cfg.templates = {victim, aggressor};
  return cfg;
}

// Mixed fleet: legacy single-channel stations sharing SCH0 with multi-channel
// ones that keep their extra services off the safety channel.
inline Scenario r1_r2_coexistence(double r2_fraction = 0.5) {
  if (r2_fraction < 0.0 || r2_fraction > 1.0)
    throw std::invalid_argument("r2_fraction must be in [0, 1]");
  Scenario cfg;
  cfg.duration_s = 10.0;
  cfg.warmup_s = 1.0;
  cfg.road.length_m = 2000.0;
  cfg.road.density_veh_per_km = 80.0;

  TemplateSpec r1;
  r1.name = "legacy";
  r1.fraction = 1.0 - r2_fraction;
  r1.release = Release::r1;
  r1.offload_enabled = false;
  r1.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0, channel::sch0, {}});

  TemplateSpec r2;
  r2.name = "mco";
  r2.fraction = r2_fraction;
  r2.transceivers = 2;
  r2.gatekeeper = GatekeeperMode::legislative;
  r2.flows.push_back(FlowSpec{MsgType::cam, 10.0, 0, channel::sch0, {}});
  r2.flows.push_back(FlowSpec{MsgType::cpm, 10.0, 1000, channel::sch1, {}});

  cfg.templates = {};
  if (r1.fraction > 0.0) cfg.templates.push_back(r1);
  if (r2.fraction > 0.0) cfg.templates.push_back(r2);
  return cfg;
}

}  // namespace presets

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "single-transceiver-cas", "dual-transceiver-offload", "aci-highway",
      "r1-r2-coexistence"};
  return names;
}

inline Scenario preset_scenario(const std::string& name) {
  if (name == "single-transceiver-cas") return presets::single_transceiver_cas();
  if (name == "dual-transceiver-offload") return presets::dual_transceiver_offload();
  if (name == "aci-highway") return presets::aci_highway();
  if (name == "r1-r2-coexistence") return presets::r1_r2_coexistence();
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown preset: " + name + " (known: " + known + ")");
}

}  // namespace mco
