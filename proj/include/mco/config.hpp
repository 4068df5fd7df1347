#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mco/scenario.hpp"

namespace mco {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Strict mode: every key in the document must be one we interpret, so a typo
// fails loudly with its full path instead of silently taking a default.
inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key: " + path + key);
  }
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for key: " + path + key);
  }
}

inline ChannelId read_channel(const json& j, const std::string& key_path) {
  if (!j.is_string()) throw ConfigError("wrong type for key: " + key_path);
  try {
    return channel_from_name(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key_path + ": " + e.what());
  }
}

template <typename Fn>
auto read_named(const json& j, const std::string& key_path, Fn&& from_name) {
  if (!j.is_string()) throw ConfigError("wrong type for key: " + key_path);
  try {
    return from_name(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key_path + ": " + e.what());
  }
}

inline FlowSpec parse_flow(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("wrong type for key: " + path);
  reject_unknown(j, path + ".",
                 {"type", "rate_hz", "size_bytes", "preferred", "alternatives"});
  FlowSpec f;
  if (auto it = j.find("type"); it != j.end())
    f.type = read_named(*it, path + ".type", msg_type_from_name);
  read(j, path + ".", "rate_hz", f.rate_hz);
  read(j, path + ".", "size_bytes", f.size_bytes);
  if (auto it = j.find("preferred"); it != j.end())
    f.preferred = read_channel(*it, path + ".preferred");
  if (auto it = j.find("alternatives"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("wrong type for key: " + path + ".alternatives");
    for (std::size_t i = 0; i < it->size(); ++i)
      f.alternatives.push_back(
          read_channel((*it)[i], path + ".alternatives[" + std::to_string(i) + "]"));
  }
  return f;
}

inline TemplateSpec parse_template(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("wrong type for key: " + path);
  reject_unknown(j, path + ".",
                 {"name", "fraction", "release", "transceivers", "channel_policy",
                  "gatekeeper", "offload_enabled", "silent", "offload_threshold", "flows"});
  TemplateSpec t;
  read(j, path + ".", "name", t.name);
  read(j, path + ".", "fraction", t.fraction);
  if (auto it = j.find("release"); it != j.end())
    t.release = read_named(*it, path + ".release", release_from_name);
  read(j, path + ".", "transceivers", t.transceivers);
  if (auto it = j.find("channel_policy"); it != j.end())
    t.channel_policy = read_named(*it, path + ".channel_policy", policy_kind_from_name);
  if (auto it = j.find("gatekeeper"); it != j.end())
    t.gatekeeper = read_named(*it, path + ".gatekeeper", gatekeeper_mode_from_name);
  read(j, path + ".", "offload_enabled", t.offload_enabled);
  read(j, path + ".", "silent", t.silent);
  read(j, path + ".", "offload_threshold", t.offload_threshold);
  if (auto it = j.find("flows"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("wrong type for key: " + path + ".flows");
    for (std::size_t i = 0; i < it->size(); ++i)
      t.flows.push_back(parse_flow((*it)[i], path + ".flows[" + std::to_string(i) + "]"));
  }
  return t;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("document root must be an object");
  detail::reject_unknown(doc, "",
                         {"duration_s", "seed", "warmup_s", "cbr_window_s",
                          "report_staleness_s", "urban_rail_absent", "trace", "header_bytes",
                          "road", "spectrum", "access", "facilities", "templates"});

  Scenario cfg;
  detail::read(doc, "", "duration_s", cfg.duration_s);
  detail::read(doc, "", "seed", cfg.seed);
  detail::read(doc, "", "warmup_s", cfg.warmup_s);
  detail::read(doc, "", "cbr_window_s", cfg.cbr_window_s);
  detail::read(doc, "", "report_staleness_s", cfg.report_staleness_s);
  detail::read(doc, "", "urban_rail_absent", cfg.urban_rail_absent);
  detail::read(doc, "", "trace", cfg.trace);
  detail::read(doc, "", "header_bytes", cfg.header_bytes);

  if (auto it = doc.find("road"); it != doc.end()) {
    detail::reject_unknown(*it, "road.", {"length_m", "lanes", "density_veh_per_km", "speed_mps"});
    detail::read(*it, "road.", "length_m", cfg.road.length_m);
    detail::read(*it, "road.", "lanes", cfg.road.lanes);
    detail::read(*it, "road.", "density_veh_per_km", cfg.road.density_veh_per_km);
    detail::read(*it, "road.", "speed_mps", cfg.road.speed_mps);
  }
  if (auto it = doc.find("spectrum"); it != doc.end()) {
    detail::reject_unknown(*it, "spectrum.", {"propagation", "aci_profile_db", "tx_power_dbm"});
    detail::read(*it, "spectrum.", "aci_profile_db", cfg.spectrum.aci_profile_db);
    detail::read(*it, "spectrum.", "tx_power_dbm", cfg.spectrum.tx_power_dbm);
    if (auto p = it->find("propagation"); p != it->end()) {
      auto& pc = cfg.spectrum.propagation;
      detail::reject_unknown(*p, "spectrum.propagation.",
                             {"reference_loss_db", "path_loss_exponent", "noise_floor_dbm",
                              "busy_detect_threshold_dbm", "sinr_decode_threshold_db",
                              "shadowing_sigma_db"});
      detail::read(*p, "spectrum.propagation.", "reference_loss_db", pc.reference_loss_db);
      detail::read(*p, "spectrum.propagation.", "path_loss_exponent", pc.path_loss_exponent);
      detail::read(*p, "spectrum.propagation.", "noise_floor_dbm", pc.noise_floor_dbm);
      detail::read(*p, "spectrum.propagation.", "busy_detect_threshold_dbm",
                   pc.busy_detect_threshold_dbm);
      detail::read(*p, "spectrum.propagation.", "sinr_decode_threshold_db",
                   pc.sinr_decode_threshold_db);
      detail::read(*p, "spectrum.propagation.", "shadowing_sigma_db", pc.shadowing_sigma_db);
    }
  }
  if (auto it = doc.find("access"); it != doc.end()) {
    detail::reject_unknown(*it, "access.",
                           {"datarate_bps", "overhead_s", "mac", "gatekeeper_window_s",
                            "legislative_duty"});
    detail::read(*it, "access.", "datarate_bps", cfg.access.datarate_bps);
    detail::read(*it, "access.", "overhead_s", cfg.access.overhead_s);
    detail::read(*it, "access.", "gatekeeper_window_s", cfg.access.gatekeeper_window_s);
    detail::read(*it, "access.", "legislative_duty", cfg.access.legislative_duty);
    if (auto m = it->find("mac"); m != it->end()) {
      detail::reject_unknown(*m, "access.mac.", {"slot_s", "sifs_s", "cwmin", "cwmax"});
      detail::read(*m, "access.mac.", "slot_s", cfg.access.mac.slot_s);
      detail::read(*m, "access.mac.", "sifs_s", cfg.access.mac.sifs_s);
      detail::read(*m, "access.mac.", "cwmin", cfg.access.mac.cwmin);
      detail::read(*m, "access.mac.", "cwmax", cfg.access.mac.cwmax);
    }
  }
  if (auto it = doc.find("facilities"); it != doc.end()) {
    detail::reject_unknown(*it, "facilities.",
                           {"target_cbr", "offload_threshold", "offload_hysteresis",
                            "escalation_windows"});
    detail::read(*it, "facilities.", "target_cbr", cfg.facilities.target_cbr);
    detail::read(*it, "facilities.", "offload_threshold", cfg.facilities.offload_threshold);
    detail::read(*it, "facilities.", "offload_hysteresis", cfg.facilities.offload_hysteresis);
    detail::read(*it, "facilities.", "escalation_windows", cfg.facilities.escalation_windows);
  }
  if (auto it = doc.find("templates"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("wrong type for key: templates");
    cfg.templates.clear();
    for (std::size_t i = 0; i < it->size(); ++i)
      cfg.templates.push_back(
          detail::parse_template((*it)[i], "templates[" + std::to_string(i) + "]"));
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline json scenario_to_json(const Scenario& cfg) {
  json doc;
  doc["duration_s"] = cfg.duration_s;
  doc["seed"] = cfg.seed;
  doc["warmup_s"] = cfg.warmup_s;
  doc["cbr_window_s"] = cfg.cbr_window_s;
  doc["report_staleness_s"] = cfg.report_staleness_s;
  doc["urban_rail_absent"] = cfg.urban_rail_absent;
  doc["trace"] = cfg.trace;
  doc["header_bytes"] = cfg.header_bytes;
  doc["road"] = {{"length_m", cfg.road.length_m},
                 {"lanes", cfg.road.lanes},
                 {"density_veh_per_km", cfg.road.density_veh_per_km},
                 {"speed_mps", cfg.road.speed_mps}};
  const auto& pc = cfg.spectrum.propagation;
  doc["spectrum"] = {{"propagation",
                      {{"reference_loss_db", pc.reference_loss_db},
                       {"path_loss_exponent", pc.path_loss_exponent},
                       {"noise_floor_dbm", pc.noise_floor_dbm},
                       {"busy_detect_threshold_dbm", pc.busy_detect_threshold_dbm},
                       {"sinr_decode_threshold_db", pc.sinr_decode_threshold_db},
                       {"shadowing_sigma_db", pc.shadowing_sigma_db}}},
                     {"aci_profile_db", cfg.spectrum.aci_profile_db},
                     {"tx_power_dbm", cfg.spectrum.tx_power_dbm}};
  doc["access"] = {{"datarate_bps", cfg.access.datarate_bps},
                   {"overhead_s", cfg.access.overhead_s},
                   {"mac",
                    {{"slot_s", cfg.access.mac.slot_s},
                     {"sifs_s", cfg.access.mac.sifs_s},
                     {"cwmin", cfg.access.mac.cwmin},
                     {"cwmax", cfg.access.mac.cwmax}}},
                   {"gatekeeper_window_s", cfg.access.gatekeeper_window_s},
                   {"legislative_duty", cfg.access.legislative_duty}};
  doc["facilities"] = {{"target_cbr", cfg.facilities.target_cbr},
                       {"offload_threshold", cfg.facilities.offload_threshold},
                       {"offload_hysteresis", cfg.facilities.offload_hysteresis},
                       {"escalation_windows", cfg.facilities.escalation_windows}};
  doc["templates"] = json::array();
  for (const auto& t : cfg.templates) {
    json jt;
    jt["name"] = t.name;
    jt["fraction"] = t.fraction;
    jt["release"] = release_name(t.release);
    jt["transceivers"] = t.transceivers;
    jt["channel_policy"] = policy_kind_name(t.channel_policy);
    jt["gatekeeper"] = gatekeeper_mode_name(t.gatekeeper);
    jt["offload_enabled"] = t.offload_enabled;
    jt["silent"] = t.silent;
    jt["offload_threshold"] = t.offload_threshold;
    jt["flows"] = json::array();
    for (const auto& f : t.flows) {
      json jf;
      jf["type"] = msg_type_name(f.type);
      jf["rate_hz"] = f.rate_hz;
      jf["size_bytes"] = f.size_bytes;
      if (f.preferred) jf["preferred"] = channel_name(*f.preferred);
      if (!f.alternatives.empty()) {
        jf["alternatives"] = json::array();
        for (ChannelId c : f.alternatives) jf["alternatives"].push_back(channel_name(c));
      }
      jt["flows"].push_back(std::move(jf));
    }
    doc["templates"].push_back(std::move(jt));
  }
  return doc;
}

inline std::string emit_scenario(const Scenario& cfg) { return scenario_to_json(cfg).dump(2); }

}  // namespace mco
