#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mco/channel.hpp"

namespace mco {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct PropagationConfig {
  double reference_loss_db = 47.86;  // free-space loss at 1 m, 5.9 GHz
  double path_loss_exponent = 2.3;
  double noise_floor_dbm = -95.0;  // thermal + NF over 10 MHz
  double busy_detect_threshold_dbm = -85.0;
  double sinr_decode_threshold_db = 5.0;
  double shadowing_sigma_db = 0.0;  // log-normal shadowing, 0 disables
};

// Log-distance path loss, clamped below 1 m so the reference point is the
// minimum loss.
inline double path_loss_db(double distance_m, const PropagationConfig& cfg) {
  if (distance_m <= 0.0) throw std::domain_error("path_loss_db: distance must be positive");
  return cfg.reference_loss_db +
         10.0 * cfg.path_loss_exponent * std::log10(std::max(distance_m, 1.0));
}

// Adjacent-channel suppression by slot separation. suppression_db[k] applies
// to |i - j| == k; the last entry extends to larger separations.
class AciProfile {
 public:
  AciProfile() : AciProfile({0.0, 33.0, 65.0}) {}

  explicit AciProfile(std::vector<double> suppression_db, double gap_floor_db = 65.0)
      : suppression_db_(std::move(suppression_db)), gap_floor_db_(gap_floor_db) {
    if (suppression_db_.empty()) throw std::invalid_argument("aci profile: empty table");
    if (suppression_db_[0] != 0.0)
      throw std::invalid_argument("aci profile: co-channel suppression must be 0 dB");
    for (std::size_t k = 1; k < suppression_db_.size(); ++k) {
      if (suppression_db_[k] < suppression_db_[k - 1])
        throw std::invalid_argument("aci profile: suppression must be non-decreasing");
    }
    if (suppression_at(2) < gap_floor_db_)
      throw std::invalid_argument("aci profile: separation >= 2 must reach the gap floor");
  }

  double suppression_at(int separation) const {
    if (separation < 0) throw std::domain_error("aci profile: negative separation");
    auto k = std::min<std::size_t>(separation, suppression_db_.size() - 1);
    return suppression_db_[k];
  }

  const std::vector<double>& table() const { return suppression_db_; }
  double gap_floor_db() const { return gap_floor_db_; }

 private:
  std::vector<double> suppression_db_;
  double gap_floor_db_;
};

inline double aci_attenuation_db(ChannelId tx, ChannelId rx, const AciProfile& profile) {
  return profile.suppression_at(std::abs(tx.index() - rx.index()));
}

struct Interferer {
  double power_dbm = 0.0;
  double attenuation_db = 0.0;
};

// SINR with interferer powers summed in the linear domain after per-interferer
// suppression.
inline double sinr_db(double signal_dbm, const std::vector<Interferer>& interferers,
                      double noise_floor_dbm) {
  double denom_mw = dbm_to_mw(noise_floor_dbm);
  for (const auto& it : interferers) denom_mw += dbm_to_mw(it.power_dbm - it.attenuation_db);
  return signal_dbm - mw_to_dbm(denom_mw);
}

// Threshold is inclusive at the boundary.
inline bool decode_success(double sinr, const PropagationConfig& cfg) {
  return sinr >= cfg.sinr_decode_threshold_db;
}

}  // namespace mco
