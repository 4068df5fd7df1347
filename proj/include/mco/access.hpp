#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mco/airtime.hpp"
#include "mco/channel.hpp"
#include "mco/net.hpp"

namespace mco {

struct Mcs {
  double datarate_bps = 6e6;
  double decode_threshold_db = 5.0;
};

struct Ali {
  int id = 0;
  std::string technology = "G5";
  ChannelId channel;
  Mcs mcs;
  double tx_power_dbm = 23.0;
  bool active = true;
};

// Busy-time integrator over a measurement window. Busy covers both sensed
// energy above the detect threshold and this group's own transmissions.
class CbrMeter {
 public:
  void reset(double now) {
    window_start_ = now;
    busy_accum_ = 0.0;
    if (busy_) busy_since_ = now;
  }

  void set_busy(bool b, double now) {
    if (b == busy_) return;
    if (busy_) busy_accum_ += now - busy_since_;
    else busy_since_ = now;
    busy_ = b;
  }

  bool busy() const { return busy_; }
  double busy_since() const { return busy_since_; }

  // Busy fraction of [window_start, now]; restarts the window.
  double close_window(double now) {
    double acc = busy_accum_;
    if (busy_) acc += now - busy_since_;
    double span = now - window_start_;
    double cbr = span > 0.0 ? acc / span : 0.0;
    reset(now);
    return std::min(cbr, 1.0);
  }

 private:
  double window_start_ = 0.0;
  double busy_accum_ = 0.0;
  bool busy_ = false;
  double busy_since_ = 0.0;
};

// One transceiver's ALI group: its members, per-ALI transmit queues, the load
// meter for the tuned channel, and the latest closed measurement.
struct AliGroup {
  int id = 0;
  int transceiver_id = 0;
  std::vector<Ali> alis;
  std::map<int, std::deque<Frame>> queues;
  CbrMeter meter;
  double tuned_since = 0.0;
  double last_cbr = 0.0;

  bool active() const {
    return std::any_of(alis.begin(), alis.end(), [](const Ali& a) { return a.active; });
  }

  ChannelId channel() const {
    for (const auto& a : alis) {
      if (a.active) return a.channel;
    }
    throw std::logic_error("ali group has no active member");
  }

  const Ali& ali(int ali_id) const {
    for (const auto& a : alis) {
      if (a.id == ali_id) return a;
    }
    throw std::out_of_range("no such ali in group");
  }

  std::size_t queued() const {
    std::size_t n = 0;
    for (const auto& [id, q] : queues) n += q.size();
    return n;
  }
};

inline ChannelReport measure_cbr(AliGroup& g, double window_end) {
  ChannelReport r;
  r.channel = g.channel();
  r.cbr = g.meter.close_window(window_end);
  r.timestamp = window_end;
  r.local = true;
  g.last_cbr = r.cbr;
  return r;
}

struct AliCommand {
  enum class Kind { tune, activate, deactivate };
  Kind kind = Kind::tune;
  int transceiver_id = 0;
  int group_id = 0;
  int ali_id = 0;
  ChannelId channel;
  Mcs mcs;
  double tx_power_dbm = 23.0;
};

// Applies one command to the group it addresses. Retuning flushes every queued
// frame; the caller reports them upward as withdrawn.
inline std::vector<Frame> configure_ali_group(AliGroup& g, const AliCommand& cmd,
                                              double now) {
  if (cmd.group_id != g.id) throw std::invalid_argument("command addresses another group");
  std::vector<Frame> flushed;
  switch (cmd.kind) {
    case AliCommand::Kind::tune: {
      bool change = !g.active() || g.channel() != cmd.channel;
      for (auto& a : g.alis) {
        a.channel = cmd.channel;
        a.mcs = cmd.mcs;
        a.tx_power_dbm = cmd.tx_power_dbm;
        a.active = true;
      }
      if (change) {
        for (auto& [id, q] : g.queues) {
          for (auto& f : q) flushed.push_back(std::move(f));
          q.clear();
        }
        g.tuned_since = now;
      }
      break;
    }
    case AliCommand::Kind::activate:
    case AliCommand::Kind::deactivate: {
      bool found = false;
      for (auto& a : g.alis) {
        if (a.id == cmd.ali_id) {
          a.active = cmd.kind == AliCommand::Kind::activate;
          found = true;
        }
      }
      if (!found) throw std::invalid_argument("command addresses a missing ali");
      break;
    }
  }
  return flushed;
}

struct DutyBand {
  double cbr_upper = 1.0;
  double max_duty = 1.0;
};

// Channel-load to duty-cycle mapping. Bands are sorted by load bound and the
// allowance never grows with load, so raising the load can only tighten the
// verdict.
class GatekeeperBands {
 public:
  GatekeeperBands() : GatekeeperBands({{0.30, 0.03}, {0.40, 0.015}, {0.50, 0.01}, {1.0, 0.005}}) {}

  explicit GatekeeperBands(std::vector<DutyBand> bands) : bands_(std::move(bands)) {
    if (bands_.empty()) throw std::invalid_argument("gatekeeper: empty band table");
    for (std::size_t i = 0; i < bands_.size(); ++i) {
      if (bands_[i].max_duty <= 0.0 || bands_[i].max_duty > 1.0)
        throw std::invalid_argument("gatekeeper: duty must be in (0, 1]");
      if (i > 0) {
        if (bands_[i].cbr_upper <= bands_[i - 1].cbr_upper)
          throw std::invalid_argument("gatekeeper: band bounds must be ascending");
        if (bands_[i].max_duty > bands_[i - 1].max_duty)
          throw std::invalid_argument("gatekeeper: duty must not grow with load");
      }
    }
  }

  double duty_for(double cbr) const {
    for (const auto& b : bands_) {
      if (cbr <= b.cbr_upper) return b.max_duty;
    }
    return bands_.back().max_duty;
  }

  const std::vector<DutyBand>& bands() const { return bands_; }

 private:
  std::vector<DutyBand> bands_;
};

// Flat regulatory ceiling; congestion control is left to the upper layers.
inline GatekeeperBands legislative_cap_bands(double duty = 0.10) {
  return GatekeeperBands({{1.0, duty}});
}

// Duty-cycle enforcer in front of the MAC. Admission asks whether the airtime
// already spent in the sliding window plus this frame stays inside the band
// for the current load; a discard leaves no trace in the ledger.
class Gatekeeper {
 public:
  Gatekeeper() = default;
  Gatekeeper(GatekeeperBands bands, double window_s)
      : bands_(std::move(bands)), window_s_(window_s) {}

  bool admit(double airtime_s, double cbr, double now) const {
    return used_in_window(now) + airtime_s <= bands_.duty_for(cbr) * window_s_ + 1e-12;
  }

  void record_tx(double now, double airtime_s) {
    ledger_.emplace_back(now, airtime_s);
    prune(now);
  }

  double used_in_window(double now) const {
    double used = 0.0;
    for (const auto& [t, a] : ledger_) {
      if (t > now - window_s_) used += a;
    }
    return used;
  }

  double window_s() const { return window_s_; }
  const GatekeeperBands& bands() const { return bands_; }

 private:
  void prune(double now) {
    while (!ledger_.empty() && ledger_.front().first <= now - window_s_) ledger_.pop_front();
  }

  GatekeeperBands bands_;
  double window_s_ = 1.0;
  std::deque<std::pair<double, double>> ledger_;
};

struct MacTiming {
  double slot_s = 13e-6;
  double sifs_s = 32e-6;
  int cwmin = 15;
  int cwmax = 1023;

  double aifs_s(int priority) const {
    int extra = priority <= 1 ? 0 : 2 * (priority - 1);
    return sifs_s + (2 + extra) * slot_s;
  }
};

// CSMA timing for one transceiver. The owner senses the medium and drives the
// transitions; this machine only decides when the pending frame may start.
// A frame meeting an idle medium waits out its AIFS and goes; once the medium
// interferes, a backoff is drawn (uniform over [0, CW]) and counts down over
// full idle slots, freezing while busy.
class MacProcess {
 public:
  using DrawFn = std::function<int()>;

  explicit MacProcess(MacTiming timing) : timing_(timing) {}

  bool has_frame() const { return state_ != State::idle; }
  bool transmitting() const { return state_ == State::transmitting; }
  std::uint64_t generation() const { return gen_; }
  int backoff() const { return backoff_; }

  // Hands the next frame to the MAC. Returns the fire time when armed.
  std::optional<double> start_frame(double now, int priority, bool medium_busy, DrawFn draw) {
    if (state_ != State::idle) throw std::logic_error("mac already holds a frame");
    draw_ = std::move(draw);
    aifs_ = timing_.aifs_s(priority);
    backoff_ = -1;
    if (medium_busy) {
      backoff_ = draw_();
      state_ = State::frozen;
      ++gen_;
      return std::nullopt;
    }
    return arm(now);
  }

  void on_busy(double now) {
    if (state_ != State::armed) return;
    if (fire_at_ <= now + 1e-15) return;  // counter already at zero, collision stands
    if (backoff_ < 0) {
      backoff_ = draw_();
    } else {
      double past_aifs = now - aifs_end_;
      if (past_aifs > 0.0) {
        int consumed = static_cast<int>(std::floor(past_aifs / timing_.slot_s + 1e-9));
        backoff_ -= std::min(consumed, backoff_);
      }
    }
    state_ = State::frozen;
    ++gen_;
  }

  std::optional<double> on_idle(double now) {
    if (state_ != State::frozen) return std::nullopt;
    return arm(now);
  }

  bool fire(double now) {
    if (state_ != State::armed) return false;
    if (std::abs(now - fire_at_) > 1e-12) return false;
    state_ = State::transmitting;
    return true;
  }

  void finish_frame() {
    state_ = State::idle;
    draw_ = nullptr;
  }

 private:
  enum class State { idle, armed, frozen, transmitting };

  std::optional<double> arm(double now) {
    aifs_end_ = now + aifs_;
    fire_at_ = aifs_end_ + std::max(backoff_, 0) * timing_.slot_s;
    state_ = State::armed;
    ++gen_;
    return fire_at_;
  }

  MacTiming timing_;
  State state_ = State::idle;
  DrawFn draw_;
  double aifs_ = 0.0;
  double aifs_end_ = 0.0;
  double fire_at_ = 0.0;
  int backoff_ = -1;
  std::uint64_t gen_ = 0;
};

}  // namespace mco
