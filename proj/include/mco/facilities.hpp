#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "mco/access.hpp"
#include "mco/airtime.hpp"
#include "mco/channel.hpp"
#include "mco/net.hpp"
#include "mco/traffic.hpp"

namespace mco {

struct Fcp {
  int app_id = 0;
  int flow_id = 0;
  int priority = 1;
  double est_rate_hz = 1.0;
  int est_size_bytes = 0;
  double max_latency_s = 0.1;
  double min_range_m = 0.0;  // carried and logged, not used for admission
  ChannelId preferred_channel;
  std::vector<ChannelId> alternative_channels;

  void validate() const {
    if (est_rate_hz <= 0.0) throw std::invalid_argument("fcp: est_rate_hz must be positive");
    if (max_latency_s <= 0.0) throw std::invalid_argument("fcp: max_latency_s must be positive");
    std::set<int> seen;
    for (ChannelId c : alternative_channels) {
      if (c == preferred_channel)
        throw std::invalid_argument("fcp: preferred channel repeated in alternatives");
      if (!seen.insert(c.slot).second)
        throw std::invalid_argument("fcp: duplicate alternative channel");
    }
  }
};

enum class FclStatus { granted, reduced, denied };

struct Fcl {
  int flow_id = 0;
  double granted_rate_hz = 0.0;
  std::vector<ChannelId> granted_channels;
  int primary_ali_group = -1;
  double airtime_budget_fraction = 0.0;
  FclStatus status = FclStatus::denied;
};

enum class NotifyKind { reduce_rate, discard_low_priority };

struct AppNotification {
  int flow_id = 0;
  NotifyKind kind = NotifyKind::reduce_rate;
  double suggested_rate_hz = 0.0;
};

struct FacilitiesConfig {
  double target_cbr = 0.62;
  double offload_threshold = 0.60;
  double offload_hysteresis = 0.05;
  int escalation_windows = 2;  // consecutive congested windows per ladder step
};

struct AllocationResult {
  Fcl fcl;
  std::vector<AliCommand> commands;
};

// Resource allocation and congestion supervision. The ledger tracks airtime
// committed at admission time per channel; measured load drives an escalation
// ladder whose first resort is a rate reduction and whose second is a request
// to discard the less urgent traffic.
class Bme {
 public:
  Bme(FacilitiesConfig cfg, Mcs default_mcs, double tx_power_dbm, double overhead_s,
      int header_bytes)
      : cfg_(cfg),
        mcs_(default_mcs),
        tx_power_dbm_(tx_power_dbm),
        overhead_s_(overhead_s),
        header_bytes_(header_bytes) {}

  const FacilitiesConfig& config() const { return cfg_; }
  const std::map<int, Fcl>& fcls() const { return fcls_; }
  const ChannelView& view() const { return view_; }

  double committed(ChannelId c) const {
    auto it = committed_.find(c.slot);
    return it == committed_.end() ? 0.0 : it->second;
  }

  double per_message_airtime(const Fcp& fcp) const {
    if (fcp.est_size_bytes <= 0) return 0.0;
    return frame_airtime_s(fcp.est_size_bytes + header_bytes_, mcs_.datarate_bps, overhead_s_);
  }

  AllocationResult allocate(const Fcp& fcp, const std::vector<AliGroup>& lower_caps) {
    fcp.validate();
    release(fcp.flow_id);

    std::vector<ChannelId> wanted;
    wanted.push_back(fcp.preferred_channel);
    wanted.insert(wanted.end(), fcp.alternative_channels.begin(),
                  fcp.alternative_channels.end());

    // Channels a current FCL depends on; groups covering them stay put unless
    // another group still covers the channel after the retune.
    std::map<int, int> cover;
    for (const auto& g : lower_caps) {
      if (g.active()) ++cover[g.channel().slot];
    }
    std::set<int> needed;
    for (const auto& [flow, fcl] : fcls_) {
      if (fcl.status == FclStatus::denied) continue;
      for (ChannelId c : fcl.granted_channels) needed.insert(c.slot);
    }

    std::vector<AliCommand> commands;
    std::vector<ChannelId> granted;
    std::set<int> claimed;
    for (ChannelId c : wanted) {
      bool present = false;
      for (const auto& g : lower_caps) {
        if (g.active() && g.channel() == c) present = true;
      }
      if (present) {
        granted.push_back(c);
        continue;
      }
      const AliGroup* spare = nullptr;
      for (const auto& g : lower_caps) {
        if (claimed.count(g.id)) continue;
        if (g.active()) {
          int slot = g.channel().slot;
          bool releasable = !needed.count(slot) || cover[slot] > 1;
          if (!releasable) continue;
        }
        if (!spare || g.id < spare->id) spare = &g;
      }
      if (!spare) continue;
      claimed.insert(spare->id);
      if (spare->active()) --cover[spare->channel().slot];
      ++cover[c.slot];
      AliCommand cmd;
      cmd.kind = AliCommand::Kind::tune;
      cmd.transceiver_id = spare->transceiver_id;
      cmd.group_id = spare->id;
      cmd.channel = c;
      cmd.mcs = mcs_;
      cmd.tx_power_dbm = tx_power_dbm_;
      commands.push_back(cmd);
      granted.push_back(c);
    }

    Fcl fcl;
    fcl.flow_id = fcp.flow_id;
    if (granted.empty()) {
      fcl.status = FclStatus::denied;
      fcl.granted_channels = {fcp.preferred_channel};
      remember(fcp, fcl);
      return {fcl, {}};
    }

    double airtime = per_message_airtime(fcp);
    ChannelId primary = granted[0];
    double remaining = cfg_.target_cbr - committed(primary);
    double rate = fcp.est_rate_hz;
    if (airtime > 0.0) rate = std::min(rate, remaining / airtime);
    if (rate <= 1e-9) {
      fcl.status = FclStatus::denied;
      fcl.granted_channels = {fcp.preferred_channel};
      remember(fcp, fcl);
      return {fcl, {}};
    }
    fcl.granted_rate_hz = rate;
    fcl.granted_channels = granted;
    fcl.primary_ali_group = group_on(primary, lower_caps, commands);
    fcl.airtime_budget_fraction = rate * airtime;
    fcl.status = rate + 1e-9 >= fcp.est_rate_hz ? FclStatus::granted : FclStatus::reduced;
    committed_[primary.slot] += fcl.airtime_budget_fraction;
    budget_channel_[fcp.flow_id] = primary.slot;
    remember(fcp, fcl);
    return {fcl, commands};
  }

  struct ReportOutcome {
    std::vector<AppNotification> notifications;
    bool episode_active = false;
    std::vector<int> congested_slots;
  };

  ReportOutcome handle_report(const ChannelView& view) {
    for (int s = 0; s < kChannelCount; ++s) {
      ChannelId c{static_cast<std::uint8_t>(s)};
      const auto& prev = view_.get(c);
      const auto& next = view.get(c);
      if (prev && next && next->timestamp + 1e-12 < prev->timestamp)
        throw std::invalid_argument("bme: channel report timestamps must be monotone");
    }
    view_ = view;

    ReportOutcome out;
    auto congested = [&](ChannelId c) {
      auto v = view_.cbr(c);
      return v && *v >= cfg_.offload_threshold;
    };
    for (int s = 0; s < kChannelCount; ++s) {
      if (congested(ChannelId{static_cast<std::uint8_t>(s)})) out.congested_slots.push_back(s);
    }

    std::vector<int> squeezed;
    for (const auto& [flow, fcl] : fcls_) {
      if (fcl.status == FclStatus::denied) continue;
      bool all = true;
      for (ChannelId c : fcl.granted_channels) {
        if (!congested(c)) all = false;
      }
      if (all && !fcl.granted_channels.empty()) squeezed.push_back(flow);
    }

    if (squeezed.empty()) {
      episode_windows_ = 0;
      episode_step_ = 0;
      reduced_this_episode_.clear();
      return out;
    }

    out.episode_active = true;
    ++episode_windows_;
    if (episode_step_ == 0 && episode_windows_ >= cfg_.escalation_windows) {
      episode_step_ = 1;
      int worst = 0;
      for (int f : squeezed) worst = std::max(worst, flow_priority_[f]);
      for (int f : squeezed) {
        if (flow_priority_[f] != worst) continue;
        double& suggestion = rate_suggestion_[f];
        suggestion = std::max(suggestion / 2.0, 0.1);
        out.notifications.push_back({f, NotifyKind::reduce_rate, suggestion});
        reduced_this_episode_.insert(f);
      }
    } else if (episode_step_ == 1 && episode_windows_ >= 2 * cfg_.escalation_windows) {
      episode_step_ = 2;
      std::vector<int> rest;
      for (int f : squeezed) {
        if (!reduced_this_episode_.count(f)) rest.push_back(f);
      }
      if (rest.empty()) rest = squeezed;
      for (int f : rest) out.notifications.push_back({f, NotifyKind::discard_low_priority, 0.0});
    }
    return out;
  }

  // MHE feedback hook: every routing decision is reported here.
  void note_offload(int flow_id) { ++offloads_[flow_id]; }
  void note_withdraw(int flow_id) { ++withdraws_[flow_id]; }
  int offloads(int flow_id) const {
    auto it = offloads_.find(flow_id);
    return it == offloads_.end() ? 0 : it->second;
  }

 private:
  void release(int flow_id) {
    auto it = fcls_.find(flow_id);
    if (it == fcls_.end()) return;
    auto slot = budget_channel_.find(flow_id);
    if (slot != budget_channel_.end()) {
      committed_[slot->second] -= it->second.airtime_budget_fraction;
      budget_channel_.erase(slot);
    }
    fcls_.erase(it);
  }

  void remember(const Fcp& fcp, const Fcl& fcl) {
    fcls_[fcp.flow_id] = fcl;
    flow_priority_[fcp.flow_id] = fcp.priority;
    if (fcl.status != FclStatus::denied && !rate_suggestion_.count(fcp.flow_id))
      rate_suggestion_[fcp.flow_id] = fcl.granted_rate_hz;
  }

  int group_on(ChannelId c, const std::vector<AliGroup>& lower_caps,
               const std::vector<AliCommand>& commands) const {
    for (const auto& cmd : commands) {
      if (cmd.channel == c) return cmd.group_id;
    }
    for (const auto& g : lower_caps) {
      if (g.active() && g.channel() == c) return g.id;
    }
    return -1;
  }

  FacilitiesConfig cfg_;
  Mcs mcs_;
  double tx_power_dbm_;
  double overhead_s_;
  int header_bytes_;
  std::map<int, double> committed_;
  std::map<int, int> budget_channel_;
  std::map<int, Fcl> fcls_;
  std::map<int, int> flow_priority_;
  std::map<int, double> rate_suggestion_;
  ChannelView view_;
  int episode_windows_ = 0;
  int episode_step_ = 0;
  std::set<int> reduced_this_episode_;
  std::map<int, int> offloads_;
  std::map<int, int> withdraws_;
};

enum class Verdict { send_primary, offload, withdraw };
enum class WithdrawReason { latency_expired, no_resources, gatekeeper_preempt };

inline const char* withdraw_reason_name(WithdrawReason r) {
  switch (r) {
    case WithdrawReason::latency_expired: return "latency_expired";
    case WithdrawReason::no_resources: return "no_resources";
    case WithdrawReason::gatekeeper_preempt: return "gatekeeper_preempt";
  }
  return "?";
}

struct RoutingDecision {
  Verdict verdict = Verdict::withdraw;
  ChannelId channel;
  WithdrawReason reason = WithdrawReason::no_resources;
};

// Message routing: send on the primary while it has headroom, spill to the
// first comfortable alternative once the primary saturates, withdraw when
// nothing can carry the message in time. While a discard request from the
// escalation ladder is active, every second message of that flow is dropped
// before it can claim duty-cycle budget.
class Mhe {
 public:
  explicit Mhe(FacilitiesConfig cfg) : cfg_(cfg) {}

  RoutingDecision route(const Message& msg, const Fcl& fcl, const ChannelView& view,
                        double now) {
    if (fcl.status == FclStatus::denied)
      throw std::logic_error("mhe_route called with a denied fcl");
    RoutingDecision d;
    if (now - msg.created_at > msg.latency_budget_s) {
      d.verdict = Verdict::withdraw;
      d.reason = WithdrawReason::latency_expired;
      return d;
    }
    if (discard_active_.count(msg.flow_id) && (++discard_parity_[msg.flow_id] % 2) == 1) {
      d.verdict = Verdict::withdraw;
      d.reason = WithdrawReason::gatekeeper_preempt;
      return d;
    }
    ChannelId primary = fcl.granted_channels.at(0);
    double primary_cbr = view.cbr(primary).value_or(0.0);
    if (!offload_enabled_) {
      d.verdict = Verdict::send_primary;
      d.channel = primary;
      return d;
    }
    if (primary_cbr < cfg_.offload_threshold) {
      d.verdict = Verdict::send_primary;
      d.channel = primary;
      return d;
    }
    for (std::size_t i = 1; i < fcl.granted_channels.size(); ++i) {
      ChannelId alt = fcl.granted_channels[i];
      auto cbr = view.cbr(alt);
      if (cbr && *cbr < cfg_.offload_threshold - cfg_.offload_hysteresis) {
        d.verdict = Verdict::offload;
        d.channel = alt;
        return d;
      }
    }
    d.verdict = Verdict::withdraw;
    d.reason = WithdrawReason::no_resources;
    return d;
  }

  void set_offload_enabled(bool on) { offload_enabled_ = on; }
  void set_discard(int flow_id, bool active) {
    if (active) {
      discard_active_.insert(flow_id);
    } else {
      discard_active_.erase(flow_id);
      discard_parity_.erase(flow_id);
    }
  }
  bool discard_active(int flow_id) const { return discard_active_.count(flow_id) > 0; }

 private:
  FacilitiesConfig cfg_;
  bool offload_enabled_ = true;
  std::set<int> discard_active_;
  std::map<int, int> discard_parity_;
};

// Reception dispatch with at-most-once delivery per message id.
class Mce {
 public:
  std::vector<int> dispatch(const Message& msg,
                            const std::map<MsgType, std::set<int>>& subscriptions) {
    if (!seen_.insert(msg.id).second) return {};
    auto it = subscriptions.find(msg.type);
    if (it == subscriptions.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  std::size_t seen_count() const { return seen_.size(); }

 private:
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace mco
