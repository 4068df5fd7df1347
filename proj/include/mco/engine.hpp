#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "mco/access.hpp"
#include "mco/airtime.hpp"
#include "mco/channel.hpp"
#include "mco/facilities.hpp"
#include "mco/metrics.hpp"
#include "mco/net.hpp"
#include "mco/propagation.hpp"
#include "mco/rng.hpp"
#include "mco/scenario.hpp"
#include "mco/traffic.hpp"

namespace mco {

// Below this receive power a transmission neither interferes measurably nor
// counts as a candidate link; keeps per-event listener fan-out bounded.
inline constexpr double kCullDbm = -105.0;

enum class EventKind { generate, mac_slot, tx_start, tx_end, cbr_window, report, config };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::generate;
  int station = -1;
  int group = -1;
  int flow = -1;
  std::uint64_t tag = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
  }
};

struct FlowRt {
  int flow_id = 0;
  int local_index = 0;
  Generator gen;
  Fcp fcp;
  Fcl fcl;
};

struct GroupRt {
  Gatekeeper gatekeeper;
  MacProcess mac;
  std::optional<Frame> pending;
  int busy_count = 0;
  std::uint64_t attempt = 0;

  GroupRt(GatekeeperBands bands, double window_s, MacTiming timing)
      : gatekeeper(std::move(bands), window_s), mac(timing) {}
};

struct Station {
  int id;
  double x = 0.0;
  double y = 0.0;
  int tmpl = 0;
  Release release = Release::r2;
  Bme bme;
  Mhe mhe;
  Mce mce;
  GaghBinding gagh;
  std::vector<AliGroup> groups;
  std::vector<GroupRt> rt;
  std::vector<FlowRt> flows;
  ChannelView view;
  ChannelView neighbor_view;
  std::vector<ChannelReport> local_reports;
  std::unordered_set<std::uint64_t> enqueued_ids;
  std::map<MsgType, std::set<int>> subscriptions;
  bool episode_active = false;

  Station(int id_, double x_, double y_, int tmpl_, Release rel, FacilitiesConfig fac,
          Mcs mcs, double tx_power_dbm, double overhead_s, int header_bytes)
      : id(id_), x(x_), y(y_), tmpl(tmpl_), release(rel),
        bme(fac, mcs, tx_power_dbm, overhead_s, header_bytes),
        mhe(fac),
        gagh(header_bytes) {}
};

struct TxListener {
  int station = 0;
  int group = 0;
  int slot = 0;  // listener's tuned slot at tx start
  double rx_dbm = 0.0;
  double intf_mw = 0.0;
  bool busy = false;
  bool own_overlap = false;
};

struct ActiveTx {
  int station = 0;
  int group = 0;
  int slot = 0;
  double start = 0.0;
  double end = 0.0;
  Frame frame;
  std::vector<TxListener> listeners;
};

class World {
 public:
  explicit World(Scenario cfg) : cfg_(std::move(cfg)), aci_(cfg_.spectrum.aci_profile_db) {
    cfg_.validate();
    catalog_ = default_catalog();
    mcs_ = Mcs{cfg_.access.datarate_bps, cfg_.spectrum.propagation.sinr_decode_threshold_db};
    build();
  }

  const std::vector<Station>& stations() const { return stations_; }
  const Scenario& config() const { return cfg_; }

  Metrics run() {
    metrics_.duration_s = cfg_.duration_s;
    metrics_.cbr_window_s = cfg_.cbr_window_s;
    metrics_.seed = cfg_.seed;
    metrics_.station_count = static_cast<int>(stations_.size());
    metrics_.trace_enabled = cfg_.trace;
    metrics_.prr_by_template.resize(cfg_.templates.size());
    log_allocations();
    if (cfg_.duration_s <= 0.0) return metrics_;

    for (auto& s : stations_) {
      if (cfg_.templates[s.tmpl].silent) continue;
      for (auto& f : s.flows) {
        if (f.gen.next_fire_at() <= cfg_.duration_s)
          push(f.gen.next_fire_at(), EventKind::generate, s.id, -1, f.flow_id);
      }
    }
    if (cfg_.cbr_window_s <= cfg_.duration_s)
      push(cfg_.cbr_window_s, EventKind::cbr_window, -1);

    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::generate: on_generate(ev); break;
        case EventKind::mac_slot: on_mac_slot(ev); break;
        case EventKind::tx_end: on_tx_end(ev); break;
        case EventKind::cbr_window: on_cbr_window(ev); break;
        case EventKind::report: on_report(ev); break;
        default: throw std::logic_error("unexpected queued event kind");
      }
    }

    for (const auto& s : stations_) {
      for (const auto& f : s.flows) {
        if (!cfg_.templates[s.tmpl].silent && f.gen.next_fire_at() <= cfg_.duration_s)
          throw std::runtime_error("event queue drained before simulated duration");
      }
      for (const auto& rt : s.rt) {
        if (rt.pending || rt.busy_count != 0)
          throw std::runtime_error("drain left a transceiver occupied");
      }
      for (const auto& g : s.groups) {
        if (g.queued() != 0) throw std::runtime_error("drain left frames queued");
      }
    }
    return metrics_;
  }

 private:
  void build() {
    CounterRng count_rng(stream_key(cfg_.seed, Stream::station_count));
    int n = count_rng.poisson(cfg_.expected_station_count());

    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& t : cfg_.templates) {
      acc += t.fraction;
      cumulative.push_back(acc);
    }

    stations_.reserve(n);
    for (int i = 0; i < n; ++i) {
      CounterRng pos(stream_key(cfg_.seed, Stream::station_position, i));
      CounterRng lane(stream_key(cfg_.seed, Stream::station_lane, i));
      CounterRng pick(stream_key(cfg_.seed, Stream::station_template, i));
      double x = pos.next_unit() * cfg_.road.length_m;
      double y = 3.5 * lane.next_below_eq(cfg_.road.lanes - 1);
      double u = pick.next_unit();
      int tmpl = 0;
      while (tmpl + 1 < static_cast<int>(cumulative.size()) && u >= cumulative[tmpl]) ++tmpl;
      const TemplateSpec& t = cfg_.templates[tmpl];

      FacilitiesConfig fac = cfg_.facilities;
      if (t.offload_threshold >= 0.0) fac.offload_threshold = t.offload_threshold;
      stations_.emplace_back(i, x, y, tmpl, t.release, fac, mcs_, cfg_.spectrum.tx_power_dbm,
                             cfg_.access.overhead_s, cfg_.header_bytes);
      Station& s = stations_.back();
      s.mhe.set_offload_enabled(t.offload_enabled && t.release == Release::r2);
      for (MsgType mt : kAllMsgTypes) s.subscriptions[mt] = {0};

      GatekeeperBands bands = t.gatekeeper == GatekeeperMode::legislative
                                  ? legislative_cap_bands(cfg_.access.legislative_duty)
                                  : GatekeeperBands{};
      for (int g = 0; g < t.transceivers; ++g) {
        AliGroup grp;
        grp.id = g;
        grp.transceiver_id = g;
        Ali a;
        a.id = 0;
        a.channel = channel::sch0;
        a.mcs = mcs_;
        a.tx_power_dbm = cfg_.spectrum.tx_power_dbm;
        a.active = g == 0;
        grp.alis.push_back(a);
        s.groups.push_back(std::move(grp));
        s.rt.emplace_back(bands, cfg_.access.gatekeeper_window_s, cfg_.access.mac);
      }

      auto assignments = resolve_channels(t, cfg_, catalog_, i);
      for (std::size_t k = 0; k < t.flows.size(); ++k) {
        const FlowSpec& spec = t.flows[k];
        TrafficProfile profile = catalog_.profile(spec.type);
        if (spec.size_bytes > 0) {
          profile.min_size_bytes = spec.size_bytes;
          profile.max_size_bytes = spec.size_bytes;
        }
        int flow_id = i * 8 + static_cast<int>(k);

        Fcp fcp;
        fcp.app_id = static_cast<int>(k);
        fcp.flow_id = flow_id;
        fcp.priority = profile.priority;
        fcp.est_rate_hz = spec.rate_hz;
        fcp.est_size_bytes = profile.max_size_bytes;
        fcp.max_latency_s = profile.latency_budget_s;
        fcp.preferred_channel = assignments[k].primary;
        fcp.alternative_channels = assignments[k].alternatives;

        auto res = s.bme.allocate(fcp, s.groups);
        for (const auto& cmd : res.commands) configure_ali_group(s.groups[cmd.group_id], cmd, 0.0);

        FlowRt f{flow_id, static_cast<int>(k),
                 Generator(profile, flow_id, i, spec.rate_hz, cfg_.seed), fcp, res.fcl};
        if (res.fcl.status != FclStatus::denied &&
            res.fcl.granted_rate_hz < spec.rate_hz - 1e-9)
          f.gen.cap_rate(res.fcl.granted_rate_hz);
        s.flows.push_back(std::move(f));
      }
      for (std::size_t g = 0; g < s.groups.size(); ++g) {
        if (s.groups[g].active())
          s.gagh.bind(static_cast<int>(g),
                      AliBinding{static_cast<int>(g), s.groups[g].channel(), "G5"});
      }
    }

    int count = static_cast<int>(stations_.size());
    gain_db_.assign(static_cast<std::size_t>(count) * count, 0.0);
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        double d = std::max(distance(i, j), 1e-3);
        double loss = path_loss_db(d, cfg_.spectrum.propagation);
        if (cfg_.spectrum.propagation.shadowing_sigma_db > 0.0) {
          CounterRng sh(stream_key(cfg_.seed, Stream::shadowing, i, j));
          loss += cfg_.spectrum.propagation.shadowing_sigma_db * sh.normal();
        }
        gain_db_[idx(i, j)] = -loss;
        gain_db_[idx(j, i)] = -loss;
      }
    }
    gain_lin_.resize(gain_db_.size());
    for (std::size_t k = 0; k < gain_db_.size(); ++k) gain_lin_[k] = db_to_linear(gain_db_[k]);
    txp_mw_ = dbm_to_mw(cfg_.spectrum.tx_power_dbm);
    for (int sep = 0; sep < kChannelCount; ++sep)
      supp_lin_[sep] = db_to_linear(-aci_.suppression_at(sep));

    for (const auto& s : stations_) {
      for (std::size_t g = 0; g < s.groups.size(); ++g) {
        if (s.groups[g].active())
          listeners_[s.groups[g].channel().slot].push_back({s.id, static_cast<int>(g)});
      }
    }
  }

  void log_allocations() {
    for (const auto& s : stations_) {
      for (const auto& f : s.flows) {
        FclRecord r;
        r.time = 0.0;
        r.station = s.id;
        r.flow_id = f.flow_id;
        r.status = f.fcl.status;
        r.granted_rate_hz = f.fcl.granted_rate_hz;
        r.channels = f.fcl.granted_channels;
        metrics_.fcl_log.push_back(r);
        if (cfg_.trace) {
          trace(0.0, "fcp_request", s.id,
                "\"flow\":" + std::to_string(f.flow_id) + ",\"type\":\"" +
                    msg_type_name(f.gen.profile().type) + "\",\"rate_hz\":" +
                    format_double(f.fcp.est_rate_hz) + ",\"min_range_m\":" +
                    format_double(f.fcp.min_range_m));
          std::string chs;
          for (ChannelId c : f.fcl.granted_channels) chs += channel_name(c) + ",";
          trace(0.0, "fcl_grant", s.id,
                "\"flow\":" + std::to_string(f.flow_id) + ",\"status\":" +
                    std::to_string(static_cast<int>(f.fcl.status)) + ",\"granted_rate_hz\":" +
                    format_double(f.fcl.granted_rate_hz) + ",\"channels\":\"" + chs + "\"");
        }
      }
    }
  }

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * stations_.size() + j; }

  double distance(int i, int j) const {
    return std::hypot(stations_[i].x - stations_[j].x, stations_[i].y - stations_[j].y);
  }

  static std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void push(double time, EventKind kind, int station, int group = -1, int flow = -1,
            std::uint64_t tag = 0) {
    queue_.push(Event{time, seq_++, kind, station, group, flow, tag});
  }

  void trace(double t, const char* kind, int station, const std::string& payload) {
    if (!cfg_.trace) return;
    metrics_.trace.push_back({t, kind, station, payload});
  }

  FlowRt& flow_by_id(Station& s, int flow_id) { return s.flows[flow_id % 8]; }

  int group_for(const Station& s, ChannelId c) const {
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
      if (s.groups[g].active() && s.groups[g].channel() == c) return static_cast<int>(g);
    }
    return -1;
  }

  void on_generate(const Event& ev) {
    Station& s = stations_[ev.station];
    FlowRt& f = flow_by_id(s, ev.flow);
    if (std::abs(ev.time - f.gen.next_fire_at()) > 1e-9) {
      if (f.gen.next_fire_at() <= cfg_.duration_s)
        push(f.gen.next_fire_at(), EventKind::generate, s.id, -1, f.flow_id);
      return;
    }
    Message msg = f.gen.generate(now_);
    auto& counters = metrics_.flows[f.flow_id];
    if (counters.generated == 0) {
      counters.station = s.id;
      counters.type = msg.type;
    }
    ++counters.generated;

    route_message(s, f, msg);

    if (f.gen.next_fire_at() <= cfg_.duration_s)
      push(f.gen.next_fire_at(), EventKind::generate, s.id, -1, f.flow_id);
  }

  void route_message(Station& s, FlowRt& f, const Message& msg) {
    auto& counters = metrics_.flows[f.flow_id];
    if (f.fcl.status == FclStatus::denied) {
      ++counters.withdrawn_no_resources;
      s.bme.note_withdraw(f.flow_id);
      if (cfg_.trace)
        trace(now_, "withdraw", s.id,
              "\"flow\":" + std::to_string(f.flow_id) + ",\"reason\":\"no_resources\"");
      return;
    }
    RoutingDecision d = s.mhe.route(msg, f.fcl, s.view, now_);
    if (d.verdict == Verdict::withdraw) {
      switch (d.reason) {
        case WithdrawReason::latency_expired: ++counters.withdrawn_latency; break;
        case WithdrawReason::no_resources: ++counters.withdrawn_no_resources; break;
        case WithdrawReason::gatekeeper_preempt: ++counters.withdrawn_preempt; break;
      }
      s.bme.note_withdraw(f.flow_id);
      if (cfg_.trace)
        trace(now_, "withdraw", s.id,
              "\"flow\":" + std::to_string(f.flow_id) + ",\"reason\":\"" +
                  std::string(withdraw_reason_name(d.reason)) + "\"");
      return;
    }
    if (d.verdict == Verdict::offload) {
      s.bme.note_offload(f.flow_id);
      if (cfg_.trace)
        trace(now_, "offload", s.id,
              "\"flow\":" + std::to_string(f.flow_id) + ",\"channel\":\"" +
                  channel_name(d.channel) + "\"");
    }
    int g = group_for(s, d.channel);
    if (g < 0) {
      ++counters.withdrawn_no_resources;
      s.bme.note_withdraw(f.flow_id);
      return;
    }
    auto frame = s.gagh.route_down(msg, g, now_);
    if (!frame) {
      ++counters.withdrawn_no_resources;
      s.bme.note_withdraw(f.flow_id);
      return;
    }
    if (!s.enqueued_ids.insert(msg.id).second)
      throw std::logic_error("message bound to more than one ALI");
    frame->piggyback = s.local_reports;
    s.groups[g].queues[frame->priority].push_back(std::move(*frame));
    if (!s.rt[g].pending) try_dequeue(s, g, false);
  }

  void try_dequeue(Station& s, int g, bool post_tx) {
    AliGroup& grp = s.groups[g];
    GroupRt& rt = s.rt[g];
    if (rt.pending || !grp.active()) return;
    while (true) {
      Frame* next = nullptr;
      for (auto& [prio, q] : grp.queues) {
        if (!q.empty()) {
          next = &q.front();
          break;
        }
      }
      if (!next) return;
      Frame frame = std::move(*next);
      grp.queues[frame.priority].pop_front();

      auto& counters = metrics_.flows[frame.msg.flow_id];
      if (now_ - frame.msg.created_at > frame.msg.latency_budget_s) {
        ++counters.withdrawn_latency;
        if (cfg_.trace)
          trace(now_, "withdraw", s.id,
                "\"flow\":" + std::to_string(frame.msg.flow_id) +
                    ",\"reason\":\"latency_expired\"");
        continue;
      }
      double airtime = frame_airtime_s(frame.size_bytes, cfg_.access.datarate_bps,
                                       cfg_.access.overhead_s);
      if (!rt.gatekeeper.admit(airtime, grp.last_cbr, now_)) {
        ++counters.gatekeeper_discarded;
        if (cfg_.trace)
          trace(now_, "gatekeeper_discard", s.id,
                "\"flow\":" + std::to_string(frame.msg.flow_id));
        continue;
      }
      std::uint64_t msg_id = frame.msg.id;
      int priority = frame.priority;
      rt.pending = std::move(frame);
      rt.attempt = 0;
      auto draw = [this, &rt, msg_id]() {
        CounterRng r(stream_key(cfg_.seed, Stream::backoff, msg_id, rt.attempt++));
        return static_cast<int>(r.next_below_eq(cfg_.access.mac.cwmin));
      };
      bool busy = post_tx || rt.busy_count > 0;
      auto fire = rt.mac.start_frame(now_, priority, busy, draw);
      if (post_tx && rt.busy_count == 0) fire = rt.mac.on_idle(now_);
      if (fire) push(*fire, EventKind::mac_slot, s.id, g, -1, rt.mac.generation());
      return;
    }
  }

  void on_mac_slot(const Event& ev) {
    Station& s = stations_[ev.station];
    GroupRt& rt = s.rt[ev.group];
    if (ev.tag != rt.mac.generation()) return;
    if (!rt.mac.fire(now_)) return;
    begin_tx(s, ev.group);
  }

  void begin_tx(Station& s, int g) {
    GroupRt& rt = s.rt[g];
    const Frame& frame = *rt.pending;
    int slot = s.groups[g].channel().slot;
    double airtime = frame_airtime_s(frame.size_bytes, cfg_.access.datarate_bps,
                                     cfg_.access.overhead_s);
    rt.gatekeeper.record_tx(now_, airtime);

    auto& counters = metrics_.flows[frame.msg.flow_id];
    FlowRt& flow = flow_by_id(s, frame.msg.flow_id);
    if (frame.channel == flow.fcl.granted_channels[0]) ++counters.sent;
    else ++counters.offloaded;
    if (cfg_.trace)
      trace(now_, "tx_start", s.id,
            "\"flow\":" + std::to_string(frame.msg.flow_id) + ",\"channel\":\"" +
                channel_name(frame.channel) + "\",\"size\":" + std::to_string(frame.size_bytes));

    std::uint64_t id = next_tx_++;
    ActiveTx tx;
    tx.station = s.id;
    tx.group = g;
    tx.slot = slot;
    tx.start = now_;
    tx.end = now_ + airtime;
    tx.frame = frame;

    double txp = cfg_.spectrum.tx_power_dbm;
    for (int r = 0; r < kChannelCount; ++r) {
      double supp = aci_.suppression_at(std::abs(slot - r));
      for (auto [li, lg] : listeners_[r]) {
        if (li == s.id) continue;
        double rx = txp - supp + gain_db_[idx(s.id, li)];
        if (rx < kCullDbm) continue;
        TxListener l;
        l.station = li;
        l.group = lg;
        l.slot = r;
        l.rx_dbm = rx;
        l.busy = rx >= cfg_.spectrum.propagation.busy_detect_threshold_dbm;
        l.own_overlap = stations_[li].rt[lg].mac.transmitting();
        for (const auto& [oid, other] : active_) {
          if (other.station == li) continue;
          l.intf_mw += txp_mw_ * supp_lin_[std::abs(other.slot - r)] *
                       gain_lin_[idx(other.station, li)];
        }
        tx.listeners.push_back(l);
        if (l.busy) busy_up(stations_[li], lg);
      }
    }
    for (auto& [oid, other] : active_) {
      for (auto& l : other.listeners) {
        if (l.station == s.id) {
          if (other.slot == slot) l.own_overlap = true;
          continue;
        }
        l.intf_mw += txp_mw_ * supp_lin_[std::abs(slot - l.slot)] *
                     gain_lin_[idx(s.id, l.station)];
      }
    }

    busy_up(s, g);
    active_.emplace(id, std::move(tx));
    push(now_ + airtime, EventKind::tx_end, s.id, g, -1, id);
  }

  void on_tx_end(const Event& ev) {
    auto it = active_.find(ev.tag);
    if (it == active_.end()) throw std::logic_error("tx_end without an active transmission");
    ActiveTx tx = std::move(it->second);
    active_.erase(it);

    Station& s = stations_[tx.station];
    GroupRt& rt = s.rt[tx.group];
    rt.mac.finish_frame();
    rt.pending.reset();
    busy_down(s, tx.group);

    double noise_mw = dbm_to_mw(cfg_.spectrum.propagation.noise_floor_dbm);
    bool counted = tx.start >= cfg_.warmup_s;
    auto& tmpl_bins = metrics_.prr_by_template[s.tmpl];
    for (const auto& l : tx.listeners) {
      Station& rxer = stations_[l.station];
      const AliGroup& grp = rxer.groups[l.group];
      if (!grp.active() || grp.channel().slot != tx.slot || grp.tuned_since > tx.start + 1e-12)
        continue;
      double d = distance(tx.station, l.station);
      int bin = static_cast<int>(d / kBinWidthM);
      int type = static_cast<int>(tx.frame.msg.type);
      if (counted && bin < kBinCount) {
        ++metrics_.prr[type][bin].attempts;
        ++tmpl_bins[type][bin].attempts;
      }

      bool received = l.rx_dbm >= cfg_.spectrum.propagation.noise_floor_dbm +
                                      mcs_.decode_threshold_db;
      double sinr = l.rx_dbm - mw_to_dbm(l.intf_mw + noise_mw);
      bool decoded = received && !l.own_overlap && sinr >= mcs_.decode_threshold_db;
      if (received) ++metrics_.received;
      if (decoded) {
        ++metrics_.decoded;
        if (counted && bin < kBinCount) {
          ++metrics_.prr[type][bin].decoded;
          ++tmpl_bins[type][bin].decoded;
        }
        for (const auto& r : tx.frame.piggyback) {
          const auto& cur = rxer.neighbor_view.get(r.channel);
          if (!cur || r.timestamp > cur->timestamp) rxer.neighbor_view.set(r);
        }
        rxer.mce.dispatch(tx.frame.msg, rxer.subscriptions);
      }
    }
    for (const auto& l : tx.listeners) {
      if (l.busy) busy_down(stations_[l.station], l.group);
    }
    try_dequeue(s, tx.group, true);
  }

  void busy_up(Station& s, int g) {
    GroupRt& rt = s.rt[g];
    if (++rt.busy_count == 1) {
      s.groups[g].meter.set_busy(true, now_);
      rt.mac.on_busy(now_);
    }
  }

  void busy_down(Station& s, int g) {
    GroupRt& rt = s.rt[g];
    if (rt.busy_count <= 0) throw std::logic_error("busy count underflow");
    if (--rt.busy_count == 0) {
      s.groups[g].meter.set_busy(false, now_);
      auto fire = rt.mac.on_idle(now_);
      if (fire) push(*fire, EventKind::mac_slot, s.id, g, -1, rt.mac.generation());
    }
  }

  void on_cbr_window(const Event&) {
    std::int64_t w = static_cast<std::int64_t>(std::llround(now_ / cfg_.cbr_window_s));
    for (auto& s : stations_) {
      s.local_reports.clear();
      for (std::size_t g = 0; g < s.groups.size(); ++g) {
        if (!s.groups[g].active()) continue;
        ChannelReport r = measure_cbr(s.groups[g], now_);
        r.source_station = s.id;
        s.local_reports.push_back(r);
        if (now_ > cfg_.warmup_s + 1e-12) metrics_.add_cbr_sample(r.channel, w, r.cbr);
      }
    }
    push(now_, EventKind::report, -1);
    double next = (w + 1) * cfg_.cbr_window_s;
    if (next <= cfg_.duration_s + 1e-9) push(next, EventKind::cbr_window, -1);
  }

  void on_report(const Event&) {
    for (auto& s : stations_) {
      std::vector<ChannelReport> neighbor;
      for (int slot = 0; slot < kChannelCount; ++slot) {
        const auto& e = s.neighbor_view.get(ChannelId{static_cast<std::uint8_t>(slot)});
        if (e) neighbor.push_back(*e);
      }
      s.view = merge_channel_reports(s.local_reports, neighbor, now_, cfg_.report_staleness_s);
      auto outcome = s.bme.handle_report(s.view);
      for (const auto& n : outcome.notifications) {
        FlowRt& f = flow_by_id(s, n.flow_id);
        if (n.kind == NotifyKind::reduce_rate) {
          double applied = f.gen.adapt_rate(n.suggested_rate_hz);
          trace(now_, "reduce_rate", s.id,
                "\"flow\":" + std::to_string(n.flow_id) + ",\"suggested_hz\":" +
                    format_double(n.suggested_rate_hz) + ",\"applied_hz\":" +
                    format_double(applied));
        } else {
          s.mhe.set_discard(n.flow_id, true);
          trace(now_, "discard_low_priority", s.id, "\"flow\":" + std::to_string(n.flow_id));
        }
      }
      if (!outcome.episode_active) {
        for (auto& f : s.flows) {
          if (s.mhe.discard_active(f.flow_id)) s.mhe.set_discard(f.flow_id, false);
        }
        if (s.episode_active) trace(now_, "episode_end", s.id, "");
      }
      s.episode_active = outcome.episode_active;
    }
  }

  Scenario cfg_;
  Catalog catalog_;
  AciProfile aci_;
  Mcs mcs_;
  std::vector<Station> stations_;
  std::vector<double> gain_db_;
  std::vector<double> gain_lin_;
  std::array<double, kChannelCount> supp_lin_{};
  double txp_mw_ = 0.0;
  std::array<std::vector<std::pair<int, int>>, kChannelCount> listeners_;
  std::map<std::uint64_t, ActiveTx> active_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_tx_ = 0;
  double now_ = 0.0;
  Metrics metrics_;
};

inline Metrics run_scenario(const Scenario& cfg) {
  World world(cfg);
  return world.run();
}

}  // namespace mco
