#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "mco/channel.hpp"
#include "mco/traffic.hpp"

namespace mco {

// One channel-load observation. Local observations come from this station's
// own transceiver groups; remote ones arrive piggybacked on decoded messages.
struct ChannelReport {
  ChannelId channel;
  double cbr = 0.0;
  double timestamp = 0.0;
  int source_station = -1;
  bool local = true;
};

class ChannelView {
 public:
  void set(const ChannelReport& r) { entries_[r.channel.slot] = r; }

  const std::optional<ChannelReport>& get(ChannelId c) const { return entries_[c.slot]; }

  std::optional<double> cbr(ChannelId c) const {
    const auto& e = entries_[c.slot];
    if (!e) return std::nullopt;
    return e->cbr;
  }

  const std::array<std::optional<ChannelReport>, kChannelCount>& entries() const {
    return entries_;
  }

 private:
  std::array<std::optional<ChannelReport>, kChannelCount> entries_;
};

// Per channel, the freshest local report wins; a neighbor report fills in only
// where no usable local one exists. Anything older than the staleness horizon
// is dropped.
inline ChannelView merge_channel_reports(const std::vector<ChannelReport>& local,
                                         const std::vector<ChannelReport>& neighbor,
                                         double now, double staleness_s) {
  ChannelView view;
  auto fresh = [&](const ChannelReport& r) { return now - r.timestamp <= staleness_s; };
  for (const auto& r : neighbor) {
    if (!fresh(r)) continue;
    const auto& cur = view.get(r.channel);
    if (!cur || r.timestamp > cur->timestamp) {
      ChannelReport tagged = r;
      tagged.local = false;
      view.set(tagged);
    }
  }
  for (const auto& r : local) {
    if (!fresh(r)) continue;
    const auto& cur = view.get(r.channel);
    if (!cur || !cur->local || r.timestamp > cur->timestamp) view.set(r);
  }
  return view;
}

struct Frame {
  Message msg;
  int ali_id = -1;
  int group_id = -1;
  ChannelId channel;
  int priority = 0;
  int size_bytes = 0;
  double enqueued_at = 0.0;
  std::vector<ChannelReport> piggyback;
};

struct AliBinding {
  int group_id = -1;
  ChannelId channel;
  std::string technology = "G5";
};

// Down/up adapter between facilities messages and access frames.
class GaghBinding {
 public:
  explicit GaghBinding(int header_bytes = 40) : header_bytes_(header_bytes) {}

  void bind(int ali_id, const AliBinding& b) { bindings_[ali_id] = b; }
  void unbind(int ali_id) { bindings_.erase(ali_id); }

  const std::map<int, AliBinding>& bindings() const { return bindings_; }
  int header_bytes() const { return header_bytes_; }

  // Unbound ALI yields no frame; the caller reports the message as withdrawn.
  std::optional<Frame> route_down(const Message& msg, int ali_id, double now) const {
    auto it = bindings_.find(ali_id);
    if (it == bindings_.end()) return std::nullopt;
    Frame f;
    f.msg = msg;
    f.ali_id = ali_id;
    f.group_id = it->second.group_id;
    f.channel = it->second.channel;
    f.priority = msg.priority;
    f.size_bytes = msg.size_bytes + header_bytes_;
    f.enqueued_at = now;
    return f;
  }

  // Payload passes up unchanged.
  static Message route_up(const Frame& f) { return f.msg; }

 private:
  std::map<int, AliBinding> bindings_;
  int header_bytes_;
};

}  // namespace mco
