#pragma once

namespace mco {

// On-air duration of one frame: payload bits at the data rate plus a fixed
// per-frame overhead (preamble, headers, guard).
inline double frame_airtime_s(int size_bytes, double datarate_bps, double overhead_s) {
  return 8.0 * static_cast<double>(size_bytes) / datarate_bps + overhead_s;
}

}  // namespace mco
