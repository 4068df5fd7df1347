#pragma once

#include <cmath>
#include <cstdint>

namespace mco {

// Counter-based deterministic randomness. Every draw in the simulator comes
// from a stream keyed by (root seed, purpose, ids), so toggling one feature
// never perturbs draws made elsewhere and runs replay bit-identically.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  station_count = 1,
  station_position,
  station_lane,
  station_template,
  gen_phase,
  msg_size,
  backoff,
  shadowing,
  scenario_case,
};

inline std::uint64_t stream_key(std::uint64_t root, Stream s, std::uint64_t a = 0,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t k = mix64(root ^ 0x6d636f2d726e6700ull);
  k = mix64(k ^ static_cast<std::uint64_t>(s));
  k = mix64(k ^ a);
  k = mix64(k ^ b);
  k = mix64(k ^ c);
  return k;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++n_); }

  // [0, 1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform over [0, bound], bound inclusive
  std::uint32_t next_below_eq(std::uint32_t bound) {
    auto span = static_cast<std::uint64_t>(bound) + 1;
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * span) >> 64);
  }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  int next_int_range(int lo, int hi) {
    return lo + static_cast<int>(next_below_eq(static_cast<std::uint32_t>(hi - lo)));
  }

  // exponential-gap method, safe for large means
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    double acc = 0.0;
    int n = 0;
    while (true) {
      double u = next_unit();
      if (u <= 0.0) u = 0x1.0p-53;
      acc += -std::log(u);
      if (acc > mean) return n;
      ++n;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t n_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mco
