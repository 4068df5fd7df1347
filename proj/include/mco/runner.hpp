#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mco/engine.hpp"

namespace mco {

// Mean and half-width of the normal-approximation 95% interval. One sample
// has no spread estimate, so its interval collapses to the point.
struct Aggregate {
  int n = 0;
  double mean = 0.0;
  double ci95 = 0.0;
};

inline Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  a.n = static_cast<int>(xs.size());
  if (a.n == 0) return a;
  double sum = 0.0;
  for (double x : xs) sum += x;
  a.mean = sum / a.n;
  if (a.n < 2) return a;
  double ss = 0.0;
  for (double x : xs) ss += (x - a.mean) * (x - a.mean);
  double sd = std::sqrt(ss / (a.n - 1));
  a.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(a.n));
  return a;
}

// Runs one scenario per seed, fanned out over worker threads. Each run owns
// its world; results land in seed order regardless of completion order.
inline std::vector<Metrics> run_seeds(const Scenario& base,
                                      const std::vector<std::uint64_t>& seeds, int jobs = 0) {
  if (seeds.empty()) throw std::invalid_argument("run_seeds: at least one seed");
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  if (jobs > static_cast<int>(seeds.size())) jobs = static_cast<int>(seeds.size());

  std::vector<Metrics> out(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        Scenario cfg = base;
        cfg.seed = seeds[i];
        out[i] = run_scenario(cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace mco
