#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace levypoly {

// streaming (count, mean, M2); merge is associative so block order, not
// thread schedule, determines the result
struct MomentAccumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  void merge(const MomentAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double d = o.mean - mean;
    double nn = double(n + o.n);
    mean += d * double(o.n) / nn;
    m2 += o.m2 + d * d * double(n) * double(o.n) / nn;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double sem() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }
};

// Replicas are processed in fixed blocks; whichever thread runs a block, the
// block results are merged in block order, so reported moments do not depend
// on scheduling.
template <typename State>
std::vector<State> parallel_blocks(
    std::uint64_t n_replicas, int n_threads,
    const std::function<void(std::uint64_t replica, State& state)>& body,
    std::uint64_t block_size = 256) {
  if (n_threads <= 0) n_threads = int(std::thread::hardware_concurrency());
  if (n_threads <= 0) n_threads = 1;
  const std::uint64_t n_blocks = (n_replicas + block_size - 1) / block_size;
  std::vector<State> blocks(n_blocks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      std::uint64_t lo = b * block_size;
      std::uint64_t hi = std::min(n_replicas, lo + block_size);
      for (std::uint64_t r = lo; r < hi; ++r) body(r, blocks[b]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return blocks;
}

inline MomentAccumulator parallel_mean(
    std::uint64_t n_replicas, int n_threads,
    const std::function<double(std::uint64_t replica)>& value) {
  auto blocks = parallel_blocks<MomentAccumulator>(
      n_replicas, n_threads,
      [&](std::uint64_t r, MomentAccumulator& acc) { acc.add(value(r)); });
  MomentAccumulator out;
  for (const auto& b : blocks) out.merge(b);
  return out;
}

}  // namespace levypoly
