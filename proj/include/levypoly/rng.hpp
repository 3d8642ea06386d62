#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace levypoly {

// Counter-based stream RNG. A stream is the SplitMix64 sequence anchored at a
// key derived from (master seed, stream id); output depends only on
// (key, counter), so replicas with distinct ids are independent and
// reproducible regardless of scheduling.
//
// Stream derivation (recorded in run manifests):
//   key   = mix(master ^ mix(stream_id + 0x9E3779B97F4A7C15))
//   out_n = mix(key + n * 0x9E3779B97F4A7C15)
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key_(mix(master_seed ^ mix(stream_id + kGolden))) {}

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGolden); }

  // uniform on the open interval (0,1)
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // inverse-CDF standard normal (Wichura AS241), keeps the draw count at one
  // uniform per normal so paths are reproducible across platforms
  double normal() { return normal_quantile(uniform01()); }

  double exponential() { return -std::log(uniform01()); }

  // exact Poisson; large means are split recursively so the product-of-
  // uniforms inversion never underflows
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    std::uint64_t total = 0;
    while (mean > 30.0) {
      double half = mean / 2.0;
      total += poisson_small(half);
      mean -= half;
    }
    return total + poisson_small(mean);
  }

  static double normal_quantile(double p);

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t poisson_small(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform01();
    while (prod > limit) {
      ++k;
      prod *= uniform01();
    }
    return k;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace levypoly
