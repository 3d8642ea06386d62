#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "levypoly/logvalue.hpp"
#include "levypoly/montecarlo.hpp"
#include "levypoly/rng.hpp"
#include "levypoly/special.hpp"

using namespace levypoly;

TEST_CASE("LogValue arithmetic basics") {
  auto a = LogValue::from_value(3.0);
  auto b = LogValue::from_value(4.0);
  CHECK((a * b).value() == doctest::Approx(12.0).epsilon(1e-14));
  CHECK((a + b).value() == doctest::Approx(7.0).epsilon(1e-14));
  CHECK((b / a).value() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(a.pow(2.5).value() == doctest::Approx(std::pow(3.0, 2.5)).epsilon(1e-14));

  auto z = LogValue::zero();
  CHECK(z.is_zero());
  CHECK((z + a).value() == doctest::Approx(3.0));
  CHECK((z * a).is_zero());

  // huge exponents survive
  auto h = LogValue::from_log(650.0) * LogValue::from_log(-640.0);
  CHECK(h.log() == doctest::Approx(10.0));
}

TEST_CASE("log-sum-exp matches extended precision over 600 log-units") {
  RngStream rng(42, 0);
  const std::size_t n = 1'000'000;
  std::vector<double> logs(n);
  for (auto& v : logs) v = rng.uniform(-300.0, 300.0);

  long double m = -1e400L;
  for (double v : logs) m = std::max<long double>(m, v);
  long double s = 0.0L;
  for (double v : logs) s += expl((long double)v - m);
  long double ref = m + logl(s);

  double got = log_sum_exp(std::span<const double>(logs));
  CHECK(std::fabs(got - double(ref)) / std::fabs(double(ref)) < 1e-12);
}

TEST_CASE("log-sum-exp is permutation stable at 1e-13") {
  RngStream rng(7, 1);
  std::vector<double> logs(5000);
  for (auto& v : logs) v = rng.uniform(-250.0, 250.0);
  double a = log_sum_exp(std::span<const double>(logs));
  std::mt19937_64 g(123);
  std::shuffle(logs.begin(), logs.end(), g);
  double b = log_sum_exp(std::span<const double>(logs));
  CHECK(std::fabs(a - b) / std::fabs(a) < 1e-13);
}

TEST_CASE("stream RNG: reproducible, stream-independent") {
  RngStream a(99, 5), b(99, 5), c(99, 6);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  RngStream a2(99, 5);
  for (int i = 0; i < 16; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);
}

TEST_CASE("normal quantile inverts the normal CDF") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-10}) {
    double z = RngStream::normal_quantile(p);
    CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(RngStream::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("normal draws: moments at MC scale") {
  RngStream rng(2024, 3);
  MomentAccumulator acc;
  for (int i = 0; i < 200000; ++i) acc.add(rng.normal());
  CHECK(std::fabs(acc.mean) < 4.0 * acc.sem());
  CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson: exact mean/variance at small and split-range means") {
  for (double mean : {0.7, 12.0, 250.0}) {
    RngStream rng(5, std::uint64_t(mean * 100));
    MomentAccumulator acc;
    for (int i = 0; i < 40000; ++i) acc.add(double(rng.poisson(mean)));
    CHECK(std::fabs(acc.mean - mean) < 4.0 * acc.sem());
    double var_se = acc.variance() * std::sqrt(2.0 / (acc.n - 1.0)) * 2.0;
    CHECK(std::fabs(acc.variance() - mean) < 4.0 * var_se + 0.05 * mean);
  }
}

TEST_CASE("parallel merge is schedule independent") {
  auto value = [](std::uint64_t r) {
    RngStream rng(31337, r);
    return rng.normal();
  };
  MomentAccumulator one = parallel_mean(20000, 1, value);
  MomentAccumulator four = parallel_mean(20000, 4, value);
  CHECK(one.mean == doctest::Approx(four.mean).epsilon(1e-12));
  CHECK(one.m2 == doctest::Approx(four.m2).epsilon(1e-12));
}

TEST_CASE("chi-square and Kolmogorov tails") {
  // chi2 with k=2 is Exp(1/2): SF(x) = e^{-x/2}
  CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-10));
  CHECK(kolmogorov_sf(0.5) > 0.95);
  CHECK(kolmogorov_sf(2.0) < 1e-3);
}
