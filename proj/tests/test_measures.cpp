#include <cmath>
#include <sstream>

#include "doctest.h"
#include "levypoly/measures.hpp"
#include "levypoly/quadrature.hpp"

using namespace levypoly;

namespace {

// tabulated grid tracking alpha-stable density alpha u^{-1-alpha} exactly
// (log-log interpolation of a pure power law is exact between nodes)
LevyIntensity stable_as_table(double alpha, double lo, double hi, int n) {
  std::vector<double> nodes, dens;
  for (int i = 0; i < n; ++i) {
    double u = lo * std::pow(hi / lo, double(i) / (n - 1));
    nodes.push_back(u);
    dens.push_back(alpha * std::pow(u, -1.0 - alpha));
  }
  std::ostringstream head, tail;
  head << "power " << (-1.0 - alpha);
  tail << "power " << (-1.0 - alpha);
  return LevyIntensity::tabulated(nodes, dens, head.str(), tail.str());
}

}  // namespace

TEST_CASE("kappa closed forms") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  // alpha (a^{1-alpha} - 1)/(alpha - 1) at a = 0.25
  CHECK(lam.kappa(0.25) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(lam.kappa(1.0) == 0.0);
  CHECK(lam.kappa(3.7) == 0.0);

  auto tab = stable_as_table(1.5, 1e-4, 1e4, 61);
  CHECK(tab.kappa(0.25) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("mu closed forms and symbolic divergence") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  CHECK(lam.mu().value == doctest::Approx(3.0).epsilon(1e-13));
  CHECK_FALSE(lam.mu().infinite);
  CHECK(lam.mu(4.0).value == doctest::Approx(3.0 * (1.0 - 0.5)).epsilon(1e-13));

  auto heavy = LevyIntensity::alpha_stable(0.8);
  CHECK(heavy.mu().infinite);
  CHECK_FALSE(heavy.mu(10.0).infinite);
}

TEST_CASE("windowed second moment") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  CHECK(lam.second_moment_mass({0.25, 4.0}) == doctest::Approx(4.5).epsilon(1e-13));
  CHECK_THROWS(TruncationWindow(0.25, 0.25));  // empty window rejected

  auto lam19 = LevyIntensity::alpha_stable(1.9);
  double expect = 19.0 * (1.0 - std::pow(0.01, 0.1));
  CHECK(lam19.second_moment_mass({0.01, 1.0}) ==
        doctest::Approx(expect).epsilon(1e-12));
  // quadrature oracle in w = log u
  auto qr = integrate(
      [&](double w) {
        double u = std::exp(w);
        return u * u * 1.9 * std::pow(u, -2.9) * u;
      },
      std::log(0.01), 0.0, 1e-12);
  CHECK(lam19.second_moment_mass({0.01, 1.0}) ==
        doctest::Approx(qr.value).epsilon(1e-10));
}

TEST_CASE("moment additivity over disjoint mark ranges") {
  auto lam = LevyIntensity::alpha_stable(1.3);
  double a = 0.2, b = 5.0;
  double whole = lam.moment(1.0, a, b).value;
  CHECK(lam.kappa(a) + lam.mu(b).value == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("kappa monotone nonincreasing in a") {
  auto lam = LevyIntensity::alpha_stable(1.7);
  double prev = kInf;
  for (double a : {0.01, 0.05, 0.25, 0.5, 0.9, 1.0, 2.0}) {
    double k = lam.kappa(a);
    CHECK(k <= prev + 1e-15);
    prev = k;
  }
}

TEST_CASE("tabulated matches analytic moments at 1e-8") {
  auto tab = stable_as_table(1.5, 1e-3, 1e3, 41);
  auto lam = LevyIntensity::alpha_stable(1.5);
  CHECK(tab.mass_above(0.25) == doctest::Approx(lam.mass_above(0.25)).epsilon(1e-10));
  CHECK(tab.moment(2.0, 0.25, 4.0).value ==
        doctest::Approx(lam.moment(2.0, 0.25, 4.0).value).epsilon(1e-10));
  CHECK(tab.moment_abslog(2.0, 0.1, 1.0).value ==
        doctest::Approx(lam.moment_abslog(2.0, 0.1, 1.0).value).epsilon(1e-8));
}

TEST_CASE("admissibility across the (alpha, d) grid") {
  for (double alpha : {0.6, 1.1, 1.5, 1.7, 1.9}) {
    auto lam = LevyIntensity::alpha_stable(alpha);
    for (int d : {1, 2, 3, 4}) {
      auto rep = lam.check_admissibility(d);
      double alpha_c = d <= 2 ? 2.0 : 1.0 + 2.0 / d;
      CHECK(rep.alpha_c == doctest::Approx(alpha_c));
      CHECK(rep.hypolarge_ok);
      if (alpha < alpha_c) {
        CHECK(rep.regime == Regime::convergent);
      } else {
        CHECK(rep.regime == Regime::degenerate_to_zero);
      }
    }
  }
  CHECK(LevyIntensity::alpha_stable(1.5).check_admissibility(1).regime ==
        Regime::convergent);
  CHECK(LevyIntensity::alpha_stable(1.9).check_admissibility(3).regime ==
        Regime::degenerate_to_zero);
}

TEST_CASE("heavy log tail fails hypolarge; log-corrected head is undecided") {
  // density u^{-1} (log u)^{-2} above e: finite mass, infinite (log u)^{d/2}
  // moment for d >= 2
  auto heavy = LevyIntensity::tabulated({std::exp(1.0), std::exp(2.0)},
                                        {std::exp(-1.0), 0.25 * std::exp(-2.0)},
                                        "none", "log_power 2.0");
  auto rep2 = heavy.check_admissibility(2);
  CHECK_FALSE(rep2.hypolarge_ok);
  CHECK(rep2.regime == Regime::degenerate_to_infinity);
  CHECK(heavy.check_admissibility(1).hypolarge_ok);  // (log u)^{1/2-2} integrable

  // head density ~ u^{-2-2/d} (log 1/u)^{-g}, d = 3, g in (1, 1 + d/2]:
  // every p < 1+2/d moment diverges but the boundary moment converges
  auto gap = LevyIntensity::tabulated({0.01, 1.0}, {1.0, 1.0}, "log_power -2.6666666666666665 1.5",
                                      "none");
  auto rep3 = gap.check_admissibility(3);
  CHECK_FALSE(rep3.hyposmall_ok);
  CHECK(rep3.hyposmall2_ok);
  CHECK(rep3.regime == Regime::undecided);
}

TEST_CASE("intensity file round trip") {
  auto tab = stable_as_table(1.5, 0.01, 100.0, 9);
  std::ostringstream out;
  tab.save(out);
  std::istringstream in(out.str());
  auto back = LevyIntensity::load(in);
  CHECK(back.mass_above(0.3) == doctest::Approx(tab.mass_above(0.3)).epsilon(1e-14));
  CHECK(back.kappa(0.05) == doctest::Approx(tab.kappa(0.05)).epsilon(1e-14));

  std::istringstream bad("no magic\n1 2\n");
  CHECK_THROWS(LevyIntensity::load(bad));
}

TEST_CASE("restricted sampling matches analytic law") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  RngStream rng(11, 0);
  // tail of the normalized restriction to [a,inf): (a/u)^alpha
  double a = 0.25;
  int n = 100000, above = 0;
  double thr = 1.0;
  for (int i = 0; i < n; ++i)
    if (lam.sample_restricted(a, kInf, 0, rng) > thr) ++above;
  double p = std::pow(a / thr, 1.5);
  double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::fabs(double(above) / n - p) < 4.0 * se);
}

TEST_CASE("tail-integral inequality oracles (Lemmas of the section-4 kind)") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  const double p = 1.75;
  RngStream rng(123, 9);

  SUBCASE("m = 1 closed forms and direction") {
    auto r = tail_bound_upper(lam, 2.0, 1, 0.5, 0.25, p, 0, rng);
    // lhs = int_{[1,2)} u lambda(du) = mu_2
    CHECK(r.lhs == doctest::Approx(lam.mu(2.0).value).epsilon(1e-12));
    CHECK(r.lhs <= r.rhs);

    auto r2 = tail_bound_lower_window(lam, 2.0, 1, 0.5, 0.2, p, 0, rng);
    CHECK(r2.lhs == doctest::Approx(lam.moment(2.0, 0.0, 1.0).value).epsilon(1e-12));
    CHECK(r2.lhs <= r2.rhs);
  }

  SUBCASE("h near 1: constraint set shrinks") {
    auto r = tail_bound_upper(lam, 2.0, 1, 0.999, 0.25, p, 0, rng);
    CHECK(r.lhs < 0.01);
    CHECK(r.rhs > 0.1);
  }

  SUBCASE("m = 3 Monte Carlo estimate stays below the bound") {
    auto r = tail_bound_upper(lam, 4.0, 3, 0.1, 0.2, p, 1000000, rng);
    CHECK(r.lhs + 4.0 * r.lhs_se <= r.rhs);
    CHECK_FALSE(r.variance_flag);
    auto r2 = tail_bound_lower_window(lam, 4.0, 3, 0.1, 0.2, p, 200000, rng);
    CHECK(r2.lhs + 4.0 * r2.lhs_se <= r2.rhs);
  }
}

TEST_CASE("stochastic comparison constants dominate monotone test integrals") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  const double p = 1.75;
  for (double q : {1.0, 2.0, 4.0}) {
    double c1 = compare1_constant(lam, q, p);
    // nondecreasing indicator g = 1{u >= u0}
    for (double u0 : {0.1 * q, 0.5 * q, 0.9 * q}) {
      double lhs = lam.moment(1.0, u0, q).value;
      double rhs = integrate([&](double u) { return std::pow(u, -p); }, u0,
                             2.0 * q, 1e-11)
                       .value;
      CHECK(lhs <= c1 * rhs * (1.0 + 1e-9));
    }
    double c2 = compare2_constant(lam, q, p);
    // nonincreasing indicator g = 1{u <= u0}
    for (double u0 : {0.1 * q, 0.5 * q, 0.9 * q}) {
      double lhs = lam.moment(2.0, 0.0, u0).value;
      double rhs = integrate([&](double u) { return std::pow(u, 1.0 - p); }, 0.0,
                             u0, 1e-11)
                       .value;
      CHECK(lhs <= c2 * rhs * (1.0 + 1e-9));
    }
    // m = 2 product-form check for compare1 with g(u1,u2) = 1{u1>=u0}1{u2>=u0}
    double u0 = 0.4 * q;
    double lhs2 = std::pow(lam.moment(1.0, u0, q).value, 2.0);
    double leb = integrate([&](double u) { return std::pow(u, -p); }, u0, 2.0 * q,
                           1e-11)
                     .value;
    CHECK(lhs2 <= c1 * c1 * leb * leb * (1.0 + 1e-9));
  }
}

TEST_CASE("divergent moment requests are symbolic, never overflow") {
  auto lam = LevyIntensity::alpha_stable(1.5);
  CHECK(lam.moment(2.0, 0.25, kInf).infinite);
  CHECK_THROWS_AS((void)lam.second_moment_mass({0.25, kInf}), std::domain_error);
}
