#include "levypoly/stats.hpp"

#include <algorithm>
#include <cmath>

#include "levypoly/kernel.hpp"
#include "levypoly/quadrature.hpp"
#include "levypoly/special.hpp"

namespace levypoly {

namespace {

double sup_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

double degeneracy_Y(const PointCloud& cloud, double a, double R_a) {
  const int d = cloud.d;
  double y = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double t = cloud.t[i], u = cloud.mark[i];
    if (t > 1.0) continue;
    const double r = sup_norm(cloud.pos(i));
    if (d == 1) {
      if (u >= a && u < 1.0 && r <= R_a) y += u;
    } else if (d == 2) {
      if (u >= a && u < 1.0 && r <= R_a * std::sqrt(t)) y += u / std::max(t, u);
    } else {
      if (r <= R_a * std::sqrt(t) && u >= std::max(a, std::pow(t, 0.5 * d)))
        y += 1.0;
    }
  }
  return y;
}

YMoments degeneracy_Y_moments(const LevyIntensity& lam, double a, double R_a,
                              int d, double beta) {
  YMoments m;
  if (d == 1) {
    double m1 = lam.moment(1.0, a, 1.0).require_finite("Y d=1 mean");
    double m2 = lam.moment(2.0, a, 1.0).require_finite("Y d=1 var");
    m.mean = 2.0 * R_a * m1;
    m.variance = 2.0 * R_a * m2;
    m.q_a = integrate([&](double t) { return normal_abs_cdf(R_a / std::sqrt(t)); },
                      0.0, 1.0, 1e-10)
                .value;
    m.size_biased_mean = m.mean + beta * m.q_a * m2;
  } else if (d == 2) {
    double m1 = lam.moment(1.0, a, 1.0).require_finite("Y d=2 mean");
    double m2 = lam.moment(2.0, a, 1.0).require_finite("Y d=2 var");
    double m2l = lam.moment_abslog(2.0, a, 1.0).require_finite("Y d=2 var");
    const double vol = 4.0 * R_a * R_a;
    m.mean = vol * (m1 - 0.5 * m2);           // int_0^1 t/(t v u) dt = 1 - u/2
    m.variance = vol * (0.5 * m2 + m2l);      // int_0^1 t/(t v u)^2 dt = 1/2 + log(1/u)
    m.q_a = std::pow(normal_abs_cdf(R_a), 2.0);
    m.size_biased_mean = m.mean + beta * m.q_a * (m2 + m2l);  // int dt/(t v u) = 1 + log(1/u)
  } else {
    auto tail = [&](double t) {
      return std::pow(t, 0.5 * d) *
             lam.mass_above(std::max(a, std::pow(t, 0.5 * d)));
    };
    double base = integrate(tail, 0.0, 1.0, 1e-10).value;
    m.mean = std::pow(2.0 * R_a, d) * base;
    m.variance = m.mean;  // Poisson count
    auto m_a = integrate(
        [&](double t) {
          return lam.moment(1.0, std::max(a, std::pow(t, 0.5 * d)), kInf)
              .require_finite("Y d>=3 size-biased");
        },
        0.0, 1.0, 1e-10);
    m.q_a = std::pow(normal_abs_cdf(R_a), double(d));
    m.size_biased_mean = m.mean + beta * m.q_a * m_a.value;
  }
  return m;
}

double default_R_a(const LevyIntensity& lam, double a, int d) {
  if (d == 1)
    return std::sqrt(lam.moment(2.0, a, 1.0).require_finite("R_a d=1"));
  if (d == 2)
    return std::pow(lam.moment_abslog(2.0, a, 1.0).require_finite("R_a d=2"), 0.25);
  double base = integrate(
                    [&](double t) {
                      return std::pow(t, 0.5 * d) *
                             lam.mass_above(std::max(a, std::pow(t, 0.5 * d)));
                    },
                    0.0, 1.0, 1e-10)
                    .value;
  return std::pow(base, 1.0 / (2.0 * d));
}

SeparationReport size_biased_shift_test(const LevyIntensity& lam, double beta,
                                        const std::vector<double>& levels, int d,
                                        double L, int n_replicas,
                                        std::uint64_t seed) {
  SeparationReport rep;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double a = levels[li];
    const double R_a = default_R_a(lam, a, d);
    const double Lbox = std::max(L, R_a);
    YMoments closed = degeneracy_Y_moments(lam, a, R_a, d, beta);

    double mp = 0.0, vp = 0.0, mb = 0.0, vb = 0.0;
    RngStream aug_rng(seed, 0xB1A5 + li);
    for (int r = 0; r < n_replicas; ++r) {
      PointCloud plain = sample_cloud(lam, 1.0, Lbox, a, d,
                                      seed + 7919 * (li + 1) + 2 * r);
      double yp = degeneracy_Y(plain, a, R_a);
      double dl = yp - mp;
      mp += dl / (r + 1);
      vp += dl * (yp - mp);

      PointCloud base = sample_cloud(lam, 1.0, Lbox, a, d,
                                     seed + 7919 * (li + 1) + 2 * r + 1);
      SizeBiasedSample sb = size_biased_augment(base, beta, a, aug_rng);
      double yb = degeneracy_Y(sb.cloud, a, R_a);
      double db = yb - mb;
      mb += db / (r + 1);
      vb += db * (yb - mb);
    }
    vp /= std::max(1, n_replicas - 1);
    vb /= std::max(1, n_replicas - 1);
    SeparationRow row;
    row.a = a;
    row.y_mean_plain = mp;
    row.y_mean_biased = mb;
    row.separation = (mb - mp) * (mb - mp) / std::max(vp + vb, 1e-300);
    row.closed_form_biased_mean = closed.size_biased_mean;
    rep.rows.push_back(row);
  }
  return rep;
}

double blowup_lambda_j(const LevyIntensity& lam, int d, int j) {
  const double vol =
      0.5 * std::pow(2.0, double(d) * (j + 1)) * (1.0 - std::pow(2.0, -double(d)));
  return vol * lam.mass_above_log(std::pow(4.0, double(j + 1)));
}

std::vector<BlowupRow> blowup_events(const LevyIntensity& lam, int d, int j_max,
                                     double a_min, int n_clouds,
                                     std::uint64_t seed) {
  const double L = std::pow(2.0, double(j_max));
  std::vector<std::uint64_t> hits(std::size_t(j_max) + 1, 0);
  for (int c = 0; c < n_clouds; ++c) {
    PointCloud cloud = sample_cloud(lam, 1.0, L, a_min, d, seed + c);
    std::vector<bool> seen(std::size_t(j_max) + 1, false);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud.t[i] < 0.5) continue;
      double r = sup_norm(cloud.pos(i));
      if (r <= 0.0) continue;
      int j = int(std::floor(std::log2(r))) + 1;
      if (j < 1 || j > j_max) continue;
      if (std::log(cloud.mark[i]) >= std::pow(4.0, double(j + 1))) seen[j] = true;
    }
    for (int j = 1; j <= j_max; ++j)
      if (seen[j]) ++hits[j];
  }
  std::vector<BlowupRow> rows;
  for (int j = 1; j <= j_max; ++j) {
    BlowupRow row;
    row.j = j;
    row.lambda_j = blowup_lambda_j(lam, d, j);
    row.predicted_prob = -std::expm1(-row.lambda_j);
    row.empirical_prob = double(hits[j]) / double(n_clouds);
    row.n_clouds = n_clouds;
    rows.push_back(row);
  }
  return rows;
}

double entropy_energy_sup(const CloudView& view, double eps) {
  const std::size_t n = view.size();
  if (n == 0) return -kInf;
  const int d = view.dim();
  std::vector<double> M(n);
  double best = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double logu = std::log(view.mark_at(i));
    double d2 = 0.0;
    for (int k = 0; k < d; ++k) d2 += view.pos(i)[k] * view.pos(i)[k];
    double m = logu - 0.5 * eps * d2 / view.time(i);
    for (std::size_t j = 0; j < i; ++j) {
      double dd = 0.0;
      for (int k = 0; k < d; ++k) {
        double dx = view.pos(i)[k] - view.pos(j)[k];
        dd += dx * dx;
      }
      m = std::max(m, M[j] + logu -
                          0.5 * eps * dd / (view.time(i) - view.time(j)));
    }
    M[i] = m;
    best = std::max(best, m);
  }
  return best;
}

double entropy_energy_sup_bruteforce(const CloudView& view, double eps) {
  const std::size_t n = view.size();
  if (n == 0) return -kInf;
  if (n > 22) throw std::invalid_argument("entropy brute force: too many atoms");
  const int d = view.dim();
  const std::size_t nmask = std::size_t(1) << n;
  std::vector<double> score(nmask, 0.0);
  std::vector<int> top(nmask, -1);
  double best = -kInf;
  for (std::size_t mask = 1; mask < nmask; ++mask) {
    int j = 63 - __builtin_clzll(mask);
    std::size_t prev = mask ^ (std::size_t(1) << j);
    int i = top[prev];
    double dt, d2 = 0.0;
    if (i < 0) {
      dt = view.time(j);
      for (int k = 0; k < d; ++k) d2 += view.pos(j)[k] * view.pos(j)[k];
    } else {
      dt = view.time(j) - view.time(i);
      for (int k = 0; k < d; ++k) {
        double dx = view.pos(j)[k] - view.pos(i)[k];
        d2 += dx * dx;
      }
    }
    score[mask] =
        score[prev] + std::log(view.mark_at(j)) - 0.5 * eps * d2 / dt;
    top[mask] = j;
    best = std::max(best, score[mask]);
  }
  return best;
}

double sup_weight_statistic(const CloudView& view) {
  double best = -kInf;
  const int d = view.dim();
  for (std::size_t i = 0; i < view.size(); ++i) {
    double d2 = 0.0;
    for (int k = 0; k < d; ++k) d2 += view.pos(i)[k] * view.pos(i)[k];
    best = std::max(best, std::log(view.mark_at(i)) +
                              kernel::log_heat(view.time(i), d2, d));
  }
  return best;
}

}  // namespace levypoly
