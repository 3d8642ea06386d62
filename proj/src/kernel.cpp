#include "levypoly/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levypoly::kernel {

LogValue heat_kernel_log(double t, std::span<const double> x) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel_log: t > 0 required");
  double dist2 = 0.0;
  for (double xi : x) dist2 += xi * xi;
  return LogValue::from_log(log_heat(t, dist2, int(x.size())));
}

LogValue kernel_chain_log(std::span<const SpaceTimePoint> points,
                          const SpaceTimePoint& origin) {
  double acc = 0.0;
  const SpaceTimePoint* prev = &origin;
  for (const auto& p : points) {
    if (!(p.t > prev->t))
      throw std::invalid_argument("kernel_chain_log: times must strictly increase");
    if (p.x.size() != origin.x.size())
      throw std::invalid_argument("kernel_chain_log: dimension mismatch");
    double dist2 = 0.0;
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      double dx = p.x[k] - prev->x[k];
      dist2 += dx * dx;
    }
    acc += log_heat(p.t - prev->t, dist2, int(p.x.size()));
    prev = &p;
  }
  return LogValue::from_log(acc);
}

double squared_kernel_integral(double t, int d) {
  if (!(t > 0.0)) throw std::invalid_argument("squared_kernel_integral: t > 0");
  return std::pow(2.0, -d) * std::pow(M_PI * t, -0.5 * d);
}

double simplex_series_coefficient(int m, double exponent, double T,
                                  bool final_gap) {
  if (m < 0) throw std::invalid_argument("simplex coefficient: m >= 0");
  if (!(exponent < 1.0))
    throw std::invalid_argument("simplex coefficient: exponent < 1 required");
  if (m == 0 && !final_gap) return 1.0;
  const double c = 1.0 - exponent;
  if (final_gap) {
    // Dirichlet integral over the m+1 gaps summing to T
    double lg = (m + 1) * std::lgamma(c) - std::lgamma((m + 1) * c) +
                ((m + 1) * c - 1.0) * std::log(T);
    return std::exp(lg);
  }
  double lg = m * std::lgamma(c) - std::lgamma(m * c + 1.0) + m * c * std::log(T);
  return std::exp(lg);
}

std::vector<double> bridge_fill(std::span<const SpaceTimePoint> anchors,
                                std::span<const double> grid, int d,
                                RngStream& rng) {
  if (anchors.empty()) throw std::invalid_argument("bridge_fill: need anchors");
  for (std::size_t i = 1; i < anchors.size(); ++i)
    if (!(anchors[i].t > anchors[i - 1].t))
      throw std::invalid_argument("bridge_fill: anchor times must increase");

  auto near = [](double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
  };

  std::vector<double> pos(grid.size() * d);
  std::vector<double> cur(anchors[0].x.begin(), anchors[0].x.end());
  double tcur = anchors[0].t;
  std::size_t next_anchor = 1;

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double s = grid[gi];
    if (gi > 0 && !(s > grid[gi - 1]))
      throw std::invalid_argument("bridge_fill: grid times must increase");
    if (s < anchors[0].t - 1e-15)
      throw std::invalid_argument("bridge_fill: grid precedes first anchor");

    if (next_anchor < anchors.size() && near(anchors[next_anchor].t, s)) {
      // pinned exactly at the anchor
      cur = anchors[next_anchor].x;
      tcur = anchors[next_anchor].t;
      ++next_anchor;
    } else if (next_anchor < anchors.size() && anchors[next_anchor].t < s) {
      throw std::invalid_argument("bridge_fill: grid must refine anchor times");
    } else if (s > tcur) {
      if (next_anchor < anchors.size()) {
        // exact bridge marginal between the current state and the next anchor
        const auto& an = anchors[next_anchor];
        double frac = (s - tcur) / (an.t - tcur);
        double sd = std::sqrt((s - tcur) * (an.t - s) / (an.t - tcur));
        for (int k = 0; k < d; ++k)
          cur[k] = cur[k] + frac * (an.x[k] - cur[k]) + sd * rng.normal();
      } else {
        double sd = std::sqrt(s - tcur);
        for (int k = 0; k < d; ++k) cur[k] += sd * rng.normal();
      }
      tcur = s;
    }
    std::copy(cur.begin(), cur.end(), pos.begin() + gi * d);
  }
  return pos;
}

}  // namespace levypoly::kernel
