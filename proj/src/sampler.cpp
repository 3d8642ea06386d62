#include "levypoly/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "levypoly/kernel.hpp"

namespace levypoly {

namespace {

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double dx = a[k] - b[k];
    s += dx * dx;
  }
  return s;
}

}  // namespace

std::vector<std::uint32_t> sample_skeleton(const CloudView& view,
                                           const DPTables& tables,
                                           RngStream& rng) {
  const std::size_t n = view.size();
  const int d = view.dim();
  const double log_beta = std::log(tables.beta);
  std::vector<std::uint32_t> sigma;

  std::ptrdiff_t cur = -1;  // -1 = start at the origin
  for (;;) {
    const double log_b_cur =
        cur < 0 ? tables.log_b_start : tables.log_backward[std::size_t(cur)];
    // running categorical draw: terminate with prob 1/B(cur), otherwise pick
    // the next atom proportionally to beta u_j rho(dt,dx) B(j)
    double r = rng.uniform01();
    double acc = std::exp(-log_b_cur);  // termination mass
    std::ptrdiff_t pick = -1;
    for (std::size_t j = std::size_t(cur + 1); j < n; ++j) {
      double lw;
      if (cur < 0) {
        double d2 = 0.0;
        for (double v : view.pos(j)) d2 += v * v;
        lw = log_beta + std::log(view.mark_at(j)) +
             kernel::log_heat(view.time(j), d2, d) + tables.log_backward[j];
      } else {
        lw = log_beta + std::log(view.mark_at(j)) +
             kernel::log_heat(view.time(j) - view.time(std::size_t(cur)),
                              dist2(view.pos(j), view.pos(std::size_t(cur))), d) +
             tables.log_backward[j];
      }
      acc += std::exp(lw - log_b_cur);
      if (r < acc) {
        pick = std::ptrdiff_t(j);
        break;
      }
    }
    if (pick < 0) break;  // terminated (or numerical remainder: treat as stop)
    sigma.push_back(std::uint32_t(pick));
    cur = pick;
  }
  return sigma;
}

PolymerPath sample_path(const CloudView& view, double beta, double T,
                        std::span<const double> grid, RngStream& rng) {
  const int d = view.dim();
  PolymerPath path;

  DPTables tables = build_tables(view, beta, T, /*backward=*/true);
  path.skeleton = sample_skeleton(view, tables, rng);

  // skeleton weight w_{a,beta}(sigma)
  double lw = -beta * tables.drift * T;
  {
    double tprev = 0.0;
    std::vector<double> xprev(d, 0.0);
    for (auto s : path.skeleton) {
      double d2 = 0.0;
      for (int k = 0; k < d; ++k) {
        double dx = view.pos(s)[k] - xprev[k];
        d2 += dx * dx;
      }
      lw += std::log(beta) + std::log(view.mark_at(s)) +
            kernel::log_heat(view.time(s) - tprev, d2, d);
      tprev = view.time(s);
      xprev.assign(view.pos(s).begin(), view.pos(s).end());
    }
  }
  path.skeleton_weight = LogValue::from_log(lw);

  // merge skeleton times into the grid
  std::vector<double> full(grid.begin(), grid.end());
  for (auto s : path.skeleton) full.push_back(view.time(s));
  std::sort(full.begin(), full.end());
  full.erase(std::unique(full.begin(), full.end(),
                         [](double a, double b) {
                           return std::fabs(a - b) <=
                                  1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
                         }),
             full.end());
  if (full.empty() || full.front() > 0.0) full.insert(full.begin(), 0.0);

  std::vector<SpaceTimePoint> anchors;
  anchors.push_back({0.0, std::vector<double>(d, 0.0)});
  for (auto s : path.skeleton)
    anchors.push_back({view.time(s),
                       std::vector<double>(view.pos(s).begin(), view.pos(s).end())});

  path.positions = kernel::bridge_fill(anchors, full, d, rng);
  path.grid = std::move(full);
  path.is_atom.assign(path.grid.size(), false);
  {
    std::size_t k = 1;  // anchors[0] is the origin
    for (std::size_t gi = 0; gi < path.grid.size() && k < anchors.size(); ++gi)
      if (std::fabs(path.grid[gi] - anchors[k].t) <=
          1e-12 * std::max(1.0, anchors[k].t)) {
        path.is_atom[gi] = true;
        ++k;
      }
  }
  return path;
}

MonteCarloEstimate estimate_Q_of_f(const CloudView& view, double beta, double T,
                                   const PathFunctional& f,
                                   std::span<const double> grid,
                                   std::uint64_t n_samples, RngStream& rng) {
  MonteCarloEstimate est;
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    PolymerPath p = sample_path(view, beta, T, grid, rng);
    double v = f(p.grid, p.positions, view.dim());
    ++est.n;
    double delta = v - mean;
    mean += delta / double(est.n);
    m2 += delta * (v - mean);
  }
  est.mean = mean;
  est.se = est.n > 1 ? std::sqrt(m2 / double(est.n - 1) / double(est.n)) : 0.0;
  return est;
}

LogValue marginal_density(const PointCloud& cloud, double beta,
                          const TruncationWindow& w,
                          std::span<const double> times,
                          std::span<const double> positions) {
  const int d = cloud.d;
  if (times.empty() || positions.size() != times.size() * std::size_t(d))
    throw std::invalid_argument("marginal_density: bad times/positions");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] > (i == 0 ? 0.0 : times[i - 1])))
      throw std::invalid_argument("marginal_density: times must strictly increase");
  const double T = times.back();

  double log_num = 0.0;
  std::vector<double> xprev(d, 0.0);
  double tprev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::span<const double> xi{positions.data() + i * d, std::size_t(d)};
    LogValue z = partition_between(cloud, beta, w, tprev, xprev, times[i], xi);
    log_num += z.log();
    tprev = times[i];
    xprev.assign(xi.begin(), xi.end());
  }
  CloudView v = truncate(cloud, w);
  LogValue zt = partition_point_to_plane(v, beta, T);
  return LogValue::from_log(log_num - zt.log());
}

}  // namespace levypoly
