#include "levypoly/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levypoly {

namespace {

inline std::size_t layer_offset(int n) {
  // layer m has m+1 reachable sites; layers 1..n-1 precede layer n
  return std::size_t(n - 1) * std::size_t(n + 2) / 2;
}

inline std::size_t site_index(int n, int x) { return layer_offset(n) + (x + n) / 2; }

}  // namespace

double sample_eta(double alpha, RngStream& rng) {
  double pareto = std::pow(rng.uniform01(), -1.0 / alpha);
  return (alpha - 1.0) * pareto - alpha;
}

DiscreteEnvironment sample_environment(int N, int d, double alpha,
                                       std::uint64_t seed) {
  if (d != 1) throw std::invalid_argument("sample_environment: d = 1 lattice only");
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("sample_environment: alpha in (1,2)");
  DiscreteEnvironment env;
  env.N = N;
  env.d = d;
  env.alpha = alpha;
  env.seed = seed;
  RngStream rng(seed, 1);
  env.eta.resize(layer_offset(N + 1));
  for (auto& e : env.eta) e = sample_eta(alpha, rng);
  return env;
}

double env_at(const DiscreteEnvironment& env, int n, int x) {
  if (n < 1 || n > env.N || std::abs(x) > n || ((x + n) & 1))
    throw std::out_of_range("env_at: off the reachable cone");
  return env.eta[site_index(n, x)];
}

TransferResult discrete_partition(const DiscreteEnvironment& env, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("discrete_partition: beta in (0,1)");
  const int N = env.N;
  TransferResult out;
  // layer vectors over sites x = -n..n step 2, rescaled each layer to dodge
  // the 2^-n underflow; scale_log accumulates the factored mass
  std::vector<double> cur{1.0};  // layer 0: origin only
  double scale_log = 0.0;
  std::vector<double> next;
  for (int n = 1; n <= N; ++n) {
    next.assign(std::size_t(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
      int x = -n + 2 * i;
      double inflow = 0.0;
      if (i > 0) inflow += 0.5 * cur[i - 1];  // from x-1
      if (i < n) inflow += 0.5 * cur[i];      // from x+1
      next[i] = inflow * (1.0 + beta * env.eta[site_index(n, x)]);
    }
    double m = *std::max_element(next.begin(), next.end());
    if (m <= 0.0) throw std::runtime_error("discrete_partition: dead layer");
    for (auto& v : next) v /= m;
    scale_log += std::log(m);
    cur.swap(next);
  }
  double total = 0.0;
  for (double v : cur) total += v;
  out.log_z = scale_log + std::log(total);
  out.endpoint_log_weight.resize(cur.size());
  out.endpoint_sites.resize(cur.size());
  for (int i = 0; i <= N; ++i) {
    out.endpoint_sites[i] = -N + 2 * i;
    out.endpoint_log_weight[i] =
        cur[i] > 0.0 ? scale_log + std::log(cur[i]) : -kInf;
  }
  return out;
}

std::vector<int> sample_discrete_path(const DiscreteEnvironment& env, double beta,
                                      RngStream& rng) {
  const int N = env.N;
  // forward layers kept for backward sampling; per-layer normalization leaves
  // within-layer ratios untouched
  std::vector<std::vector<double>> layers(N + 1);
  layers[0] = {1.0};
  for (int n = 1; n <= N; ++n) {
    auto& prev = layers[n - 1];
    auto& nx = layers[n];
    nx.assign(std::size_t(n) + 1, 0.0);
    double m = 0.0;
    for (int i = 0; i <= n; ++i) {
      int x = -n + 2 * i;
      double inflow = 0.0;
      if (i > 0) inflow += 0.5 * prev[i - 1];
      if (i < n) inflow += 0.5 * prev[i];
      nx[i] = inflow * (1.0 + beta * env.eta[site_index(n, x)]);
      m = std::max(m, nx[i]);
    }
    for (auto& v : nx) v /= m;
  }
  std::vector<int> path(N + 1, 0);
  // endpoint
  {
    auto& last = layers[N];
    double total = 0.0;
    for (double v : last) total += v;
    double r = rng.uniform01() * total, acc = 0.0;
    int pick = N;
    for (int i = 0; i <= N; ++i) {
      acc += last[i];
      if (r < acc) {
        pick = i;
        break;
      }
    }
    path[N] = -N + 2 * pick;
  }
  for (int n = N; n >= 1; --n) {
    int x = path[n];
    auto& prev = layers[n - 1];
    auto wl = [&](int xp) -> double {
      if (std::abs(xp) > n - 1 || ((xp + n - 1) & 1)) return 0.0;
      return prev[(xp + n - 1) / 2];
    };
    double wminus = wl(x - 1), wplus = wl(x + 1);
    double r = rng.uniform01() * (wminus + wplus);
    path[n - 1] = (r < wminus) ? x - 1 : x + 1;
  }
  return path;
}

double intermediate_beta(double bhat, int N, double alpha, int d) {
  const double alpha_c = (d <= 2) ? 2.0 : 1.0 + 2.0 / d;
  if (!(alpha > 1.0 && alpha < alpha_c))
    throw std::invalid_argument("intermediate_beta: alpha outside (1, alpha_c)");
  double pref = std::pow(2.0, (1.0 - alpha) / alpha) *
                std::pow(double(d), d * (1.0 - alpha) / 2.0);
  double expo = -(d / (2.0 * alpha)) * (1.0 + 2.0 / d - alpha);
  return bhat * pref * std::pow(double(N), expo);
}

std::vector<double> rescaled_path(const std::vector<int>& walk, int N, int d,
                                  const std::vector<double>& grid_times) {
  if (int(walk.size()) != N + 1)
    throw std::invalid_argument("rescaled_path: walk length != N+1");
  std::vector<double> out(grid_times.size());
  const double scale = std::sqrt(double(d) / double(N));
  for (std::size_t i = 0; i < grid_times.size(); ++i) {
    double nt = grid_times[i] * N;
    int k = std::min(int(std::floor(nt)), N - 1);
    if (nt <= 0.0) k = 0;
    double u = nt - k;
    out[i] = scale * ((1.0 - u) * walk[k] + u * walk[k + 1]);
  }
  return out;
}

namespace {

double interp_cdf(const std::vector<double>& grid, const std::vector<double>& cdf,
                  double x) {
  if (x <= grid.front()) return 0.0;
  if (x >= grid.back()) return 1.0;
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = std::size_t(it - grid.begin());
  double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

}  // namespace

ScalingReport scaling_comparison(double alpha, int d, double bhat,
                                 const std::vector<int>& Ns,
                                 const std::vector<int>& replicas,
                                 const std::vector<double>& ref_grid,
                                 const std::vector<double>& ref_cdf,
                                 std::uint64_t seed) {
  if (Ns.size() != replicas.size())
    throw std::invalid_argument("scaling_comparison: Ns/replicas disagree");
  ScalingReport rep;
  rep.alpha = alpha;
  rep.bhat = bhat;
  rep.tail_constant = DiscreteEnvironment::tail_constant(alpha);
  rep.effective_bhat = bhat * std::pow(rep.tail_constant, 1.0 / alpha);
  rep.note =
      "eta tail constant (alpha-1)^alpha != 1; the matched continuum disorder "
      "strength is effective_bhat = bhat*(alpha-1)";

  for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
    const int N = Ns[ni];
    const int R = replicas[ni];
    const double beta_N = intermediate_beta(bhat, N, alpha, d);
    std::vector<double> pmf(std::size_t(N) + 1, 0.0);
    double mean_lz = 0.0, m2_lz = 0.0;
    for (int r = 0; r < R; ++r) {
      DiscreteEnvironment env =
          sample_environment(N, d, alpha, seed + 0x1000003 * (ni + 1) + r);
      TransferResult tr = discrete_partition(env, beta_N);
      // per-environment endpoint law
      double mx = *std::max_element(tr.endpoint_log_weight.begin(),
                                    tr.endpoint_log_weight.end());
      double tot = 0.0;
      for (double lw : tr.endpoint_log_weight) tot += std::exp(lw - mx);
      for (int i = 0; i <= N; ++i)
        pmf[i] += std::exp(tr.endpoint_log_weight[i] - mx) / (tot * R);
      double delta = tr.log_z - mean_lz;
      mean_lz += delta / (r + 1);
      m2_lz += delta * (tr.log_z - mean_lz);
    }
    // disorder-averaged CDF vs the continuum reference, evaluated at the
    // rescaled lattice sites (left and right limits of each jump)
    const double scale = std::sqrt(double(d) / double(N));
    double ks = 0.0, acc = 0.0;
    for (int i = 0; i <= N; ++i) {
      double xr = scale * (-N + 2 * i);
      double fr = interp_cdf(ref_grid, ref_cdf, xr);
      ks = std::max(ks, std::fabs(acc - fr));  // left limit
      acc += pmf[i];
      ks = std::max(ks, std::fabs(acc - fr));  // right limit
    }
    ScalingRow row;
    row.N = N;
    row.beta_N = beta_N;
    row.mean_log_z = mean_lz;
    row.var_log_z = R > 1 ? m2_lz / (R - 1) : 0.0;
    row.ks_endpoint = ks;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace levypoly
