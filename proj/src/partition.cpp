#include "levypoly/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
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

inline double dist2_origin(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double view_drift(const CloudView& view) {
  const auto& lam = view.cloud->intensity;
  double kb = view.window.bounded() ? lam.kappa(view.window.b) : 0.0;
  return lam.kappa(view.window.a) - kb;
}

}  // namespace

DPTables build_tables(const CloudView& view, double beta, double T,
                      bool backward) {
  const std::size_t n = view.size();
  const int d = view.dim();
  DPTables tb;
  tb.beta = beta;
  tb.horizon = T;
  tb.drift = view_drift(view);
  tb.log_forward.assign(n, 0.0);
  const double log_beta = std::log(beta);

  std::vector<double> terms;
  terms.reserve(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    terms.clear();
    const double tj = view.time(j);
    auto xj = view.pos(j);
    terms.push_back(kernel::log_heat(tj, dist2_origin(xj), d));
    for (std::size_t i = 0; i < j; ++i)
      terms.push_back(tb.log_forward[i] +
                      kernel::log_heat(tj - view.time(i), dist2(xj, view.pos(i)), d));
    tb.log_forward[j] =
        log_beta + std::log(view.mark_at(j)) + log_sum_exp(std::span<const double>(terms));
  }

  if (backward) {
    tb.log_backward.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
      terms.clear();
      terms.push_back(0.0);  // empty continuation
      const double ti = view.time(ii);
      auto xi = view.pos(ii);
      for (std::size_t j = ii + 1; j < n; ++j)
        terms.push_back(log_beta + std::log(view.mark_at(j)) +
                        kernel::log_heat(view.time(j) - ti, dist2(view.pos(j), xi), d) +
                        tb.log_backward[j]);
      tb.log_backward[ii] = log_sum_exp(std::span<const double>(terms));
    }
    terms.clear();
    terms.push_back(0.0);
    for (std::size_t j = 0; j < n; ++j)
      terms.push_back(log_beta + std::log(view.mark_at(j)) +
                      kernel::log_heat(view.time(j), dist2_origin(view.pos(j)), d) +
                      tb.log_backward[j]);
    tb.log_b_start = log_sum_exp(std::span<const double>(terms));
  }
  return tb;
}

LogValue partition_point_to_plane(const CloudView& view, double beta, double T) {
  DPTables tb = build_tables(view, beta, T, /*backward=*/false);
  std::vector<double> terms;
  terms.reserve(view.size() + 1);
  terms.push_back(0.0);
  for (double f : tb.log_forward) terms.push_back(f);
  double raw = log_sum_exp(std::span<const double>(terms));
  return LogValue::from_log(raw - beta * tb.drift * T);
}

LogValue partition_point_to_point(const CloudView& view, double beta, double t,
                                  std::span<const double> x) {
  if (!(t > 0.0)) throw std::invalid_argument("point_to_point: t > 0 required");
  const int d = view.dim();
  if (int(x.size()) != d) throw std::invalid_argument("point_to_point: bad x dim");
  // only atoms strictly before t participate
  CloudView head;
  head.cloud = view.cloud;
  head.window = view.window;
  for (auto id : view.idx)
    if (view.cloud->t[id] < t) head.idx.push_back(id);

  DPTables tb = build_tables(head, beta, t, /*backward=*/false);
  std::vector<double> terms;
  terms.reserve(head.size() + 1);
  terms.push_back(kernel::log_heat(t, dist2_origin(x), d));
  for (std::size_t j = 0; j < head.size(); ++j)
    terms.push_back(tb.log_forward[j] +
                    kernel::log_heat(t - head.time(j), dist2(x, head.pos(j)), d));
  double raw = log_sum_exp(std::span<const double>(terms));
  return LogValue::from_log(raw - beta * tb.drift * t);
}

LogValue partition_between(const PointCloud& cloud, double beta,
                           const TruncationWindow& w, double t1,
                           std::span<const double> x1, double t2,
                           std::span<const double> x2) {
  if (!(t1 < t2)) throw std::invalid_argument("partition_between: t1 < t2");
  const int d = cloud.d;
  std::vector<double> y(d);
  for (int k = 0; k < d; ++k) y[k] = x2[k] - x1[k];

  // inline shift: atoms in (t1, t2), coordinates relative to (t1, x1)
  PointCloud seg;
  seg.d = d;
  seg.horizon = t2 - t1;
  seg.half_width = kInf;
  seg.a_min = cloud.a_min;
  seg.intensity = cloud.intensity;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.t[i] <= t1 || cloud.t[i] >= t2) continue;
    if (cloud.mark[i] < w.a || cloud.mark[i] >= w.b) continue;
    seg.t.push_back(cloud.t[i] - t1);
    for (int k = 0; k < d; ++k) seg.x.push_back(cloud.x[i * d + k] - x1[k]);
    seg.mark.push_back(cloud.mark[i]);
  }
  CloudView v;
  v.cloud = &seg;
  v.window = w;
  v.idx.resize(seg.size());
  for (std::uint32_t i = 0; i < seg.size(); ++i) v.idx[i] = i;
  return partition_point_to_point(v, beta, t2 - t1, y);
}

LogValue brute_force_enumeration(const CloudView& view, double beta, double T,
                                 std::span<const double> endpoint) {
  std::vector<std::uint32_t> atoms;
  const bool pinned = !endpoint.empty();  // endpoint sits at the horizon T
  for (std::size_t i = 0; i < view.size(); ++i)
    if (!pinned || view.time(i) < T) atoms.push_back(std::uint32_t(i));
  const std::size_t n = atoms.size();
  if (n > 20) throw std::invalid_argument("brute_force_enumeration: > 20 atoms");
  const int d = view.dim();
  const double log_beta = std::log(beta);
  const double drift = view_drift(view);

  // chain weight by mask DP: top atom of a mask extends the chain of the mask
  // without it
  const std::size_t nmask = std::size_t(1) << n;
  std::vector<double> chain(nmask, 0.0);
  std::vector<int> top(nmask, -1);
  std::vector<double> all;
  all.reserve(nmask);

  auto closing = [&](int last) {
    if (!pinned) return 0.0;
    if (last < 0)
      return kernel::log_heat(T, dist2_origin(endpoint), d);
    std::size_t i = atoms[last];
    return kernel::log_heat(T - view.time(i), dist2(endpoint, view.pos(i)), d);
  };

  all.push_back(closing(-1));  // empty skeleton
  for (std::size_t mask = 1; mask < nmask; ++mask) {
    int j = 63 - __builtin_clzll(mask);
    std::size_t prev_mask = mask ^ (std::size_t(1) << j);
    int i = top[prev_mask];
    std::size_t aj = atoms[j];
    double step;
    if (i < 0) {
      step = kernel::log_heat(view.time(aj), dist2_origin(view.pos(aj)), d);
    } else {
      std::size_t ai = atoms[i];
      step = kernel::log_heat(view.time(aj) - view.time(ai),
                              dist2(view.pos(aj), view.pos(ai)), d);
    }
    chain[mask] = chain[prev_mask] + log_beta + std::log(view.mark_at(aj)) + step;
    top[mask] = j;
    all.push_back(chain[mask] + closing(j));
  }
  double raw = log_sum_exp(std::span<const double>(all));
  return LogValue::from_log(raw - beta * drift * T);
}

bool restriction_accepts(const CloudView& view,
                         std::span<const std::uint32_t> sigma,
                         const RestrictionParams& rp) {
  const double log_q = std::log(rp.q);
  std::vector<double> M(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    double best = std::log(view.mark_at(sigma[i])) - log_q -
                  rp.gamma * std::log(view.time(sigma[i]));
    for (std::size_t j = 0; j < i; ++j) {
      double cand = M[j] + std::log(view.mark_at(sigma[i])) - log_q -
                    rp.gamma * std::log(view.time(sigma[i]) - view.time(sigma[j]));
      best = std::max(best, cand);
    }
    if (best >= 0.0) return false;
    M[i] = best;
  }
  return true;
}

LogValue restricted_partition(const CloudView& view, double beta, double T,
                              const RestrictionParams& rp) {
  const std::size_t n = view.size();
  if (n > 20)
    throw std::invalid_argument(
        "restricted_partition: restriction experiment requires smaller window");
  const int d = view.dim();
  const double log_beta = std::log(beta);
  const double log_q = std::log(rp.q);
  const double drift = view_drift(view);

  std::vector<double> weights;  // accepted skeleton log weights
  weights.push_back(0.0);       // empty skeleton

  // DFS over atoms in time order; the constraint is hereditary, so a subtree
  // whose newest max-subchain score is >= 0 is pruned entirely
  std::vector<std::size_t> incl;
  std::vector<double> M;
  std::vector<double> chain{0.0};

  auto step_weight = [&](std::size_t i) {
    double logu = std::log(view.mark_at(i));
    if (incl.empty())
      return log_beta + logu +
             kernel::log_heat(view.time(i), dist2_origin(view.pos(i)), d);
    std::size_t p = incl.back();
    return log_beta + logu +
           kernel::log_heat(view.time(i) - view.time(p),
                            dist2(view.pos(i), view.pos(p)), d);
  };

  auto subchain_score = [&](std::size_t i) {
    double logu = std::log(view.mark_at(i));
    double best = logu - log_q - rp.gamma * std::log(view.time(i));
    for (std::size_t j = 0; j < incl.size(); ++j)
      best = std::max(best, M[j] + logu - log_q -
                                rp.gamma * std::log(view.time(i) - view.time(incl[j])));
    return best;
  };

  auto dfs = [&](auto&& self, std::size_t pos) -> void {
    if (pos == n) return;
    self(self, pos + 1);  // exclude atom pos
    double score = subchain_score(pos);
    if (score >= 0.0) return;  // sigma with this atom leaves B_q, as do supersets
    incl.push_back(pos);
    M.push_back(score);
    chain.push_back(chain.back() + step_weight(pos));
    weights.push_back(chain.back());
    self(self, pos + 1);
    incl.pop_back();
    M.pop_back();
    chain.pop_back();
  };
  dfs(dfs, 0);

  double raw = log_sum_exp(std::span<const double>(weights));
  return LogValue::from_log(raw - beta * drift * T);
}

SweepReport a_sweep(const CoupledCloudFamily& family, double beta, double T,
                    double b) {
  SweepReport rep;
  rep.seed = family.base.seed;
  rep.lambda_descriptor = family.base.intensity.descriptor_json();
  rep.beta = beta;
  rep.T = T;
  rep.upper_cutoff = b;
  double prev = 0.0;
  for (std::size_t k = 0; k < family.levels.size(); ++k) {
    CloudView v = family.view(k, b);
    LogValue z = partition_point_to_plane(v, beta, T);
    SweepRow row;
    row.a_level = family.levels[k];
    row.log_z = z.log();
    row.n_atoms = v.size();
    row.rel_diff =
        (k == 0) ? 0.0 : std::fabs(-std::expm1(prev - row.log_z));
    rep.rows.push_back(row);
    prev = row.log_z;
  }
  return rep;
}

void save_sweep_csv(const SweepReport& rep, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  out << "a_level,log_Z,rel_diff,n_atoms\n";
  char buf[160];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu\n", r.a_level, r.log_z,
                  r.rel_diff, r.n_atoms);
    out << buf;
  }
}

void save_sweep_json(const SweepReport& rep, const std::string& json_path) {
  nlohmann::json j;
  j["seed"] = rep.seed;
  j["lambda"] = nlohmann::json::parse(rep.lambda_descriptor);
  j["beta"] = rep.beta;
  j["T"] = rep.T;
  j["upper_cutoff"] =
      rep.upper_cutoff == kInf ? nlohmann::json("inf") : nlohmann::json(rep.upper_cutoff);
  auto rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"a_level", r.a_level},
                    {"log_Z", r.log_z},
                    {"rel_diff", r.rel_diff},
                    {"n_atoms", r.n_atoms}});
  j["rows"] = rows;
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write " + json_path);
  out << j.dump(2) << "\n";
}

MomentOracles moment_oracles(const LevyIntensity& lam, double beta,
                             const TruncationWindow& w, double T, int d,
                             double gap_q) {
  MomentOracles mo;
  ExtReal mub = lam.mu(w.b);
  mo.mean_z = std::exp(beta * mub.require_finite("E[Z]: mu_b") * T);

  if (gap_q != kInf) {
    double mu = lam.mu().require_finite("first-moment gap: mu");
    double muq = lam.mu(gap_q).value;
    mo.first_moment_gap = std::exp(beta * mu * T) - std::exp(beta * muq * T);
  }

  if (d == 1) {
    ExtReal V = lam.moment(2.0, w.a, w.b);
    if (!V.infinite) {
      const double z = beta * beta * V.value * std::sqrt(T) / 2.0;
      double s = 0.0, term;
      for (int m = 0; m < 400; ++m) {
        term = std::exp(m * std::log(z) - std::lgamma(m / 2.0 + 1.0));
        if (m == 0) term = 1.0;
        s += term;
        if (m > 4 && term < 1e-16 * s) break;
      }
      mo.second_moment_d1 = std::exp(2.0 * beta * mub.value * T) * s;

      ExtReal mu = lam.mu();
      if (!mu.infinite) {
        const double x = beta * std::exp(2.0 * beta * mu.value) * V.value /
                         (2.0 * std::sqrt(M_PI));
        std::vector<double> lt;
        for (int m = 0; m < 400; ++m) {
          double la = std::log(kernel::simplex_series_coefficient(m, 0.5, T));
          double v = (m == 0 ? 0.0 : m * std::log(x)) + la;
          lt.push_back(v);
          if (m > 4 && v < lt.front() - 40.0 && v < lt[lt.size() - 2]) break;
        }
        double ls = log_sum_exp(std::span<const double>(lt));
        mo.second_moment_d1_paper_bound = ls > 700.0 ? kInf : std::exp(ls);
      }
    }
  }
  return mo;
}

double windowing_bias_bound(const LevyIntensity& lam, double beta,
                            const TruncationWindow& w, double T, double L, int d) {
  double drift = lam.kappa(w.a) - (w.bounded() ? lam.kappa(w.b) : 0.0);
  double mub = lam.mu(w.b).require_finite("windowing bias: mu_b");
  double kbar = drift + mub;  // int_[a,b) u lambda(du)
  return 2.0 * d * beta * kbar * T * std::exp(beta * mub * T) *
         std::exp(-L * L / (2.0 * T));
}

}  // namespace levypoly
