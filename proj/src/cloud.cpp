#include "levypoly/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace levypoly {

void PointCloud::validate() const {
  const std::size_t n = size();
  if (x.size() != n * std::size_t(d) || mark.size() != n)
    throw std::logic_error("PointCloud: array sizes disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("PointCloud: duplicate or unsorted atom times");
    if (!(t[i] >= 0.0 && t[i] <= horizon))
      throw std::invalid_argument("PointCloud: atom time outside [0,T]");
    if (!(mark[i] >= a_min))
      throw std::invalid_argument("PointCloud: mark below a_min");
    for (int k = 0; k < d; ++k)
      if (std::fabs(x[i * d + k]) > half_width + 1e-12)
        throw std::invalid_argument("PointCloud: atom outside the spatial window");
  }
}

PointCloud sample_cloud(const LevyIntensity& lam, double T, double L,
                        double a_min, int d, std::uint64_t seed) {
  if (!(a_min > 0.0))
    throw std::invalid_argument("sample_cloud: a_min > 0 (infinite intensity)");
  if (!(T > 0.0 && L > 0.0 && d >= 1))
    throw std::invalid_argument("sample_cloud: bad geometry");
  PointCloud c;
  c.d = d;
  c.horizon = T;
  c.half_width = L;
  c.a_min = a_min;
  c.seed = seed;
  c.intensity = lam;

  RngStream rng(seed, 0);
  const double rate = lam.mass_above(a_min);
  const double mean = T * std::pow(2.0 * L, d) * rate;
  const std::uint64_t n = rng.poisson(mean);

  std::vector<std::size_t> order(n);
  std::vector<double> tt(n);
  for (std::uint64_t i = 0; i < n; ++i) tt[i] = rng.uniform(0.0, T);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tt[a] < tt[b]; });

  c.t.resize(n);
  c.x.resize(n * d);
  c.mark.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) c.t[i] = tt[order[i]];
  // positions and marks are exchangeable, no need to permute them
  for (std::uint64_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) c.x[i * d + k] = rng.uniform(-L, L);
  for (std::uint64_t i = 0; i < n; ++i)
    c.mark[i] = lam.sample_restricted(a_min, kInf, 0, rng);
  // ties have probability zero; guard the exact-duplicate pathologies anyway
  for (std::uint64_t i = 1; i < n; ++i)
    if (c.t[i] == c.t[i - 1]) c.t[i] = std::nextafter(c.t[i], T);
  return c;
}

CloudView truncate(const PointCloud& cloud, const TruncationWindow& w) {
  if (w.a < cloud.a_min - 1e-15)
    throw std::invalid_argument(
        "truncate: window.a below a_min (atoms never sampled)");
  CloudView v;
  v.cloud = &cloud;
  v.window = w;
  for (std::uint32_t i = 0; i < cloud.size(); ++i)
    if (cloud.mark[i] >= w.a && cloud.mark[i] < w.b) v.idx.push_back(i);
  return v;
}

PointCloud shift(const PointCloud& cloud, double s, std::span<const double> y) {
  if (int(y.size()) != cloud.d) throw std::invalid_argument("shift: bad y dim");
  PointCloud out = cloud;
  for (auto& ti : out.t) ti -= s;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int k = 0; k < cloud.d; ++k) out.x[i * cloud.d + k] -= y[k];
  out.horizon = cloud.horizon;  // window metadata shifts with the atoms
  return out;
}

CoupledCloudFamily::CoupledCloudFamily(PointCloud b, std::vector<double> lv)
    : base(std::move(b)), levels(std::move(lv)) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < base.a_min - 1e-15)
      throw std::invalid_argument("CoupledCloudFamily: level below a_min");
    if (i > 0 && !(levels[i] <= levels[i - 1]))
      throw std::invalid_argument("CoupledCloudFamily: levels must decrease");
  }
}

CloudView CoupledCloudFamily::view(std::size_t level_index, double b) const {
  return truncate(base, TruncationWindow(levels.at(level_index), b));
}

SizeBiasedSample size_biased_augment(const PointCloud& cloud, double beta,
                                     double a, RngStream& rng) {
  ExtReal total = cloud.intensity.moment(1.0, a, kInf);
  if (total.infinite)
    throw std::domain_error(
        "size_biased_augment: int_[a,inf) u lambda(du) diverges (mu = inf)");
  SizeBiasedSample out;
  const double T = cloud.horizon;
  const int d = cloud.d;
  const std::uint64_t n_add =
      beta > 0.0 ? rng.poisson(beta * total.value * T) : 0;

  std::vector<double> ts(n_add);
  for (auto& s : ts) s = rng.uniform(0.0, T);
  std::sort(ts.begin(), ts.end());

  // Brownian path evaluated at the added times, start at the origin
  out.path_times = ts;
  out.path_values.resize(n_add * d);
  {
    double tprev = 0.0;
    std::vector<double> cur(d, 0.0);
    for (std::uint64_t i = 0; i < n_add; ++i) {
      double sd = std::sqrt(ts[i] - tprev);
      for (int k = 0; k < d; ++k) {
        cur[k] += sd * rng.normal();
        out.path_values[i * d + k] = cur[k];
      }
      tprev = ts[i];
    }
  }

  // merge, re-sorting by time
  PointCloud merged = cloud;
  for (std::uint64_t i = 0; i < n_add; ++i) {
    merged.t.push_back(ts[i]);
    for (int k = 0; k < d; ++k) merged.x.push_back(out.path_values[i * d + k]);
    merged.mark.push_back(cloud.intensity.sample_restricted(a, kInf, 1, rng));
  }
  std::vector<std::size_t> order(merged.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t p, std::size_t q) { return merged.t[p] < merged.t[q]; });
  PointCloud sorted = cloud;
  sorted.t.clear();
  sorted.x.clear();
  sorted.mark.clear();
  sorted.a_min = std::min(cloud.a_min, a);
  sorted.half_width = kInf;  // Brownian atoms are not window-bounded
  for (std::size_t i : order) {
    sorted.t.push_back(merged.t[i]);
    for (int k = 0; k < d; ++k) sorted.x.push_back(merged.x[i * d + k]);
    sorted.mark.push_back(merged.mark[i]);
  }
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted.t[i] == sorted.t[i - 1])
      sorted.t[i] = std::nextafter(sorted.t[i], T);
  out.cloud = std::move(sorted);
  out.n_added = n_add;
  return out;
}

void save_cloud_csv(const PointCloud& cloud, const std::string& csv_path,
                    const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "t";
  for (int k = 1; k <= cloud.d; ++k) csv << ",x_" << k;
  csv << ",mark\n";
  char buf[64];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", cloud.t[i]);
    csv << buf;
    for (int k = 0; k < cloud.d; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", cloud.x[i * cloud.d + k]);
      csv << ',' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", cloud.mark[i]);
    csv << ',' << buf << '\n';
  }

  nlohmann::json side;
  side["T"] = cloud.horizon;
  side["L"] = cloud.half_width;
  side["d"] = cloud.d;
  side["a_min"] = cloud.a_min;
  side["seed"] = cloud.seed;
  side["lambda"] = nlohmann::json::parse(cloud.intensity.descriptor_json());
  std::ofstream sc(sidecar_path);
  if (!sc) throw std::runtime_error("cannot write " + sidecar_path);
  sc << side.dump(2) << "\n";
}

PointCloud load_cloud_csv(const std::string& csv_path,
                          const std::string& sidecar_path) {
  std::ifstream sc(sidecar_path);
  if (!sc) throw std::runtime_error("cannot open " + sidecar_path);
  nlohmann::json side = nlohmann::json::parse(sc);

  PointCloud c;
  c.horizon = side.at("T").get<double>();
  c.half_width = side.at("L").get<double>();
  c.d = side.at("d").get<int>();
  c.a_min = side.at("a_min").get<double>();
  c.seed = side.at("seed").get<std::uint64_t>();
  const auto& lj = side.at("lambda");
  if (lj.at("kind") == "alpha_stable") {
    c.intensity = LevyIntensity::alpha_stable(lj.at("alpha").get<double>());
  } else {
    c.intensity = LevyIntensity::tabulated(
        lj.at("nodes").get<std::vector<double>>(),
        lj.at("densities").get<std::vector<double>>(),
        lj.at("head").get<std::string>(), lj.at("tail").get<std::string>());
  }

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line)) throw std::runtime_error("empty cloud csv");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(is, cell, ',')) row.push_back(std::stod(cell));
    if (int(row.size()) != c.d + 2)
      throw std::runtime_error("cloud csv row has wrong arity");
    c.t.push_back(row.front());
    for (int k = 0; k < c.d; ++k) c.x.push_back(row[1 + k]);
    c.mark.push_back(row.back());
  }
  c.validate();
  return c;
}

}  // namespace levypoly
