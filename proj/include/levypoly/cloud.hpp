#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "levypoly/measures.hpp"
#include "levypoly/rng.hpp"

namespace levypoly {

// Marked Poisson environment on [0,T] x [-L,L]^d x [a_min,inf), atoms sorted
// by time, structure-of-arrays since the partition DP streams over
// time-ordered prefixes. Immutable after construction.
struct PointCloud {
  int d = 1;
  double horizon = 1.0;     // T
  double half_width = 1.0;  // L
  double a_min = 1.0;
  std::uint64_t seed = 0;
  LevyIntensity intensity = LevyIntensity::alpha_stable(1.5);

  std::vector<double> t;     // strictly increasing
  std::vector<double> x;     // flattened n*d
  std::vector<double> mark;  // all >= a_min

  std::size_t size() const { return t.size(); }
  std::span<const double> pos(std::size_t i) const {
    return {x.data() + i * d, std::size_t(d)};
  }
  void validate() const;
};

// A mark-window view over a cloud: the atoms with mark in [a, b).
struct CloudView {
  const PointCloud* cloud = nullptr;
  TruncationWindow window{1.0, kInf};
  std::vector<std::uint32_t> idx;  // time order

  std::size_t size() const { return idx.size(); }
  double time(std::size_t i) const { return cloud->t[idx[i]]; }
  double mark_at(std::size_t i) const { return cloud->mark[idx[i]]; }
  std::span<const double> pos(std::size_t i) const { return cloud->pos(idx[i]); }
  int dim() const { return cloud->d; }
};

PointCloud sample_cloud(const LevyIntensity& lam, double T, double L,
                        double a_min, int d, std::uint64_t seed);

// view keeping atoms with mark in [a,b); w.a must be >= a_min
CloudView truncate(const PointCloud& cloud, const TruncationWindow& w);

PointCloud shift(const PointCloud& cloud, double s, std::span<const double> y);

// Coupled truncation across mark levels: one base realization, nested views.
struct CoupledCloudFamily {
  PointCloud base;
  std::vector<double> levels;  // decreasing, all >= base.a_min

  CoupledCloudFamily(PointCloud b, std::vector<double> lv);
  CloudView view(std::size_t level_index, double b = kInf) const;
};

struct SizeBiasedSample {
  PointCloud cloud;                  // omega plus the tilted atoms
  std::vector<double> path_times;    // added atoms' times
  std::vector<double> path_values;   // flattened positions on the Brownian path
  std::size_t n_added = 0;
};

// omega-hat of the size-biased representation: an independent Poisson stream
// of marks with intensity dt (x) beta u 1{u>=a} lambda(du) planted along a
// fresh Brownian path. Requires int_[a,inf) u lambda(du) < inf.
SizeBiasedSample size_biased_augment(const PointCloud& cloud, double beta,
                                     double a, RngStream& rng);

// CSV atoms (`t,x_1..x_d,mark`) plus JSON sidecar for exact replay
void save_cloud_csv(const PointCloud& cloud, const std::string& csv_path,
                    const std::string& sidecar_path);
PointCloud load_cloud_csv(const std::string& csv_path,
                          const std::string& sidecar_path);

}  // namespace levypoly
