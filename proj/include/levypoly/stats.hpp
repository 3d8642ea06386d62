#pragma once

#include <optional>
#include <vector>

#include "levypoly/cloud.hpp"

namespace levypoly {

// Dimension-specific Y_a statistics with closed-form moments under the plain
// environment law:
//   d = 1 : sum of marks in [a,1) within ||x||_inf <= R_a, t in [0,1]
//   d = 2 : sum of u/(t v u) over marks in [a,1), ||x||_inf <= R_a sqrt(t)
//   d >= 3: count of atoms with ||x||_inf <= R_a sqrt(t), u >= a v t^{d/2}
double degeneracy_Y(const PointCloud& cloud, double a, double R_a);

struct YMoments {
  double mean = 0.0;
  double variance = 0.0;
  double size_biased_mean = 0.0;  // under the tilted law, beta-dependent term included
  double q_a = 0.0;               // Brownian confinement factor
};

YMoments degeneracy_Y_moments(const LevyIntensity& lam, double a, double R_a,
                              int d, double beta);

// the paper's per-dimension default R_a (overridable by callers)
double default_R_a(const LevyIntensity& lam, double a, int d);

struct SeparationRow {
  double a;
  double y_mean_plain;
  double y_mean_biased;
  double separation;  // (gap)^2 / (var_plain + var_biased)
  double closed_form_biased_mean;
};

struct SeparationReport {
  std::vector<SeparationRow> rows;
};

// second-moment separation statistic between the plain and size-biased
// environment laws along an a-sweep
SeparationReport size_biased_shift_test(const LevyIntensity& lam, double beta,
                                        const std::vector<double>& levels, int d,
                                        double L, int n_replicas,
                                        std::uint64_t seed);

struct BlowupRow {
  int j;
  double lambda_j;        // Poisson mean of qualifying atoms
  double predicted_prob;  // 1 - e^{-lambda_j}
  double empirical_prob;
  std::uint64_t n_clouds;
};

// A_j = { exists atom: t in [1/2,1], ||x||_inf in [2^{j-1}, 2^j),
//         log u >= 4^{j+1} }, evaluated on clouds sampled over expanding
// windows; lambda_j uses the sup-norm annulus volume 2^{d(j+1)}(1-2^{-d})/2
std::vector<BlowupRow> blowup_events(const LevyIntensity& lam, int d, int j_max,
                                     double a_min, int n_clouds,
                                     std::uint64_t seed);

double blowup_lambda_j(const LevyIntensity& lam, int d, int j);

// sup over nonempty atom subsets of G - (eps/2) H, by the max-subchain DP;
// -inf for an empty view
double entropy_energy_sup(const CloudView& view, double eps);
double entropy_energy_sup_bruteforce(const CloudView& view, double eps);

// sup over atoms of log(u rho_t(x)); -inf for an empty view
double sup_weight_statistic(const CloudView& view);

}  // namespace levypoly
