#pragma once

#include <span>
#include <vector>

#include "levypoly/logvalue.hpp"
#include "levypoly/rng.hpp"

namespace levypoly {

struct SpaceTimePoint {
  double t;
  std::vector<double> x;  // dimension d
};

namespace kernel {

// log rho_t(x) = -(d/2) log(2 pi t) - |x|^2 / (2t), with |x|^2 given
inline double log_heat(double t, double dist2, int d) {
  return -0.5 * d * std::log(2.0 * M_PI * t) - dist2 / (2.0 * t);
}

LogValue heat_kernel_log(double t, std::span<const double> x);

// log prod rho_{t_i - t_{i-1}}(x_i - x_{i-1}) from an origin through points
LogValue kernel_chain_log(std::span<const SpaceTimePoint> points,
                          const SpaceTimePoint& origin);

// int rho_t(x)^2 dx = 2^{-d} (pi t)^{-d/2}
double squared_kernel_integral(double t, int d);

// int_{0<t_1<...<t_m<T} prod (t_i - t_{i-1})^{-exponent} dt, closed Gamma form;
// final_gap adds the factor (T - t_m)^{-exponent}
double simplex_series_coefficient(int m, double exponent, double T,
                                  bool final_gap = false);

// Brownian path through the anchors, sampled on grid times; exact bridge law
// between consecutive anchors, free motion after the last one. Anchors must
// include the start; grid must contain every anchor time.
// Returns positions flattened (grid.size() x d).
std::vector<double> bridge_fill(std::span<const SpaceTimePoint> anchors,
                                std::span<const double> grid, int d,
                                RngStream& rng);

}  // namespace kernel
}  // namespace levypoly
