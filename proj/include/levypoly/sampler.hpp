#pragma once

#include <functional>
#include <span>
#include <vector>

#include "levypoly/partition.hpp"

namespace levypoly {

// A drawn polymer path: atom skeleton plus bridge-filled positions on a grid.
struct PolymerPath {
  std::vector<std::uint32_t> skeleton;  // indices into the view, time order
  std::vector<double> grid;             // includes the skeleton times
  std::vector<double> positions;        // flattened grid.size() x d
  std::vector<bool> is_atom;            // per grid time
  LogValue skeleton_weight;             // w_{a,beta}(sigma)
};

// sequential categorical draw from the backward tables; the resulting sigma
// has probability exactly w(sigma)/Z
std::vector<std::uint32_t> sample_skeleton(const CloudView& view,
                                           const DPTables& tables,
                                           RngStream& rng);

// skeleton ~ w/Z, then Brownian-bridge filling through the skeleton atoms and
// free motion beyond the last one
PolymerPath sample_path(const CloudView& view, double beta, double T,
                        std::span<const double> grid, RngStream& rng);

struct MonteCarloEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

using PathFunctional =
    std::function<double(std::span<const double> grid, std::span<const double> positions, int d)>;

MonteCarloEstimate estimate_Q_of_f(const CloudView& view, double beta, double T,
                                   const PathFunctional& f,
                                   std::span<const double> grid,
                                   std::uint64_t n_samples, RngStream& rng);

// finite-dimensional marginal density of the polymer measure at
// (times_i, positions_i), times ending at T:
//   prod_i Z[(t_{i-1},x_{i-1}),(t_i,x_i)] / Z_T
LogValue marginal_density(const PointCloud& cloud, double beta,
                          const TruncationWindow& w,
                          std::span<const double> times,
                          std::span<const double> positions);

}  // namespace levypoly
