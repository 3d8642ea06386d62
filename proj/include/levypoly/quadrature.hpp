#pragma once

#include <functional>
#include <vector>

namespace levypoly {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};

// adaptive Gauss-Kronrod 7-15 on [a,b]
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 0.0,
                     int max_depth = 48);

// n-point Gauss-Legendre nodes/weights on [a,b]
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  GaussLegendre(int n, double a, double b);
};

}  // namespace levypoly
