#pragma once

#include <functional>
#include <span>
#include <vector>

#include "levypoly/partition.hpp"

namespace levypoly {

// Initial measure for the truncated-noise heat-equation field. Signed data is
// split into positive and negative parts where needed.
class InitialCondition {
 public:
  enum class Kind { dirac, bounded_density, atomic_measure };

  static InitialCondition dirac(std::vector<double> y);
  // masses may be signed; ys flattened (k x d)
  static InitialCondition atomic(std::vector<double> ys, std::vector<double> masses,
                                 int d);
  // bounded measurable density on the box [-half_width, half_width]^d;
  // growth_rate is the declared limsup r^{-2} log |u0|([-r,r]^d) (0 for any
  // compactly supported measure)
  static InitialCondition density(std::function<double(std::span<const double>)> f,
                                  double box_half_width, int d,
                                  double growth_rate = 0.0);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  double growth_rate() const { return growth_rate_; }
  // the well-posedness condition limsup r^{-2} log |u0|([-r,r]^d) < 1/(2T)
  void require_admissible(double T) const;

  const std::vector<double>& atoms_y() const { return ys_; }
  const std::vector<double>& atoms_mass() const { return masses_; }
  double box() const { return box_; }
  double eval_density(std::span<const double> y) const { return f_(y); }

 private:
  Kind kind_ = Kind::dirac;
  int d_ = 1;
  std::vector<double> ys_;      // dirac: the single point; atomic: k x d
  std::vector<double> masses_;  // atomic masses
  std::function<double(std::span<const double>)> f_;
  double box_ = 0.0;
  double growth_rate_ = 0.0;
};

struct SheValue {
  double value = 0.0;      // signed when u0 is signed
  double quad_error = 0.0; // estimated quadrature error (density kind only)
};

// u^{[a,b)}(t,x) = int Z^{omega,[a,b)}[(0,y),(t,x)] u0(dy)
SheValue she_value(const PointCloud& cloud, double beta,
                   const TruncationWindow& w, const InitialCondition& u0,
                   double t, std::span<const double> x);

struct MildResidualReport {
  double max_rel_residual = 0.0;
  std::vector<double> residuals;  // per evaluation point
  double drift_quad_points = 0.0; // quadrature budget actually used
};

// Checks u(t,x) = int rho_t(x-y) u0(dy)
//              + beta [ sum_atoms rho_{t-s}(x-y) u(s,y) v
//                       - (kappa_a - kappa_b) int_0^t int rho_{t-s}(x-y) u(s,y) dy ds ]
// at the given evaluation points. The atom sum is exact; the drift double
// integral uses an (s_nodes x y_nodes) Gauss-Legendre rule, so the residual is
// quadrature-limited. d = 1 only.
MildResidualReport mild_residual(const PointCloud& cloud, double beta,
                                 const TruncationWindow& w,
                                 const InitialCondition& u0,
                                 std::span<const double> eval_t,
                                 std::span<const double> eval_x, int s_nodes,
                                 int y_nodes);

}  // namespace levypoly
