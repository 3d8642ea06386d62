#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levypoly/rng.hpp"

namespace levypoly {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A nonnegative extended real. Divergent moments are carried symbolically
// (downstream code branches on mu = inf), never as float overflow.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static ExtReal inf() { return {0.0, true}; }
  static ExtReal finite(double v) { return {v, false}; }
  double require_finite(const char* what) const {
    if (infinite) throw std::domain_error(std::string(what) + ": divergent");
    return value;
  }
};

struct TruncationWindow {
  double a;  // lower mark cutoff, > 0
  double b;  // upper cutoff in (a, inf]

  TruncationWindow(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0.0) || !(b > a))
      throw std::invalid_argument("TruncationWindow: need 0 < a < b");
  }
  bool bounded() const { return b != kInf; }
};

enum class Regime { convergent, degenerate_to_zero, degenerate_to_infinity, undecided };

const char* regime_name(Regime r);

struct AdmissibilityReport {
  bool hypolarge_ok = false;   // int_[1,inf) (log u)^{d/2} lambda(du) < inf
  bool hyposmall_ok = false;   // d=1: int u^2 lambda < inf; d>=2: some p < 1+2/d
  double witness_p = 0.0;      // exponent witnessing hyposmall when d >= 2
  bool hyposmall2_ok = false;  // the near-converse condition
  double alpha_c = 0.0;        // 2 for d <= 2, 1 + 2/d for d >= 3
  Regime regime = Regime::undecided;
};

// A Levy measure on (0, inf) with lambda([a,inf)) < inf for every a > 0.
// Both kinds reduce to a list of power-law pieces
//   density(u) = c u^s (|log u| / wref)^{-g}   on [lo, hi)
// (g = 0 except for declared log-corrected head/tail extensions), so every
// moment functional has a per-piece closed form or a tame 1-d quadrature in
// w = log u. This is why tabulated grids are interpolated log-log linearly:
// quadrature of u^{-1-alpha}-like singularities is fragile, closed forms are
// not.
class LevyIntensity {
 public:
  struct Piece {
    double lo, hi;  // lo may be 0, hi may be inf
    double c, s;    // c u^s
    double g = 0.0, wref = 1.0;
  };

  static LevyIntensity alpha_stable(double alpha);

  // nodes strictly increasing, densities positive; head/tail directives may
  // extend the grid ("none", "power <slope>", "log_power <g>")
  static LevyIntensity tabulated(std::vector<double> nodes,
                                 std::vector<double> densities,
                                 const std::string& head = "none",
                                 const std::string& tail = "none");

  static LevyIntensity load(std::istream& in);
  static LevyIntensity load_file(const std::string& path);
  void save(std::ostream& out) const;

  bool is_alpha_stable() const { return alpha_ > 0.0; }
  double alpha() const { return alpha_; }
  const std::string& description() const { return description_; }

  // int_[a,b) u^p lambda(du); infinite ends handled symbolically
  ExtReal moment(double p, double a, double b) const;
  // int_[a,b) u^p |log u| lambda(du)
  ExtReal moment_abslog(double p, double a, double b) const;
  // int_[1,inf) (log u)^q lambda(du)
  ExtReal log_moment_upper(double q) const;

  double mass_above(double a) const;                    // lambda([a,inf))
  double mass_above_log(double w) const;                // lambda([e^w,inf)), any w
  double mass(double a, double b) const;                // lambda([a,b))
  double kappa(double a) const;                         // int_[a,1) u lambda(du)
  ExtReal mu(double b = kInf) const;                    // int_[1,b) u lambda(du)
  double second_moment_mass(const TruncationWindow& w) const;  // int_[a,b) u^2

  AdmissibilityReport check_admissibility(int d) const;

  // inverse-CDF draw from the normalized restriction of u^k lambda(du) to
  // [a,b); k = 0 is mark sampling, k = 1,2 serve the tail-integral oracles
  double sample_restricted(double a, double b, int k, RngStream& rng) const;

  std::string descriptor_json() const;

 private:
  LevyIntensity() = default;
  ExtReal piece_moment(const Piece& pc, double p, double a, double b,
                       int abslog_pow) const;

  double alpha_ = 0.0;  // > 0 iff alpha-stable
  std::vector<Piece> pieces_;
  std::string description_;
  std::string head_spec_ = "none", tail_spec_ = "none";
  std::vector<double> nodes_, dens_;  // kept for serialization
};

// ---- inequality oracles (tail-integral lemmas and the stochastic
//      comparison propositions they rest on) ----

struct TailBoundResult {
  double lhs = 0.0;      // estimate of the constrained m-fold integral
  double lhs_se = 0.0;   // 0 when lhs is exact (m = 1)
  double rhs = 0.0;      // closed-form bound
  bool variance_flag = false;  // relative standard error above 10%
};

// constant c_q of the first comparison bound: mubar_q(u) <= c_q u^{1-p}
double compare_cq(const LevyIntensity& lam, double q, double p);
// multiplicative constants of the two comparison propositions
double compare1_constant(const LevyIntensity& lam, double q, double p);
double compare2_constant(const LevyIntensity& lam, double q, double p);

// int_{(0,q)^m} 1{prod u_j >= h q^m} prod u_i lambda(du_i)  <=  rhs
TailBoundResult tail_bound_upper(const LevyIntensity& lam, double q, int m,
                                 double h, double eps, double p,
                                 std::uint64_t n_samples, RngStream& rng);
// int_{(0,q)^m} 1{prod u_j <= h q^m} prod u_i^2 lambda(du_i)  <=  rhs
TailBoundResult tail_bound_lower_window(const LevyIntensity& lam, double q,
                                        int m, double h, double eps, double p,
                                        std::uint64_t n_samples, RngStream& rng);

}  // namespace levypoly
