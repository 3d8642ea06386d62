#pragma once

#include <cmath>
#include <stdexcept>

namespace levypoly {

// regularized lower incomplete gamma P(a,x); Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// survival function of chi-square with k degrees of freedom
inline double chi2_sf(double x, double k) { return gamma_q(k / 2.0, x / 2.0); }

// Kolmogorov distribution survival Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}
double kolmogorov_sf(double lambda);

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(|N(0,1)| <= z)
inline double normal_abs_cdf(double z) { return std::erf(z / std::sqrt(2.0)); }

}  // namespace levypoly
