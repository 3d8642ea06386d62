#include "levypoly/quadrature.hpp"

#include <cmath>

namespace levypoly {

namespace {

// Kronrod 15 nodes/weights on [-1,1]; Gauss 7 uses every other node
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct Panel {
  double value, err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * kWg[3], resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double fv = f(c - h * kXgk[j]) + f(c + h * kXgk[j]);
    resk += kWgk[j] * fv;
    if (j % 2 == 1) resg += kWg[j / 2] * fv;
  }
  Panel p;
  p.value = resk * h;
  p.err = std::fabs((resk - resg) * h);
  return p;
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol_here, int depth, int max_depth, double& acc, double& err,
           bool& ok) {
  Panel p = gk15(f, a, b);
  if (p.err <= tol_here || depth >= max_depth) {
    acc += p.value;
    err += p.err;
    if (depth >= max_depth && p.err > tol_here) ok = false;
    return;
  }
  double m = 0.5 * (a + b);
  adapt(f, a, m, tol_here / 1.8, depth + 1, max_depth, acc, err, ok);
  adapt(f, m, b, tol_here / 1.8, depth + 1, max_depth, acc, err, ok);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_depth) {
  QuadResult r;
  if (a == b) return r;
  Panel first = gk15(f, a, b);
  double tol = std::max(abs_tol, rel_tol * std::fabs(first.value));
  if (tol == 0.0) tol = rel_tol;
  double acc = 0.0, err = 0.0;
  bool ok = true;
  adapt(f, a, b, std::max(tol, 1e-300), 0, max_depth, acc, err, ok);
  r.value = acc;
  r.abs_error = err;
  r.converged = ok && (err <= std::max(abs_tol, rel_tol * std::fabs(acc)) * 50.0 + 1e-300);
  return r;
}

GaussLegendre::GaussLegendre(int n, double a, double b) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from Chebyshev-like initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    nodes[i] = xm - xl * x;
    nodes[n - 1 - i] = xm + xl * x;
    weights[i] = 2.0 * xl / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

}  // namespace levypoly
