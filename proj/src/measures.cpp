#include "levypoly/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levypoly/quadrature.hpp"

namespace levypoly {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::convergent: return "convergent";
    case Regime::degenerate_to_zero: return "degenerate-to-zero";
    case Regime::degenerate_to_infinity: return "degenerate-to-infinity";
    default: return "undecided";
  }
}

namespace {

// cc * int_{wlo}^{whi} e^{beta w} w^{wpow} dw, whi may be inf, wlo >= 0
ExtReal wexp_moment(double cc, double beta, double wpow, double wlo, double whi) {
  if (whi == kInf) {
    if (beta > 0.0) return ExtReal::inf();
    if (beta == 0.0) {
      if (wpow >= -1.0) return ExtReal::inf();
      if (wlo <= 0.0) return ExtReal::inf();
      return ExtReal::finite(cc * std::pow(wlo, wpow + 1.0) / (-wpow - 1.0));
    }
    whi = wlo + (100.0 + 20.0 * std::fabs(wpow)) / (-beta);
  }
  if (whi <= wlo) return ExtReal::finite(0.0);
  if (wlo <= 0.0 && wpow < 0.0) wlo = std::min(1e-14, whi * 0.5);  // w=0 endpoint
  auto f = [&](double w) { return std::exp(beta * w) * std::pow(w, wpow); };
  return ExtReal::finite(cc * integrate(f, wlo, whi, 1e-12).value);
}

// int_lo^hi u^sigma du (g = 0, no log factor)
ExtReal power_int(double c, double sigma, double lo, double hi) {
  const double beta = sigma + 1.0;
  if (hi == kInf) {
    if (beta >= 0.0) return ExtReal::inf();
    return ExtReal::finite(-c * std::pow(lo, beta) / beta);
  }
  if (lo == 0.0) {
    if (beta <= 0.0) return ExtReal::inf();
    return ExtReal::finite(c * std::pow(hi, beta) / beta);
  }
  if (beta == 0.0) return ExtReal::finite(c * std::log(hi / lo));
  return ExtReal::finite(c * (std::pow(hi, beta) - std::pow(lo, beta)) / beta);
}

// int u^sigma |log u| du on [lo,hi] not crossing 1
ExtReal power_abslog_onesided(double c, double sigma, double lo, double hi) {
  const double beta = sigma + 1.0;
  const double sign = (hi <= 1.0) ? -1.0 : 1.0;  // |log u| = sign * log u
  auto antider = [&](double u) {  // int u^{beta-1} log u du
    double lb = std::pow(u, beta);
    return lb * std::log(u) / beta - lb / (beta * beta);
  };
  if (hi == kInf) {
    if (beta >= 0.0) return ExtReal::inf();
    return ExtReal::finite(c * sign * (0.0 - antider(lo)));
  }
  if (lo == 0.0) {
    if (beta <= 0.0) return ExtReal::inf();
    return ExtReal::finite(c * sign * antider(hi));  // antider -> 0 at 0+
  }
  if (beta == 0.0) {
    double v = (std::log(hi) * std::log(hi) - std::log(lo) * std::log(lo)) / 2.0;
    return ExtReal::finite(c * sign * v);
  }
  return ExtReal::finite(c * sign * (antider(hi) - antider(lo)));
}

}  // namespace

ExtReal LevyIntensity::piece_moment(const Piece& pc, double p, double a,
                                    double b, int abslog_pow) const {
  const double lo = std::max(a, pc.lo), hi = std::min(b, pc.hi);
  if (!(hi > lo)) return ExtReal::finite(0.0);
  const double sigma = p + pc.s;
  if (pc.g == 0.0) {
    if (abslog_pow == 0) return power_int(pc.c, sigma, lo, hi);
    if (lo < 1.0 && hi > 1.0) {
      auto l = power_abslog_onesided(pc.c, sigma, lo, 1.0);
      auto r = power_abslog_onesided(pc.c, sigma, 1.0, hi);
      if (l.infinite || r.infinite) return ExtReal::inf();
      return ExtReal::finite(l.value + r.value);
    }
    return power_abslog_onesided(pc.c, sigma, lo, hi);
  }
  // log-corrected piece, entirely on one side of u = 1
  const double cc = pc.c * std::pow(pc.wref, pc.g);
  const double wpow = abslog_pow - pc.g;
  if (pc.hi <= 1.0) {  // head: w = log(1/u)
    double wlo = std::log(1.0 / hi);
    double whi = (lo == 0.0) ? kInf : std::log(1.0 / lo);
    return wexp_moment(cc, -(sigma + 1.0), wpow, wlo, whi);
  }
  // tail: w = log u
  double wlo = std::log(lo);
  double whi = (hi == kInf) ? kInf : std::log(hi);
  return wexp_moment(cc, sigma + 1.0, wpow, wlo, whi);
}

ExtReal LevyIntensity::moment(double p, double a, double b) const {
  ExtReal total = ExtReal::finite(0.0);
  for (const auto& pc : pieces_) {
    ExtReal v = piece_moment(pc, p, a, b, 0);
    if (v.infinite) return ExtReal::inf();
    total.value += v.value;
  }
  return total;
}

ExtReal LevyIntensity::moment_abslog(double p, double a, double b) const {
  ExtReal total = ExtReal::finite(0.0);
  for (const auto& pc : pieces_) {
    ExtReal v = piece_moment(pc, p, a, b, 1);
    if (v.infinite) return ExtReal::inf();
    total.value += v.value;
  }
  return total;
}

ExtReal LevyIntensity::log_moment_upper(double q) const {
  ExtReal total = ExtReal::finite(0.0);
  for (const auto& pc : pieces_) {
    const double lo = std::max(1.0, pc.lo), hi = pc.hi;
    if (!(hi > lo)) continue;
    const double cc = pc.c * std::pow(pc.wref, pc.g);
    ExtReal v = wexp_moment(cc, pc.s + 1.0, q - pc.g, std::log(lo),
                            hi == kInf ? kInf : std::log(hi));
    if (v.infinite) return ExtReal::inf();
    total.value += v.value;
  }
  return total;
}

double LevyIntensity::mass_above(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("mass_above: need a > 0");
  return moment(0.0, a, kInf).require_finite("lambda([a,inf))");
}

double LevyIntensity::mass_above_log(double w) const {
  if (w <= 700.0) return mass_above(std::exp(std::max(w, -700.0)));
  // thresholds beyond double range: only infinite-tail pieces can contribute
  double total = 0.0;
  for (const auto& pc : pieces_) {
    if (pc.hi != kInf) continue;
    const double beta = pc.s + 1.0;
    if (pc.g == 0.0) {
      total += -pc.c * std::exp(beta * w) / beta;  // beta < 0 by construction
    } else {
      const double ww = std::max(w, pc.wref);
      total += pc.c * std::pow(pc.wref, pc.g) * std::pow(ww, 1.0 - pc.g) /
               (pc.g - 1.0);
    }
  }
  return total;
}

double LevyIntensity::mass(double a, double b) const {
  return moment(0.0, a, b).require_finite("lambda([a,b))");
}

double LevyIntensity::kappa(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("kappa: need a > 0");
  if (a >= 1.0) return 0.0;
  return moment(1.0, a, 1.0).require_finite("kappa_a");
}

ExtReal LevyIntensity::mu(double b) const {
  if (!(b > 1.0)) return ExtReal::finite(0.0);
  return moment(1.0, 1.0, b);
}

double LevyIntensity::second_moment_mass(const TruncationWindow& w) const {
  return moment(2.0, w.a, w.b).require_finite("V window");
}

AdmissibilityReport LevyIntensity::check_admissibility(int d) const {
  if (d < 1) throw std::invalid_argument("check_admissibility: d >= 1");
  AdmissibilityReport rep;
  rep.alpha_c = (d <= 2) ? 2.0 : 1.0 + 2.0 / d;
  rep.hypolarge_ok = !log_moment_upper(d / 2.0).infinite;

  const double pmax = 1.0 + 2.0 / d;
  if (d == 1) {
    rep.hyposmall_ok = !moment(2.0, 0.0, 1.0).infinite;
    rep.witness_p = 2.0;
    rep.hyposmall2_ok = rep.hyposmall_ok;
  } else {
    // critical small-mark exponent from the piece touching 0
    double p_crit = -kInf;
    for (const auto& pc : pieces_)
      if (pc.lo == 0.0) p_crit = std::max(p_crit, -1.0 - pc.s);
    rep.hyposmall_ok = p_crit < pmax;
    if (rep.hyposmall_ok)
      rep.witness_p = std::max(0.5 * (std::max(p_crit, 1.0) + pmax), 1.0 + 1e-9);
    if (d == 2)
      rep.hyposmall2_ok = !moment_abslog(2.0, 0.0, 1.0).infinite;
    else
      rep.hyposmall2_ok = !moment(pmax, 0.0, 1.0).infinite;
  }

  if (!rep.hypolarge_ok)
    rep.regime = Regime::degenerate_to_infinity;
  else if (rep.hyposmall_ok)
    rep.regime = Regime::convergent;
  else if (!rep.hyposmall2_ok)
    rep.regime = Regime::degenerate_to_zero;
  else
    rep.regime = Regime::undecided;
  return rep;
}

double LevyIntensity::sample_restricted(double a, double b, int k,
                                        RngStream& rng) const {
  if (!(a >= 0.0) || !(b > a))
    throw std::invalid_argument("sample_restricted: bad range");
  double masses[16];
  double total = 0.0;
  if (pieces_.size() > 16) throw std::logic_error("too many pieces");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    ExtReal m = piece_moment(pieces_[i], double(k), a, b, 0);
    masses[i] = m.require_finite("sample_restricted mass");
    total += masses[i];
  }
  if (total <= 0.0) throw std::domain_error("sample_restricted: empty restriction");
  double r = rng.uniform01() * total;
  std::size_t i = 0;
  while (i + 1 < pieces_.size() && r > masses[i]) r -= masses[i], ++i;
  const Piece& pc = pieces_[i];
  const double lo = std::max(a, pc.lo), hi = std::min(b, pc.hi);
  const double sigma = k + pc.s, beta = sigma + 1.0;
  if (pc.g == 0.0) {
    double u01 = rng.uniform01();
    if (beta == 0.0) return lo * std::pow(hi / lo, u01);
    if (hi == kInf)  // beta < 0
      return lo * std::pow(1.0 - u01, 1.0 / beta);
    double plo = std::pow(lo, beta), phi = std::pow(hi, beta);
    return std::pow(plo + u01 * (phi - plo), 1.0 / beta);
  }
  if (pc.hi > 1.0 && hi == kInf && beta == 0.0) {
    // log-corrected tail with k + s = -1: closed-form inversion in w
    double wlo = std::log(lo);
    double g = pc.g;
    double w = wlo * std::pow(1.0 - rng.uniform01(), 1.0 / (1.0 - g));
    if (w > 700.0) throw std::overflow_error("mark beyond double range");
    return std::exp(w);
  }
  // rejection against the pure power-law envelope; (w/wref)^{-g} <= 1 on piece
  for (int tries = 0; tries < 100000; ++tries) {
    double u;
    double u01 = rng.uniform01();
    if (beta == 0.0)
      u = lo * std::pow(hi / lo, u01);
    else if (hi == kInf)
      u = lo * std::pow(1.0 - u01, 1.0 / beta);
    else {
      double plo = std::pow(lo, beta), phi = std::pow(hi, beta);
      u = std::pow(plo + u01 * (phi - plo), 1.0 / beta);
    }
    double w = std::fabs(std::log(u));
    if (rng.uniform01() <= std::pow(w / pc.wref, -pc.g)) return u;
  }
  throw std::runtime_error("sample_restricted: rejection stalled");
}

LevyIntensity LevyIntensity::alpha_stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha_stable: alpha in (0,2)");
  LevyIntensity lam;
  lam.alpha_ = alpha;
  lam.pieces_.push_back({0.0, kInf, alpha, -1.0 - alpha, 0.0, 1.0});
  std::ostringstream os;
  os << "alpha_stable(" << alpha << ")";
  lam.description_ = os.str();
  return lam;
}

LevyIntensity LevyIntensity::tabulated(std::vector<double> nodes,
                                       std::vector<double> densities,
                                       const std::string& head,
                                       const std::string& tail) {
  if (nodes.size() < 2 || nodes.size() != densities.size())
    throw std::invalid_argument("tabulated: need >= 2 (node, density) pairs");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] > 0.0) || !(densities[i] > 0.0))
      throw std::invalid_argument("tabulated: nodes and densities must be > 0");
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("tabulated: nodes must be strictly increasing");
  }
  LevyIntensity lam;
  lam.nodes_ = nodes;
  lam.dens_ = densities;
  lam.head_spec_ = head;
  lam.tail_spec_ = tail;

  auto parse = [](const std::string& spec) {
    std::istringstream is(spec);
    std::string kind;
    std::vector<double> args;
    is >> kind;
    double v;
    while (is >> v) args.push_back(v);
    return std::pair(kind, args);
  };

  auto [hk, ha] = parse(head);
  if (hk == "power") {
    if (ha.size() != 1) throw std::invalid_argument("head power <slope>");
    double s = ha[0];
    lam.pieces_.push_back(
        {0.0, nodes.front(), densities.front() * std::pow(nodes.front(), -s), s, 0.0, 1.0});
  } else if (hk == "log_power") {
    if (ha.size() != 2) throw std::invalid_argument("head log_power <slope> <g>");
    if (!(nodes.front() < 1.0))
      throw std::invalid_argument("log_power head needs first node < 1");
    double s = ha[0], g = ha[1], w0 = std::log(1.0 / nodes.front());
    lam.pieces_.push_back({0.0, nodes.front(),
                           densities.front() * std::pow(nodes.front(), -s), s, g, w0});
  } else if (hk != "none") {
    throw std::invalid_argument("unknown head spec: " + head);
  }

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double s = std::log(densities[i + 1] / densities[i]) /
               std::log(nodes[i + 1] / nodes[i]);
    lam.pieces_.push_back(
        {nodes[i], nodes[i + 1], densities[i] * std::pow(nodes[i], -s), s, 0.0, 1.0});
  }

  auto [tk, ta] = parse(tail);
  if (tk == "power") {
    if (ta.size() != 1) throw std::invalid_argument("tail power <slope>");
    double s = ta[0];
    if (!(s < -1.0))
      throw std::invalid_argument("power tail needs slope < -1 for finite mass");
    lam.pieces_.push_back(
        {nodes.back(), kInf, densities.back() * std::pow(nodes.back(), -s), s, 0.0, 1.0});
  } else if (tk == "log_power") {
    if (ta.size() != 1) throw std::invalid_argument("tail log_power <g>");
    double g = ta[0];
    if (!(g > 1.0)) throw std::invalid_argument("log_power tail needs g > 1");
    if (!(nodes.back() > 1.0))
      throw std::invalid_argument("log_power tail needs last node > 1");
    double w1 = std::log(nodes.back());
    lam.pieces_.push_back(
        {nodes.back(), kInf, densities.back() * nodes.back(), -1.0, g, w1});
  } else if (tk != "none") {
    throw std::invalid_argument("unknown tail spec: " + tail);
  }

  std::ostringstream os;
  os << "tabulated(" << nodes.size() << " nodes, [" << nodes.front() << ","
     << nodes.back() << "], head=" << head << ", tail=" << tail << ")";
  lam.description_ = os.str();
  lam.mass_above(nodes.front());  // validates finite upper mass
  return lam;
}

LevyIntensity LevyIntensity::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# levy-intensity v1", 0) != 0)
    throw std::runtime_error("levy-intensity file: missing '# levy-intensity v1' header");
  std::string head = "none", tail = "none";
  std::vector<double> nodes, dens;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string word;
      is >> word;
      if (word == "head") std::getline(is >> std::ws, head);
      else if (word == "tail") std::getline(is >> std::ws, tail);
      continue;
    }
    std::istringstream is(line);
    double v, de;
    if (!(is >> v >> de))
      throw std::runtime_error("levy-intensity file: bad data line: " + line);
    nodes.push_back(v);
    dens.push_back(de);
  }
  return tabulated(std::move(nodes), std::move(dens), head, tail);
}

LevyIntensity LevyIntensity::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

void LevyIntensity::save(std::ostream& out) const {
  if (is_alpha_stable())
    throw std::logic_error("save: only tabulated intensities have a file form");
  out << "# levy-intensity v1\n";
  if (head_spec_ != "none") out << "# head " << head_spec_ << "\n";
  if (tail_spec_ != "none") out << "# tail " << tail_spec_ << "\n";
  char buf[80];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", nodes_[i], dens_[i]);
    out << buf;
  }
}

std::string LevyIntensity::descriptor_json() const {
  std::ostringstream os;
  os.precision(17);
  if (is_alpha_stable()) {
    os << "{\"kind\":\"alpha_stable\",\"alpha\":" << alpha_ << "}";
  } else {
    os << "{\"kind\":\"tabulated\",\"head\":\"" << head_spec_ << "\",\"tail\":\""
       << tail_spec_ << "\",\"nodes\":[";
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      os << (i ? "," : "") << nodes_[i];
    os << "],\"densities\":[";
    for (std::size_t i = 0; i < dens_.size(); ++i) os << (i ? "," : "") << dens_[i];
    os << "]}";
  }
  return os.str();
}

// ---- stochastic-comparison constants and tail-integral oracles ----

double compare_cq(const LevyIntensity& lam, double q, double p) {
  double cp = lam.moment(p, 0.0, 1.0).require_finite("int u^p lambda, u<1");
  double mu = lam.mu().require_finite("mu");
  double muq = lam.mu(q).value;
  return std::max(cp + mu, muq * std::pow(q, p - 1.0));
}

double compare1_constant(const LevyIntensity& lam, double q, double p) {
  return compare_cq(lam, q, p) * (p - 1.0) / (1.0 - std::pow(2.0, 1.0 - p));
}

double compare2_constant(const LevyIntensity& lam, double q, double p) {
  double cq = lam.moment(p, 0.0, q).require_finite("int u^p lambda, u<q");
  return (2.0 - p) * cq;
}

TailBoundResult tail_bound_upper(const LevyIntensity& lam, double q, int m,
                                 double h, double eps, double p,
                                 std::uint64_t n_samples, RngStream& rng) {
  if (!(h > 0.0 && h < 1.0) || m < 1 || !(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("tail_bound_upper: bad parameters");
  TailBoundResult r;
  double cq = compare1_constant(lam, q, p) * std::pow(q, 1.0 - p);
  r.rhs = std::pow(std::pow(2.0, eps) * cq / eps, m) *
          std::pow(h, 1.0 - p - eps) / (p - 1.0);
  // constraint prod u_j >= h q^m forces every u_j >= h q
  const double lo = h * q;
  const double norm = lam.moment(1.0, lo, q).value;
  if (m == 1) {
    r.lhs = norm;
    return r;
  }
  const double log_thresh = std::log(h) + m * std::log(q);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    double lp = 0.0;
    for (int j = 0; j < m; ++j) lp += std::log(lam.sample_restricted(lo, q, 1, rng));
    if (lp >= log_thresh) ++hits;
  }
  double phat = double(hits) / double(n_samples);
  r.lhs = std::pow(norm, m) * phat;
  r.lhs_se = std::pow(norm, m) *
             std::sqrt(std::max(phat * (1.0 - phat), 1e-12) / double(n_samples));
  r.variance_flag = (r.lhs > 0.0 && r.lhs_se / r.lhs > 0.10);
  return r;
}

TailBoundResult tail_bound_lower_window(const LevyIntensity& lam, double q,
                                        int m, double h, double eps, double p,
                                        std::uint64_t n_samples, RngStream& rng) {
  if (!(h > 0.0 && h < 1.0) || m < 1 || !(eps > 0.0 && eps < 2.0 - p))
    throw std::invalid_argument("tail_bound_lower_window: bad parameters");
  TailBoundResult r;
  double Cq = compare2_constant(lam, q, p) * std::pow(q, 2.0 - p);
  r.rhs = std::pow(Cq / eps, m) * std::pow(h, 2.0 - p - eps) / (2.0 - p - eps);
  const double norm = lam.moment(2.0, 0.0, q).require_finite("V_q");
  if (m == 1) {
    r.lhs = lam.moment(2.0, 0.0, h * q).value;
    return r;
  }
  const double log_thresh = std::log(h) + m * std::log(q);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    double lp = 0.0;
    for (int j = 0; j < m; ++j) lp += std::log(lam.sample_restricted(0.0, q, 2, rng));
    if (lp <= log_thresh) ++hits;
  }
  double phat = double(hits) / double(n_samples);
  r.lhs = std::pow(norm, m) * phat;
  r.lhs_se = std::pow(norm, m) *
             std::sqrt(std::max(phat * (1.0 - phat), 1e-12) / double(n_samples));
  r.variance_flag = (r.lhs > 0.0 && r.lhs_se / r.lhs > 0.10);
  return r;
}

}  // namespace levypoly
