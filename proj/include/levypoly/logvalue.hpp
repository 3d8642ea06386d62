#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace levypoly {

// A strictly positive quantity stored as its natural log, with an exact-zero
// flag. All partition values, kernels and skeleton weights live here.
class LogValue {
 public:
  LogValue() : log_(-std::numeric_limits<double>::infinity()) {}  // zero

  static LogValue from_log(double lv) { return LogValue(lv); }
  static LogValue from_value(double v) {
    if (v < 0.0) throw std::domain_error("LogValue: negative value");
    return v == 0.0 ? LogValue() : LogValue(std::log(v));
  }
  static LogValue zero() { return LogValue(); }
  static LogValue one() { return LogValue(0.0); }

  bool is_zero() const { return std::isinf(log_) && log_ < 0.0; }
  double log() const { return log_; }
  double value() const { return is_zero() ? 0.0 : std::exp(log_); }

  LogValue operator*(LogValue o) const {
    if (is_zero() || o.is_zero()) return zero();
    return LogValue(log_ + o.log_);
  }
  LogValue operator/(LogValue o) const {
    if (o.is_zero()) throw std::domain_error("LogValue: divide by zero");
    if (is_zero()) return zero();
    return LogValue(log_ - o.log_);
  }
  LogValue operator+(LogValue o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    double hi = std::max(log_, o.log_), lo = std::min(log_, o.log_);
    return LogValue(hi + std::log1p(std::exp(lo - hi)));
  }
  LogValue pow(double e) const {
    if (is_zero()) return e == 0.0 ? one() : zero();
    return LogValue(log_ * e);
  }
  bool operator<(LogValue o) const { return log_ < o.log_; }
  bool operator>(LogValue o) const { return log_ > o.log_; }

 private:
  explicit LogValue(double lv) : log_(lv) {}
  double log_;
};

// log(sum_i exp(logs[i])), two-pass max shift with compensated summation;
// tolerates -inf entries (exact zeros)
inline double log_sum_exp(std::span<const double> logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (std::isinf(m) && m < 0.0) return m;  // all zero
  double sum = 0.0, comp = 0.0;
  for (double v : logs) {
    double term = std::exp(v - m) - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return m + std::log(sum);
}

inline LogValue log_sum_exp(std::span<const LogValue> vals) {
  std::vector<double> logs(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) logs[i] = vals[i].log();
  return LogValue::from_log(log_sum_exp(std::span<const double>(logs)));
}

}  // namespace levypoly
