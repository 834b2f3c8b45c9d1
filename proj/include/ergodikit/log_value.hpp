#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace ergodikit {

/// Nonnegative real stored as its logarithm plus an exact-zero flag.
class LogValue {
 public:
  constexpr LogValue() = default;

  static constexpr LogValue zero() { return LogValue(); }
  static LogValue from_log(double log_value) {
    LogValue v;
    v.log_ = log_value;
    v.zero_ = false;
    return v;
  }
  static LogValue from_value(double value) { return value > 0.0 ? from_log(std::log(value)) : zero(); }

  bool is_zero() const noexcept { return zero_; }
  /// -inf when zero.
  double log() const noexcept { return zero_ ? -std::numeric_limits<double>::infinity() : log_; }
  double value() const noexcept { return zero_ ? 0.0 : std::exp(log_); }

  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.zero_) return b;
    if (b.zero_) return a;
    const double hi = std::max(a.log_, b.log_);
    const double lo = std::min(a.log_, b.log_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  friend bool operator==(const LogValue&, const LogValue&) = default;

 private:
  double log_ = 0.0;
  bool zero_ = true;
};

/// log-sum-exp over the terms in the given order.
inline LogValue log_sum(std::span<const LogValue> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& t : terms) {
    if (!t.is_zero()) {
      hi = std::max(hi, t.log());
      any = true;
    }
  }
  if (!any) return LogValue::zero();
  double acc = 0.0;
  for (const auto& t : terms) {
    if (!t.is_zero()) acc += std::exp(t.log() - hi);
  }
  return LogValue::from_log(hi + std::log(acc));
}

}  // namespace ergodikit
