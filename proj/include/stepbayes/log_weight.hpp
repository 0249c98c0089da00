#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>

namespace stepbayes {

/// A nonnegative weight carried by its natural logarithm.
///
/// Predictive probabilities behave like exp(-n H), which underflows a double
/// long before n reaches experimental sizes, so every weight in the library
/// lives in log space. Multiplication adds logs; addition is a stable
/// log-sum-exp. The default value is weight zero.
class LogWeight {
 public:
  constexpr LogWeight() noexcept = default;

  static constexpr LogWeight from_log(double log_value) noexcept {
    LogWeight w;
    w.log_ = log_value;
    return w;
  }
  static LogWeight from_linear(double value) noexcept {
    return from_log(value > 0.0 ? std::log(value) : kNegInf);
  }
  static constexpr LogWeight zero() noexcept { return LogWeight{}; }
  static constexpr LogWeight one() noexcept { return from_log(0.0); }

  constexpr double log() const noexcept { return log_; }
  double linear() const noexcept { return std::exp(log_); }
  constexpr bool is_zero() const noexcept { return log_ == kNegInf; }

  LogWeight& operator*=(LogWeight other) noexcept {
    log_ = (is_zero() || other.is_zero()) ? kNegInf : log_ + other.log_;
    return *this;
  }
  LogWeight& operator/=(LogWeight other) noexcept {
    log_ = is_zero() ? kNegInf : log_ - other.log_;
    return *this;
  }
  LogWeight& operator+=(LogWeight other) noexcept {
    if (other.is_zero()) return *this;
    if (is_zero()) {
      log_ = other.log_;
      return *this;
    }
    const double hi = log_ > other.log_ ? log_ : other.log_;
    const double lo = log_ > other.log_ ? other.log_ : log_;
    log_ = hi + std::log1p(std::exp(lo - hi));
    return *this;
  }

  friend LogWeight operator*(LogWeight a, LogWeight b) noexcept { return a *= b; }
  friend LogWeight operator/(LogWeight a, LogWeight b) noexcept { return a /= b; }
  friend LogWeight operator+(LogWeight a, LogWeight b) noexcept { return a += b; }
  friend constexpr auto operator<=>(LogWeight a, LogWeight b) noexcept {
    return a.log_ <=> b.log_;
  }
  friend constexpr bool operator==(LogWeight a, LogWeight b) noexcept {
    return a.log_ == b.log_;
  }

 private:
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double log_ = kNegInf;
};

/// log(sum(exp(v))) over a span; -inf for an empty span.
double log_sum_exp(std::span<const double> values) noexcept;

/// Streaming log-sum-exp with a running maximum.
class LogSumExp {
 public:
  void add(double log_value) noexcept {
    if (log_value == kNegInf) return;
    if (log_value > max_) {
      sum_ = sum_ * std::exp(max_ - log_value) + 1.0;
      max_ = log_value;
    } else {
      sum_ += std::exp(log_value - max_);
    }
  }
  double value() const noexcept {
    return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
  }

 private:
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double max_ = kNegInf;
  double sum_ = 0.0;
};

}  // namespace stepbayes
