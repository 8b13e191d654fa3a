#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace sos {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(x))) without overflow; returns -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Running log-sum-exp accumulator.
class LogSumExp {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= hi_) {
      acc_ += std::exp(x - hi_);
    } else {
      acc_ = acc_ * std::exp(hi_ - x) + 1.0;
      hi_ = x;
    }
  }
  double value() const { return hi_ == kNegInf ? kNegInf : hi_ + std::log(acc_); }

 private:
  double hi_ = kNegInf;
  double acc_ = 0.0;
};

}  // namespace sos
