#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sos::experiments {

double median(std::vector<double> values);
/// Standard error of the sample median by the asymptotic normal-density rule,
/// with the density estimated from the central order statistics.
double median_standard_error(std::vector<double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares with a Student-t interval on the slope (n >= 3).
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y, double level = 0.95);

struct Interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double level = 0.95);
/// Zero successes in n trials: 95% upper bound 3/n.
Interval rule_of_three(std::size_t trials);

}  // namespace sos::experiments
