#include "sos/experiments/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "sos/core/error.hpp"

namespace sos::experiments {

double median(std::vector<double> v) {
  if (v.empty()) throw PreconditionError("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

double median_standard_error(std::vector<double> v) {
  const std::size_t n = v.size();
  if (n < 8) return std::numeric_limits<double>::infinity();
  std::sort(v.begin(), v.end());
  // density at the median from the spread of the central sqrt(n) order statistics
  const auto h = static_cast<std::size_t>(std::max(2.0, std::sqrt(double(n))));
  const std::size_t lo = n / 2 >= h ? n / 2 - h : 0;
  const std::size_t hi = std::min(n - 1, n / 2 + h);
  const double width = v[hi] - v[lo];
  if (width <= 0.0) return 0.0;
  const double density = double(hi - lo) / double(n) / width;
  return 1.0 / (2.0 * density * std::sqrt(double(n)));
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p(double d, double n_eff) {
  const double s = std::sqrt(n_eff);
  return kolmogorov_q((s + 0.12 + 0.11 / s) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw PreconditionError("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, double(i + 1) / n - F, F - double(i) / n});
  }
  return {d, ks_p(d, n), sample.size()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return {d, ks_p(d, na * nb / (na + nb)), a.size() + b.size()};
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y, double level) {
  if (x.size() != y.size() || x.size() < 3) throw PreconditionError("ols needs at least three paired points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_se = std::sqrt(sse / double(n - 2) / sxx);
  const boost::math::students_t t(double(n - 2));
  const double q = boost::math::quantile(boost::math::complement(t, (1.0 - level) / 2.0));
  fit.slope_lo = fit.slope - q * fit.slope_se;
  fit.slope_hi = fit.slope + q * fit.slope_se;
  return fit;
}

Interval wilson_interval(std::size_t k, std::size_t n, double level) {
  if (n == 0) throw PreconditionError("no trials");
  const double z = boost::math::quantile(boost::math::complement(boost::math::normal(), (1.0 - level) / 2.0));
  const double p = double(k) / double(n), nn = double(n);
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Interval rule_of_three(std::size_t n) {
  if (n == 0) throw PreconditionError("no trials");
  return {0.0, 0.0, 3.0 / double(n)};
}

}  // namespace sos::experiments
