#pragma once

#include <cstddef>
#include <span>

namespace georoute {

/// Sample summary with normal-approximation confidence intervals.
struct EstimatorResult {
  double mean = 0.0;
  double variance = 0.0;        // unbiased (n - 1 denominator)
  double ci_halfwidth = 0.0;    // for the mean
  double variance_ci_halfwidth = 0.0;  // delta method, uses the fourth central moment
  std::size_t n_samples = 0;    // values that entered the moments
  std::size_t n_failures = 0;   // trials excluded from the moments

  double std_error() const;
};

/// Two-pass mean/variance of `values`; `confidence` in (0, 1).
EstimatorResult summarize(std::span<const double> values, double confidence = 0.95, std::size_t n_failures = 0);

/// Two-sided standard normal quantile for the given confidence level.
double normal_critical(double confidence);

/// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p);
/// P(X >= k) for X ~ Binomial(n, p).
double binomial_sf(std::size_t k, std::size_t n, double p);
/// Upper one-sided normal tail P(Z >= z).
double normal_sf(double z);

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace georoute
