#include "georoute/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

namespace georoute {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double EstimatorResult::std_error() const {
  return n_samples > 0 ? std::sqrt(variance / static_cast<double>(n_samples)) : 0.0;
}

double normal_critical(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence: must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::normal(), (1.0 - confidence) / 2.0));
}

double normal_sf(double z) { return boost::math::cdf(boost::math::complement(boost::math::normal(), z)); }

EstimatorResult summarize(std::span<const double> values, double confidence, std::size_t n_failures) {
  const double z = normal_critical(confidence);
  EstimatorResult r;
  r.n_samples = values.size();
  r.n_failures = n_failures;
  if (values.empty()) return r;
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double n = static_cast<double>(values.size());
  r.mean = s.value() / n;
  if (values.size() < 2) return r;
  CompensatedSum m2, m4;
  for (double v : values) {
    const double dv = v - r.mean;
    m2.add(dv * dv);
    m4.add(dv * dv * dv * dv);
  }
  r.variance = m2.value() / (n - 1.0);
  r.ci_halfwidth = z * std::sqrt(r.variance / n);
  // Var(s^2) ~ (mu4 - sigma^4 (n - 3)/(n - 1)) / n.
  const double mu4 = m4.value() / n;
  const double var_s2 = (mu4 - r.variance * r.variance * (n - 3.0) / (n - 1.0)) / n;
  r.variance_ci_halfwidth = z * std::sqrt(std::max(0.0, var_s2));
  return r;
}

double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (k >= n) return 1.0;
  return boost::math::cdf(boost::math::binomial(static_cast<double>(n), p), static_cast<double>(k));
}

double binomial_sf(std::size_t k, std::size_t n, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::binomial(static_cast<double>(n), p),
                                                  static_cast<double>(k - 1)));
}

}  // namespace georoute
