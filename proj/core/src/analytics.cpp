#include "georoute/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "georoute/geometry.hpp"

namespace georoute {

namespace {

void require_unit_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta: must lie in (0, 1]");
}

void require_supercritical(const AsymptoticParams& p) {
  if (!(p.d * p.N > 1.0)) throw std::domain_error("bound requires dN > 1");
}

// Probability that an edge node has no neighbour at all.
double empty_range_term(const AsymptoticParams& p) {
  const double sd = std::sqrt(p.d);
  return (2.0 - sd) * sd * p.N * std::exp(-p.d * p.N / 2.0);
}

}  // namespace

double AsymptoticParams::a1() const {
  const double sd = std::sqrt(d);
  return 4.0 * sd * (1.0 - sd);
}

double AsymptoticParams::a2() const {
  const double sd = std::sqrt(d);
  return sd * (2.0 - sd);
}

AsymptoticParams AsymptoticParams::from_network(double lambda, double area, double eta, double radius, double h) {
  AsymptoticParams p;
  p.N = lambda * area;
  p.d = kPi * radius * radius / area;
  p.eta = eta;
  p.R = radius;
  p.L = std::sqrt(area / kPi);
  p.h = h;
  return p;
}

double u_exact(std::uint32_t i, double eta) {
  require_unit_eta(eta);
  if (i == 0) return 1.0;
  const auto kmax = std::min<std::uint32_t>(i, static_cast<std::uint32_t>(std::floor(1.0 / eta + 1e-12)));
  long double sum = 0.0L;
  for (std::uint32_t k = 1; k <= kmax; ++k) {
    const long double base = std::max(0.0L, 1.0L - static_cast<long double>(k) * eta);
    const long double term = boost::math::binomial_coefficient<long double>(i, k) * std::pow(base, i - 1);
    sum += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(static_cast<double>(sum), 0.0, 1.0);
}

double u_upper(std::uint32_t i, double eta) {
  require_unit_eta(eta);
  if (i == 0) return 1.0;
  return std::min(1.0, i * std::pow(1.0 - eta, static_cast<double>(i - 1)));
}

double sigma_interior_bound(const AsymptoticParams& p) {
  if (p.N <= 0.0) return 0.0;
  const double dn = p.d * p.N;
  return p.d * p.N * p.N * std::exp(-p.eta * dn) * (1.0 + std::exp(-(1.0 - p.eta) * dn) / dn);
}

EdgeSimpleBound sigma_edge_simple_bound(const AsymptoticParams& p) {
  if (p.N <= 0.0) return {};
  const double sd = std::sqrt(p.d);
  const double empty = empty_range_term(p);
  const double wedge = (1.0 - sd / 2.0) * p.d * sd * p.N * p.N * std::exp(-p.eta * p.d * p.N / 4.0);
  return {empty + wedge, empty};
}

double sigma_edge_bound(const AsymptoticParams& p, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon: must be >= 0");
  if (p.N <= 0.0) return 0.0;
  const double dn = p.d * p.N;
  const double sd = std::sqrt(p.d);
  const double k = 1.0 + 8.0 * epsilon;
  const double bracket = 12.0 * kPi * epsilon * epsilon * std::exp(-p.eta * dn / k) +
                         6.0 * kPi * epsilon * std::exp(-(p.eta + 2.0 * epsilon) * dn / k) +
                         3.0 * kPi * epsilon * std::exp(-2.0 * p.eta * dn / k) +
                         2.0 * std::exp(-(p.eta + 2.0 * epsilon) * dn / 2.0) + std::exp(-p.eta * dn);
  return p.d * sd * p.N * p.N / (2.0 - sd) * bracket + empty_range_term(p);
}

double sigma_edge_bound_auto(const AsymptoticParams& p) {
  require_supercritical(p);
  const double dn = p.d * p.N;
  const double sd = std::sqrt(p.d);
  const double log_dn = std::log(dn);
  return 400.0 * kPi * log_dn * log_dn / sd * std::exp(-p.eta * dn / 2.0) +
         16.0 * dn * dn / sd * std::exp(-p.eta * dn) + 4.0 * sd * p.N * std::exp(-dn / 2.0);
}

double sigma_total_bound(const AsymptoticParams& p) {
  return sigma_edge_bound_auto(p) + 4.0 * p.d * p.N * p.N * std::exp(-p.eta * p.d * p.N);
}

double sigma_total_leading_term(const AsymptoticParams& p) {
  require_supercritical(p);
  const double dn = p.d * p.N;
  const double log_dn = std::log(dn);
  return 400.0 * kPi * log_dn * log_dn / std::sqrt(p.d) * std::exp(-p.eta * dn / 2.0);
}

CriticalRadius critical_radius(double lambda, double area, double c, double eta) {
  require_unit_eta(eta);
  if (!(lambda * area > 1.0)) throw std::domain_error("critical_radius: requires lambda * area > 1");
  if (!(c > 0.0)) throw std::domain_error("critical_radius: c must be positive");
  const double r = std::sqrt((c / kPi) * (std::log(lambda) + std::log(area)) / lambda);
  return {r, c > 1.0 / eta};
}

double g_constant() {
  const double s2 = std::sqrt(2.0);
  return (3.0 * 2.0 * s2 + 6.0 * std::log(1.0 + s2) + 64.0 - 5.0 * 8.0 * s2) / (9.0 * kPi);
}

double vmr_asymptote() { return 9.0 * kPi * kPi / 64.0 - 1.0; }

IncrementMoments increment_moments(double R) {
  IncrementMoments m;
  m.mean_x = 4.0 * R / (3.0 * kPi);
  m.second_moment_y = R * R / 4.0;
  m.mean_g_at_R = R * (g_constant() - 1.0);
  m.var_x = R * R * (0.25 - 16.0 / (9.0 * kPi * kPi));
  return m;
}

double mean_g(double r, double R, double eta) {
  require_unit_eta(eta);
  if (!(r > 0.0) || !(R > 0.0)) throw std::domain_error("mean_g: r and R must be positive");
  using boost::math::quadrature::gauss_kronrod;
  const double half = eta * kPi;
  auto radial = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto f = [&](double rho) { return g(r, rho * c, rho * s) * rho; };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, R, 10, 1e-13);
  };
  // Split at theta = 0 where the integrand kinks when r <= R.
  const double total = gauss_kronrod<double, 31>::integrate(radial, -half, 0.0, 10, 1e-12) +
                       gauss_kronrod<double, 31>::integrate(radial, 0.0, half, 10, 1e-12);
  return total / (half * R * R);
}

BoundsReport expected_length_bounds(double h, double R) {
  if (!(R > 0.0) || !(h > R)) throw std::domain_error("expected_length_bounds: requires h > R > 0");
  const double k = 3.0 * kPi / 4.0;
  const double ratio = h / R;
  BoundsReport b;
  b.lower = k * (ratio - 1.0);
  b.asymptote = k * ratio;
  b.upper = 4.0 * ratio;
  if (h >= 2.0 * R) {
    const double refined = (k * (1.0 + 2.5 * std::sqrt(R / (2.0 * h)) + R / (2.0 * h)) + 4.0 * R / h) * ratio;
    b.upper = std::min(b.upper, refined);
  }
  return b;
}

double typical_expected_length(double d) {
  if (!(d > 0.0)) throw std::domain_error("typical_expected_length: d must be positive");
  return 32.0 / (15.0 * std::sqrt(d));
}

double mean_pair_distance(double L) { return 128.0 * L / (45.0 * kPi); }

double VarianceBounds::envelope_lower() const { return std::max(0.0, std::sqrt(vmr_asymptote) - offset_bound); }
double VarianceBounds::envelope_upper() const { return std::sqrt(vmr_asymptote) + offset_bound; }

VarianceBounds variance_bounds(double h, double R) {
  if (!(R > 0.0) || !(h > R)) throw std::domain_error("variance_bounds: requires h > R > 0");
  VarianceBounds v;
  v.finite_bound = 32.0 * h * (h + R) / (R * R);
  v.vmr_asymptote = vmr_asymptote();
  const double k = 3.0 * kPi / 4.0;
  const double sd_sum_over_r = (6.0 + 5.0 * std::exp(1.0)) * (1.0 + std::log(h / R));
  // sqrt(Var S) / (sqrt(E nu) E x') with E x' = R / k and E nu >= k (h/R - 1).
  v.offset_bound = sd_sum_over_r * k / std::sqrt(k * (h / R - 1.0));
  return v;
}

StretchAsymptotics stretch_asymptotics(double h, double R) {
  if (!(R > 0.0) || !(h > R)) throw std::domain_error("stretch_asymptotics: requires h > R > 0");
  return {kPi / 2.0 * h, kPi / 12.0 * R * h};
}

RhoBounds rho_bounds(double lambda, double area_c, double area_d, double area_cd) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rho_bounds: lambda must be positive");
  if (!(area_cd > 0.0 && area_cd < area_c && area_cd < area_d))
    throw std::invalid_argument("rho_bounds: requires 0 < |CD| < min(|C|, |D|)");
  const double cc_d = area_d - area_cd;  // |C^c D|
  const double c_dc = area_c - area_cd;  // |C D^c|
  RhoBounds b;
  b.ratio = area_cd / area_c;
  // (1 - e^{-x}) via expm1 keeps small-area cases accurate.
  const double frac = (-std::expm1(-lambda * cc_d)) / (-std::expm1(-lambda * area_d));
  b.upper_gap = b.ratio * (area_d / cc_d) * frac * std::exp(-lambda * area_c);
  b.upper = b.ratio - b.upper_gap;
  const double bracket = 1.0 - 1.0 / (lambda * area_d) -
                         (area_c * area_d / (area_cd * cc_d)) * std::exp(-2.0 * lambda * c_dc);
  if (bracket < 0.0) {
    b.lower = 0.0;
    b.pre_asymptotic = true;
  } else {
    b.lower = b.ratio / (-std::expm1(-lambda * area_d)) * bracket;
  }
  return b;
}

}  // namespace georoute
