#pragma once

#include <cstdint>

namespace georoute {

/// Dimensionless network parameters plus the lengths used by the hop-count bounds.
struct AsymptoticParams {
  double N = 0.0;    // expected node count
  double d = 0.0;    // normalized disk area pi R^2 / |A|
  double eta = 0.5;
  double R = 0.0;
  double L = 0.0;
  double h = 0.0;

  /// Normalized area of the extended edge band, 4 sqrt(d)(1 - sqrt(d)).
  double a1() const;
  /// Normalized area of the edge band, sqrt(d)(2 - sqrt(d)).
  double a2() const;

  static AsymptoticParams from_network(double lambda, double area, double eta, double radius, double h = 0.0);
};

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  double asymptote = 0.0;
};

/// Probability that i uniform directions leave an empty gap of at least 2 eta pi.
double u_exact(std::uint32_t i, double eta);
/// min(1, i (1 - eta)^(i - 1)); 1 for i = 0.
double u_upper(std::uint32_t i, double eta);

/// Interior empty-wedge bound; 0 when N = 0.
double sigma_interior_bound(const AsymptoticParams& p);

struct EdgeSimpleBound {
  double simple = 0.0;       // two-term bound
  double empty_range = 0.0;  // probability term for an edge node with no neighbour at all
};
EdgeSimpleBound sigma_edge_simple_bound(const AsymptoticParams& p);

/// Edge bound for an explicit epsilon >= 0 (throws std::invalid_argument otherwise).
double sigma_edge_bound(const AsymptoticParams& p, double epsilon);
/// Edge bound with epsilon = 2 log(dN)/(dN). Throws std::domain_error when dN <= 1.
double sigma_edge_bound_auto(const AsymptoticParams& p);
/// Four-term total bound. Throws std::domain_error when dN <= 1.
double sigma_total_bound(const AsymptoticParams& p);
/// Leading term 400 pi (log dN)^2 / sqrt(d) e^{-eta dN / 2} of the total bound.
double sigma_total_leading_term(const AsymptoticParams& p);

struct CriticalRadius {
  double radius = 0.0;
  bool supercritical = true;  // c > 1/eta
};
/// R with d = c log N / N. Throws std::domain_error unless lambda*area > 1 and c > 0.
CriticalRadius critical_radius(double lambda, double area, double c, double eta = 0.5);

/// (3 * 2^1.5 + 6 ln(1 + sqrt 2) + 64 - 5 * 2^3.5) / (9 pi).
double g_constant();
/// 9 pi^2 / 64 - 1.
double vmr_asymptote();

struct IncrementMoments {
  double mean_x = 0.0;           // 4R / (3 pi)
  double second_moment_y = 0.0;  // R^2 / 4
  double mean_g_at_R = 0.0;      // R (g_constant - 1)
  double var_x = 0.0;            // R^2 (1/4 - 16 / (9 pi^2))
};
IncrementMoments increment_moments(double R);

/// E[g(r, x', y')] for (x', y') uniform on the eta wedge of radius R, by
/// adaptive quadrature. Requires r > 0.
double mean_g(double r, double R, double eta = 0.5);

/// Hop-count mean bounds for source distance h. Throws std::domain_error when h <= R.
BoundsReport expected_length_bounds(double h, double R);

/// 32 / (15 sqrt(d)).
double typical_expected_length(double d);
/// Mean distance between two uniform points of a disk of radius L: 128 L / (45 pi).
double mean_pair_distance(double L);

struct VarianceBounds {
  double finite_bound = 0.0;   // 32 h (h + R) / R^2
  double vmr_asymptote = 0.0;  // 9 pi^2 / 64 - 1
  double offset_bound = 0.0;   // half-width around sqrt(vmr_asymptote)

  double envelope_lower() const;
  double envelope_upper() const;
};
/// Throws std::domain_error when h <= R.
VarianceBounds variance_bounds(double h, double R);

struct StretchAsymptotics {
  double mean = 0.0;
  double variance = 0.0;
};
StretchAsymptotics stretch_asymptotics(double h, double R);

struct RhoBounds {
  double lower = 0.0;
  double upper = 0.0;
  double ratio = 0.0;
  double upper_gap = 0.0;        // ratio - upper, evaluated without cancellation
  bool pre_asymptotic = false;   // lower-bound bracket was negative and clamped
};
/// Bounds on the probability that the next relay falls in the overlap C n D,
/// C the current selection region and D the previous one. Throws
/// std::invalid_argument unless 0 < area_cd < min(area_c, area_d) and lambda > 0.
RhoBounds rho_bounds(double lambda, double area_c, double area_d, double area_cd);

}  // namespace georoute
