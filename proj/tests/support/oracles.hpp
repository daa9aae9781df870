#pragma once

// Independent reference computations for the test suites. None of these
// call into the library code paths they are used to check.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "georoute/geometry.hpp"
#include "georoute/pointprocess.hpp"
#include "georoute/routing.hpp"

namespace georoute::oracle {

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Rejection-sampled membership in a sector, written without atan2 or the
/// library's wedge type: direction test via the cosine of the half angle.
bool sector_contains(Point2 apex, double orientation, double eta, double radius, Point2 p);

/// Hit-count area of sector1 n sector2 from uniform samples in sector1's bounding square.
McEstimate mc_sector_intersection_area(Point2 a1, double o1, Point2 a2, double o2, double eta, double radius,
                                       std::size_t samples, std::uint64_t seed);

/// Hit-count area of a sector intersected with the origin-centred disk of radius L.
McEstimate mc_sector_region_area(Point2 apex, double orientation, double eta, double radius, double region_radius,
                                 std::size_t samples, std::uint64_t seed);

/// Fraction of trials in which i uniform angles leave a circular gap >= 2 eta pi.
McEstimate mc_widest_gap_probability(std::uint32_t i, double eta, std::size_t trials, std::uint64_t seed);

struct HalfDiskMoments {
  McEstimate mean_x;
  McEstimate mean_y2;
  McEstimate mean_g_at_1;  // g(1, x, y) = |(1, 0) - (x, y)| - 1
  McEstimate var_x;        // delta-method standard error
};
/// Uniform points of the unit right half disk by rejection from the unit square.
HalfDiskMoments mc_half_disk_moments(std::size_t samples, std::uint64_t seed);

/// Brute-force wedge membership scan.
std::vector<std::size_t> brute_force_wedge(const NodeField& field, const Wedge& w);

/// Progress coordinates by an explicit rotation matrix.
LocalProgress rotation_progress(Point2 current, Point2 next, Point2 dest);

/// Routes of an idealised walk whose hops are i.i.d. uniform on the half disk
/// pointing at the destination; starts at distance h, stops at r <= R.
std::vector<RouteRecord> iid_half_disk_routes(double h, double radius, std::size_t count, std::uint64_t seed);

/// One-sample Kolmogorov-Smirnov p-value against a continuous CDF (asymptotic).
double ks_pvalue(std::vector<double> samples, double (*cdf)(double, double), double param);
/// Two-sample Kolmogorov-Smirnov p-value (asymptotic, effective size n m / (n + m)).
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);
/// Kolmogorov distribution survival function P(K > x).
double kolmogorov_sf(double x);

}  // namespace georoute::oracle
