#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "georoute/experiments.hpp"

namespace georoute {

namespace {

bool open_overlap(double a0, double a1, double b0, double b1) { return std::max(a0, b0) < std::min(a1, b1); }

}  // namespace

bool edge_node_has_empty_wedge(std::span<const double> outward_angles, double depth, double radius,
                               double region_radius, double eta) {
  if (outward_angles.empty()) return true;
  const double q = radius / region_radius;
  const double dp = std::clamp(depth / radius, 0.0, 1.0);
  const double delta = dp - q * (1.0 - dp * dp) / (2.0 * (1.0 - dp * q));
  const double phi = std::acos(std::clamp(delta, -1.0, 1.0));
  if (phi >= kPi) return false;
  const double half = eta * kPi;

  std::vector<double> a(outward_angles.begin(), outward_angles.end());
  for (double& v : a) v = wrap_angle(v);
  std::sort(a.begin(), a.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double start = a[i];
    double gap = kTwoPi;
    if (i + 1 < a.size()) gap = a[i + 1] - start;
    else if (a.size() > 1) gap = kTwoPi - start + a[0];
    const double slack = gap - 2.0 * half;
    if (!(slack > 0.0)) continue;
    // Orientations whose wedge misses every neighbour: (start + half, end - half).
    const double lo = start + half;
    const double hi = lo + slack;
    if (open_overlap(lo, hi, phi, kTwoPi - phi) || open_overlap(lo, hi, phi + kTwoPi, 2.0 * kTwoPi - phi)) return true;
  }
  return false;
}

AuditResult connectivity_audit(const NodeField& field, double radius, double eta) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius: must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta: must lie in (0, 1]");
  const double l = field.region_radius();
  AuditResult res;
  std::vector<double> angles;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Point2 p = field.position(i);
    const double depth = l - norm(p);
    const bool interior = depth >= radius;
    // Interior nodes use the x-axis as reference, edge nodes the outward normal.
    const double axis = interior ? 0.0 : std::atan2(p.y, p.x);
    angles.clear();
    field.for_each_within(p, radius, [&](std::size_t j) {
      if (j == i) return;
      const Point2 v = field.position(j) - p;
      if (v.x == 0.0 && v.y == 0.0) return;
      angles.push_back(wrap_angle(std::atan2(v.y, v.x) - axis));
    });
    if (interior) {
      ++res.n_interior;
      if (angles.empty() || widest_empty_gap(angles) > 2.0 * eta * kPi) ++res.n_empty_interior;
    } else {
      ++res.n_edge;
      if (edge_node_has_empty_wedge(angles, depth, radius, l, eta)) ++res.n_empty_edge;
    }
  }
  if (!field.empty())
    res.fraction = static_cast<double>(res.n_empty_interior + res.n_empty_edge) / static_cast<double>(field.size());
  return res;
}

ConnectivityResult run_connectivity_experiment(const NetworkConfig& base, std::size_t n_fields, std::size_t jobs) {
  base.validate();
  if (n_fields == 0) throw std::invalid_argument("fields: must be >= 1");
  std::vector<char> flagged(n_fields, 0);
  parallel_for(n_fields, jobs, [&](std::size_t f) {
    Rng rng = Rng::stream(base.seed, {0, f});
    const NodeField field = sample_field(base, rng);
    flagged[f] = connectivity_audit(field, base.radius, base.eta).any_empty() ? 1 : 0;
  });
  ConnectivityResult res;
  res.n_fields = n_fields;
  res.fields_with_empty = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
  res.empirical_fraction = static_cast<double>(res.fields_with_empty) / static_cast<double>(n_fields);
  res.params = AsymptoticParams::from_network(base.lambda, base.area, base.eta, base.radius);
  res.sigma_bound = sigma_total_bound(res.params);
  res.p_value = binomial_sf(res.fields_with_empty, n_fields, std::min(1.0, res.sigma_bound));
  return res;
}

}  // namespace georoute
