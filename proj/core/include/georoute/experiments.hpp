#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "georoute/analytics.hpp"
#include "georoute/pointprocess.hpp"
#include "georoute/routing.hpp"
#include "georoute/stats.hpp"

namespace georoute {

enum class Placement { Centered, NearEdge };

struct ExperimentConfig {
  NetworkConfig base;
  SchemeSpec scheme;
  std::optional<double> h;  // nullopt: a random node pair per route
  Placement placement = Placement::Centered;
  double edge_fraction = 0.95;  // radial position of both endpoints, NearEdge only
  std::size_t n_fields = 1;
  std::size_t n_routes_per_field = 1;
  double confidence = 0.95;
  std::size_t jobs = 0;  // 0: hardware concurrency
  std::size_t max_hops = 0;  // 0: default_max_hops(h, R)

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Source and destination positions for a fixed-distance configuration.
/// Centered: +-(h/2)(cos 45, sin 45). NearEdge: both at radius fL, source at
/// 225 degrees, destination rotated counter-clockwise by 2 asin(h / 2fL).
std::pair<Point2, Point2> endpoint_positions(const ExperimentConfig& cfg);

/// Runs body(i) for i in [0, count) on `jobs` threads; rethrows the first
/// exception. Each index is processed exactly once.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

struct RouteSample {
  std::size_t field = 0;
  std::size_t route = 0;
  RouteStatus status = RouteStatus::DeadEnd;
  std::size_t nu = 0;
  double h = 0.0;
  double total_progress = 0.0;  // sum of x'
  double stretch = 0.0;         // NaN unless delivered
};

struct HopcountResult {
  EstimatorResult nu;       // pooled over delivered routes
  EstimatorResult stretch;  // pooled path length over delivered routes
  std::vector<EstimatorResult> per_field;
  std::vector<RouteSample> routes;  // field-major order
  double h = 0.0;                   // fixed h, or mean pair distance for random pairs
  double radius = 0.0;
  double normalized_mean = 0.0;     // (R/h) mean(nu)
  double vmr_sqrt = 0.0;            // sqrt(var(nu) / mean(nu))
  std::optional<BoundsReport> bounds;
  std::optional<VarianceBounds> variance;
  std::size_t n_fail = 0;
};

/// Callback invoked once per route with the field it ran on.
using RouteVisitor = std::function<void(std::size_t field, std::size_t route, const NodeField&, const RouteRecord&)>;

/// Seeded route campaign: field f uses stream (seed, 0, f); route k on it
/// uses stream (seed, 1, f, k). Throws std::runtime_error if no route is delivered.
HopcountResult run_hopcount_experiment(const ExperimentConfig& cfg, const RouteVisitor& visit = {});
/// Same as run_hopcount_experiment; requires Placement::NearEdge.
HopcountResult run_edge_experiment(const ExperimentConfig& cfg, const RouteVisitor& visit = {});

struct AuditResult {
  std::size_t n_interior = 0;
  std::size_t n_edge = 0;
  std::size_t n_empty_interior = 0;
  std::size_t n_empty_edge = 0;
  double fraction = 0.0;  // flagged nodes / all nodes

  bool any_empty() const { return n_empty_interior + n_empty_edge > 0; }
};

/// Flags nodes that have an empty selection wedge in some feasible direction.
AuditResult connectivity_audit(const NodeField& field, double radius, double eta);

/// Whether an edge node at `depth` = L - |p| with neighbour directions
/// `outward_angles` (measured from the outward normal) has an empty wedge in
/// a feasible orientation.
bool edge_node_has_empty_wedge(std::span<const double> outward_angles, double depth, double radius,
                               double region_radius, double eta);

struct ConnectivityResult {
  std::size_t n_fields = 0;
  std::size_t fields_with_empty = 0;
  double empirical_fraction = 0.0;
  double sigma_bound = 0.0;
  double p_value = 1.0;  // P(X >= observed) for X ~ Binomial(n_fields, min(1, sigma_bound))
  AsymptoticParams params;
};
ConnectivityResult run_connectivity_experiment(const NetworkConfig& base, std::size_t n_fields, std::size_t jobs = 0);

struct MarkovBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_events = 0;
  std::size_t n_hits = 0;
  double rho_hat = 0.0;
  double area_ratio = 0.0;  // mean over events
  double lower = 0.0;       // mean rho lower bound over events
  double upper = 0.0;       // mean rho upper bound over events
  bool sufficient = false;
};

struct MarkovResult {
  std::vector<MarkovBin> bins;
  std::size_t n_events = 0;
  std::size_t n_hits = 0;
  std::size_t n_disjoint = 0;  // hops whose previous wedge does not overlap the current one
  double rho_hat = 0.0;
  double mean_area_ratio = 0.0;
  double p_value = 1.0;  // one-sided: P(X <= hits) under Binomial(n, mean_area_ratio)
};

/// Overlap diagnostic along rRSL routes. Requires the RandomEtaDisk rule.
MarkovResult markov_overlap_experiment(const ExperimentConfig& cfg, std::size_t n_bins = 10,
                                       std::size_t min_events = 200);

struct MomentOracle {
  double mean_x = 0.0;
  double mean_g = 0.0;
  double var_x = 0.0;
  double se_x = 0.0;
  double se_g = 0.0;
  double mean_y2 = 0.0;  // E[y'^2] of the selected relay
  std::size_t n_samples = 0;
};

/// Selected-relay moments in units of R: K ~ Poisson(mean_count) given K >= 1
/// uniform points in the unit wedge, one selection per draw. `dest_distance`
/// (in units of R) positions the destination for SRD.
MomentOracle scheme_moment_oracle(const SchemeSpec& scheme, double mean_count, std::size_t n_samples,
                                  std::uint64_t seed, double dest_distance = 50.0);

struct SchemeCheck {
  HopcountResult simulated;
  MomentOracle oracle;
  double predicted_mean_nu = 0.0;  // h / (R E_x)
  double mean_deviation = 0.0;     // relative
  double predicted_vmr = 0.0;      // Var_x / E_x^2
  double simulated_vmr = 0.0;      // var(nu) / mean(nu)
  double vmr_deviation = 0.0;      // relative
  bool side_condition = false;     // E[y'^2] <= R E[x']
};

/// Compares simulated hop counts with the oracle prediction. The oracle
/// doubles its sample count until se_x / E_x <= rel_se or max_samples is hit,
/// then throws std::runtime_error.
SchemeCheck scheme_prediction_check(const ExperimentConfig& cfg, std::size_t oracle_samples = 200000,
                                    double rel_se = 2e-3, std::size_t max_samples = 6400000);

struct WaldReport {
  std::size_t n = 0;
  bool insufficient = true;
  double mean_progress_sum = 0.0;
  double mean_nu = 0.0;
  double predicted = 0.0;  // E[x'] mean(nu)
  double deviation = 0.0;  // mean_progress_sum - predicted
  double pooled_se = 0.0;  // sd(S_i - E[x'] nu_i) / sqrt(n)
  double z = 0.0;
  std::size_t sandwich_violations = 0;  // routes with S outside [h - R, h + R nu / 2]
};

/// Wald identity check over delivered rRSL (eta = 1/2) routes.
WaldReport wald_sanity(std::span<const RouteRecord> records, double radius, std::size_t min_routes = 1000);

}  // namespace georoute
