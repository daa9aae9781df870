#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "georoute/experiments.hpp"
#include "oracles.hpp"

using namespace georoute;

namespace {

ExperimentConfig small_config(double lambda, std::size_t fields, std::size_t routes, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.base.lambda = lambda;
  cfg.base.radius = critical_radius(lambda, 1.0, 2 * kPi).radius;
  cfg.base.seed = seed;
  cfg.h = std::sqrt(0.5) / 2.0;
  cfg.n_fields = fields;
  cfg.n_routes_per_field = routes;
  cfg.jobs = 1;
  return cfg;
}

}  // namespace

TEST(Endpoints, CenteredDiagonal) {
  ExperimentConfig cfg = small_config(1e3, 1, 1, 1);
  cfg.h = std::sqrt(2.0) / 2.0;
  const auto [s, t] = endpoint_positions(cfg);
  EXPECT_NEAR(s.x, -0.25, 1e-15);
  EXPECT_NEAR(s.y, -0.25, 1e-15);
  EXPECT_NEAR(t.x, 0.25, 1e-15);
  EXPECT_NEAR(t.y, 0.25, 1e-15);
}

TEST(Endpoints, NearEdgeChord) {
  ExperimentConfig cfg = small_config(1e3, 1, 1, 1);
  cfg.h = std::sqrt(2.0) / 2.0;
  cfg.placement = Placement::NearEdge;
  const auto [s, t] = endpoint_positions(cfg);
  const double l = cfg.base.region_radius();
  EXPECT_NEAR(norm(s), 0.95 * l, 1e-14);
  EXPECT_NEAR(norm(t), 0.95 * l, 1e-14);
  EXPECT_NEAR(distance(s, t), *cfg.h, 1e-14);
  EXPECT_NEAR(s.x, -0.379, 1e-3);
  EXPECT_NEAR(s.y, -0.379, 1e-3);
  EXPECT_GT(t.x, 0.0);
  EXPECT_LT(t.y, 0.0);
}

TEST(ExperimentConfigTest, ValidationNamesKeys) {
  auto key_of = [](const ExperimentConfig& c) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      const std::string m = e.what();
      return m.substr(0, m.find(':'));
    }
    return std::string();
  };
  ExperimentConfig c = small_config(1e3, 1, 1, 1);
  EXPECT_EQ(key_of(c), "");
  c.n_fields = 0;
  EXPECT_EQ(key_of(c), "fields");
  c = small_config(1e3, 1, 1, 1);
  c.n_routes_per_field = 0;
  EXPECT_EQ(key_of(c), "routes");
  c = small_config(1e3, 1, 1, 1);
  c.h = 5.0;
  EXPECT_EQ(key_of(c), "h");
  c = small_config(1e3, 1, 1, 1);
  c.placement = Placement::NearEdge;
  c.h.reset();
  EXPECT_EQ(key_of(c), "h");
  c = small_config(1e3, 1, 1, 1);
  c.confidence = 1.5;
  EXPECT_EQ(key_of(c), "confidence");
}

TEST(ParallelFor, VisitsEachIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Hopcount, IndependentOfThreadCount) {
  ExperimentConfig cfg = small_config(1e4, 6, 5, 8);
  const HopcountResult a = run_hopcount_experiment(cfg);
  cfg.jobs = 3;
  const HopcountResult b = run_hopcount_experiment(cfg);
  ASSERT_EQ(a.routes.size(), b.routes.size());
  for (std::size_t i = 0; i < a.routes.size(); ++i) {
    EXPECT_EQ(a.routes[i].nu, b.routes[i].nu);
    EXPECT_EQ(a.routes[i].status, b.routes[i].status);
    EXPECT_EQ(a.routes[i].field, b.routes[i].field);
    EXPECT_EQ(a.routes[i].route, b.routes[i].route);
  }
  EXPECT_EQ(a.nu.mean, b.nu.mean);
}

TEST(Hopcount, PooledAndPerFieldSummariesAgree) {
  const ExperimentConfig cfg = small_config(1e4, 8, 12, 2);
  const HopcountResult r = run_hopcount_experiment(cfg);
  std::vector<double> nus;
  double weighted = 0;
  std::size_t total = 0;
  for (const RouteSample& s : r.routes)
    if (s.status == RouteStatus::Delivered) nus.push_back(static_cast<double>(s.nu));
  for (const EstimatorResult& f : r.per_field) {
    weighted += f.mean * static_cast<double>(f.n_samples);
    total += f.n_samples;
  }
  const EstimatorResult pooled = summarize(nus);
  EXPECT_EQ(total, nus.size());
  EXPECT_NEAR(r.nu.mean, pooled.mean, 1e-12);
  EXPECT_NEAR(r.nu.variance, pooled.variance, 1e-9);
  EXPECT_NEAR(weighted / static_cast<double>(total), r.nu.mean, 1e-9);
  EXPECT_EQ(r.nu.n_failures, r.n_fail);
  EXPECT_NEAR(r.normalized_mean, r.nu.mean * r.radius / *cfg.h, 1e-12);
  ASSERT_TRUE(r.bounds.has_value());
  ASSERT_TRUE(r.variance.has_value());
  for (const RouteSample& s : r.routes)
    if (s.status == RouteStatus::Delivered) EXPECT_GE(s.stretch, s.h - r.radius);
}

TEST(Hopcount, RandomPairsHaveNoBounds) {
  ExperimentConfig cfg = small_config(5e3, 3, 10, 5);
  cfg.h.reset();
  const HopcountResult r = run_hopcount_experiment(cfg);
  EXPECT_FALSE(r.bounds.has_value());
  EXPECT_GT(r.h, 0.0);
  EXPECT_LT(r.h, 2 * cfg.base.region_radius());
}

TEST(Hopcount, AllFailedThrows) {
  ExperimentConfig cfg;
  cfg.base.lambda = 5;
  cfg.base.radius = 0.01;
  cfg.base.seed = 1;
  cfg.h = 0.5;
  cfg.n_fields = 2;
  cfg.n_routes_per_field = 2;
  EXPECT_THROW(run_hopcount_experiment(cfg), std::runtime_error);
}

TEST(Hopcount, VisitorSeesEveryRoute) {
  const ExperimentConfig cfg = small_config(5e3, 3, 4, 7);
  std::atomic<int> calls{0};
  run_hopcount_experiment(cfg, [&](std::size_t, std::size_t, const NodeField&, const RouteRecord&) { ++calls; });
  EXPECT_EQ(calls.load(), 12);
}

TEST(Hopcount, EdgeExperimentRequiresNearEdge) {
  const ExperimentConfig cfg = small_config(5e3, 1, 1, 7);
  EXPECT_THROW(run_edge_experiment(cfg), std::invalid_argument);
}

TEST(Hopcount, SourceDestinationSwapSymmetry) {
  ExperimentConfig cfg = small_config(2e4, 1, 1, 3);
  const auto [s, t] = endpoint_positions(cfg);
  const std::vector<Point2> pins = {s, t};
  std::vector<double> forward, backward;
  for (std::uint64_t f = 0; f < 40; ++f) {
    Rng frng = Rng::stream(3, {0, f});
    const NodeField field = sample_field(cfg.base, frng, pins);
    const std::size_t a = field.size() - 2, b = field.size() - 1;
    for (std::uint64_t k = 0; k < 10; ++k) {
      Rng r1 = Rng::stream(3, {1, f, k});
      Rng r2 = Rng::stream(3, {5, f, k});
      const RouteRecord x = route(field, a, b, SchemeSpec{}, cfg.base.radius, r1, 100000);
      const RouteRecord y = route(field, b, a, SchemeSpec{}, cfg.base.radius, r2, 100000);
      if (x.delivered()) forward.push_back(static_cast<double>(x.nu()));
      if (y.delivered()) backward.push_back(static_cast<double>(y.nu()));
    }
  }
  EXPECT_GT(oracle::ks_two_sample_pvalue(forward, backward), 0.01);
}

TEST(Audit, IsolatedNodeIsFlagged) {
  const NodeField f({{0, 0}}, 1.0, 0.1);
  const AuditResult a = connectivity_audit(f, 0.1, 0.5);
  EXPECT_EQ(a.n_interior, 1u);
  EXPECT_EQ(a.n_empty_interior, 1u);
  EXPECT_TRUE(a.any_empty());
  EXPECT_DOUBLE_EQ(a.fraction, 1.0);
}

TEST(Audit, RingOfNeighboursIsCovered) {
  std::vector<Point2> pts = {{0, 0}};
  for (int k = 0; k < 8; ++k) pts.push_back(0.05 * unit_vector(k * kPi / 4));
  const NodeField f(pts, 1.0, 0.1);
  const AuditResult a = connectivity_audit(f, 0.1, 0.5);
  // The centre is covered; each ring node sees only a half plane of neighbours.
  EXPECT_EQ(a.n_interior, 9u);
  EXPECT_EQ(a.n_empty_interior, 8u);
}

TEST(Audit, FullDiskOnlyFlagsNodesWithoutNeighbours) {
  NetworkConfig c;
  c.lambda = 300;
  c.radius = 0.06;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const NodeField field = sample_field(c);
    std::size_t lonely = 0;
    for (std::size_t i = 0; i < field.size(); ++i) {
      std::size_t n = 0;
      field.for_each_within(field.position(i), c.radius, [&](std::size_t j) { n += j != i; });
      lonely += n == 0;
    }
    const AuditResult a = connectivity_audit(field, c.radius, 1.0);
    EXPECT_EQ(a.n_empty_interior + a.n_empty_edge, lonely) << seed;
  }
}

TEST(Audit, EdgeNodeFacingOutwardIsInfeasible) {
  // A node on the boundary whose only gap faces away from the region is fine.
  const double l = 1.0, radius = 0.1;
  std::vector<double> inward;
  for (int k = 0; k < 9; ++k) inward.push_back(kPi / 2 + k * kPi / 8);  // covers [pi/2, 3pi/2]
  EXPECT_FALSE(edge_node_has_empty_wedge(inward, 0.0, radius, l, 0.5));
  EXPECT_TRUE(edge_node_has_empty_wedge({}, 0.0, radius, l, 0.5));
  const std::vector<double> one_side = {kPi * 0.6};
  EXPECT_TRUE(edge_node_has_empty_wedge(one_side, 0.0, radius, l, 0.5));
}

TEST(Connectivity, ExperimentReportsBoundAndFraction) {
  NetworkConfig c;
  c.lambda = 2000;
  c.radius = critical_radius(2000, 1.0, 2 * kPi).radius;
  c.seed = 4;
  const ConnectivityResult r = run_connectivity_experiment(c, 10, 2);
  EXPECT_EQ(r.n_fields, 10u);
  EXPECT_LE(r.fields_with_empty, 10u);
  EXPECT_DOUBLE_EQ(r.empirical_fraction, r.fields_with_empty / 10.0);
  EXPECT_GT(r.sigma_bound, 0.0);
  EXPECT_GE(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1.0);
}

TEST(SchemeOracle, RandomRuleMatchesHalfDiskMean) {
  const MomentOracle m = scheme_moment_oracle(SchemeSpec{}, 8.0, 400000, 3);
  EXPECT_NEAR(m.mean_x, 4 / (3 * kPi), 4 * m.se_x);
  EXPECT_NEAR(m.mean_y2, 0.25, 0.005);
  EXPECT_NEAR(m.var_x, 0.25 - 16 / (9 * kPi * kPi), 0.003);
}

TEST(SchemeOracle, GreedyBeatsRandomAndAllContract) {
  const MomentOracle rd = scheme_moment_oracle(SchemeSpec{}, 10.0, 100000, 4);
  const MomentOracle mfr = scheme_moment_oracle(SchemeSpec::classic(SchemeKind::MFR), 10.0, 100000, 4);
  EXPECT_GT(mfr.mean_x, rd.mean_x + 4 * (mfr.se_x + rd.se_x));
  for (SchemeKind k : {SchemeKind::RandomEtaDisk, SchemeKind::MFR, SchemeKind::NFP, SchemeKind::DIR, SchemeKind::SRD}) {
    const MomentOracle m = scheme_moment_oracle(SchemeSpec::classic(k), 2.0, 100000, 9);
    EXPECT_LT(m.mean_g + 4 * m.se_g, 0.0) << scheme_name(k);
    EXPECT_LE(m.mean_y2, m.mean_x) << scheme_name(k);
  }
  EXPECT_THROW(scheme_moment_oracle(SchemeSpec{}, 0.0, 100, 1), std::invalid_argument);
}

TEST(Wald, InsufficientOnEmptyInput) {
  const WaldReport r = wald_sanity({}, 0.01);
  EXPECT_TRUE(r.insufficient);
  EXPECT_EQ(r.n, 0u);
}

TEST(Wald, IndependentIncrementsSatisfyIdentity) {
  const auto routes = oracle::iid_half_disk_routes(1.0, 0.02, 4000, 11);
  const WaldReport r = wald_sanity(routes, 0.02);
  EXPECT_FALSE(r.insufficient);
  EXPECT_EQ(r.n, 4000u);
  EXPECT_LT(std::abs(r.z), 4.0);
  EXPECT_EQ(r.sandwich_violations, 0u);
  EXPECT_NEAR(r.predicted, increment_moments(0.02).mean_x * r.mean_nu, 1e-12);
}

TEST(Markov, SmallRunIsConsistent) {
  ExperimentConfig cfg = small_config(2e4, 3, 5, 6);
  const MarkovResult m = markov_overlap_experiment(cfg, 5, 10);
  std::size_t ev = 0, hits = 0;
  for (const MarkovBin& b : m.bins) {
    ev += b.n_events;
    hits += b.n_hits;
    EXPECT_LE(b.n_hits, b.n_events);
    if (b.n_events > 0) {
      EXPECT_GE(b.area_ratio, 0.0);
      EXPECT_LE(b.area_ratio, 1.0);
      EXPECT_LE(b.lower, b.upper + 1e-12);
    }
  }
  EXPECT_EQ(ev, m.n_events);
  EXPECT_EQ(hits, m.n_hits);
  EXPECT_GT(m.n_events, 100u);
  EXPECT_GE(m.p_value, 0.0);
  EXPECT_LE(m.p_value, 1.0);
  cfg.scheme = SchemeSpec::classic(SchemeKind::MFR);
  EXPECT_THROW(markov_overlap_experiment(cfg), std::invalid_argument);
}
