#include "georoute/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace georoute {

void ExperimentConfig::validate() const {
  base.validate();
  (void)scheme.normalized();
  if (n_fields == 0) throw std::invalid_argument("fields: must be >= 1");
  if (n_routes_per_field == 0) throw std::invalid_argument("routes: must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence: must lie in (0, 1)");
  if (placement == Placement::NearEdge && !(edge_fraction > 0.0 && edge_fraction < 1.0))
    throw std::invalid_argument("near-edge: fraction must lie in (0, 1)");
  if (h) {
    const double l = base.region_radius();
    if (!(*h > 0.0) || !std::isfinite(*h)) throw std::invalid_argument("h: must be positive");
    if (placement == Placement::Centered && *h > 2.0 * l) throw std::invalid_argument("h: exceeds the region diameter");
    if (placement == Placement::NearEdge && *h > 2.0 * edge_fraction * l)
      throw std::invalid_argument("h: exceeds the chord available at the near-edge radius");
  } else if (placement == Placement::NearEdge) {
    throw std::invalid_argument("h: near-edge placement needs a fixed h");
  }
}

std::pair<Point2, Point2> endpoint_positions(const ExperimentConfig& cfg) {
  if (!cfg.h) throw std::invalid_argument("h: endpoint placement needs a fixed h");
  const double h = *cfg.h;
  if (cfg.placement == Placement::Centered) {
    const Point2 half = (h / 2.0) * unit_vector(kPi / 4.0);
    return {-1.0 * half, half};
  }
  const double radial = cfg.edge_fraction * cfg.base.region_radius();
  const double src_angle = 5.0 * kPi / 4.0;
  const double beta = std::asin(std::min(1.0, h / (2.0 * radial)));
  return {radial * unit_vector(src_angle), radial * unit_vector(src_angle + 2.0 * beta)};
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RouteSample sample_of(std::size_t f, std::size_t k, const RouteRecord& rec, const NodeField& field) {
  RouteSample s;
  s.field = f;
  s.route = k;
  s.status = rec.status;
  s.nu = rec.nu();
  s.h = rec.distances.front();
  s.total_progress = rec.total_progress();
  s.stretch = rec.delivered() ? path_stretch(rec, field) : kNaN;
  return s;
}

}  // namespace

HopcountResult run_hopcount_experiment(const ExperimentConfig& cfg, const RouteVisitor& visit) {
  cfg.validate();
  const double radius = cfg.base.radius;
  if (cfg.h && !(*cfg.h > radius)) throw std::invalid_argument("h: must exceed the transmission range R");
  const SchemeSpec scheme = cfg.scheme.normalized();
  std::vector<Point2> pins;
  if (cfg.h) {
    const auto [s, t] = endpoint_positions(cfg);
    pins = {s, t};
  }

  std::vector<std::vector<RouteSample>> per_field(cfg.n_fields);
  parallel_for(cfg.n_fields, cfg.jobs, [&](std::size_t f) {
    Rng field_rng = Rng::stream(cfg.base.seed, {0, f});
    const NodeField field = sample_field(cfg.base, field_rng, pins);
    auto& out = per_field[f];
    out.reserve(cfg.n_routes_per_field);
    for (std::size_t k = 0; k < cfg.n_routes_per_field; ++k) {
      Rng rng = Rng::stream(cfg.base.seed, {1, f, k});
      std::size_t src = 0, dst = 0;
      if (cfg.h) {
        src = field.size() - 2;
        dst = field.size() - 1;
      } else {
        if (field.size() < 2) {
          RouteSample s;
          s.field = f;
          s.route = k;
          s.h = kNaN;
          s.stretch = kNaN;
          out.push_back(s);
          continue;
        }
        src = rng.below(field.size());
        dst = rng.below(field.size() - 1);
        if (dst >= src) ++dst;
      }
      const double h = distance(field.position(src), field.position(dst));
      const std::size_t max_hops = cfg.max_hops ? cfg.max_hops : default_max_hops(h, radius);
      const RouteRecord rec = route(field, src, dst, scheme, radius, rng, max_hops);
      out.push_back(sample_of(f, k, rec, field));
      if (visit) visit(f, k, field, rec);
    }
  });

  HopcountResult res;
  res.radius = radius;
  std::vector<double> nus, stretches, hs;
  for (std::size_t f = 0; f < cfg.n_fields; ++f) {
    std::vector<double> field_nus;
    std::size_t field_fail = 0;
    for (const RouteSample& s : per_field[f]) {
      res.routes.push_back(s);
      if (s.status != RouteStatus::Delivered) {
        ++field_fail;
        continue;
      }
      field_nus.push_back(static_cast<double>(s.nu));
      stretches.push_back(s.stretch);
      hs.push_back(s.h);
    }
    nus.insert(nus.end(), field_nus.begin(), field_nus.end());
    res.n_fail += field_fail;
    res.per_field.push_back(summarize(field_nus, cfg.confidence, field_fail));
  }
  if (nus.empty())
    throw std::runtime_error("all " + std::to_string(res.routes.size()) +
                             " routes failed (DeadEnd/HopLimit); density too low for the chosen R");
  res.nu = summarize(nus, cfg.confidence, res.n_fail);
  res.stretch = summarize(stretches, cfg.confidence, res.n_fail);
  res.h = cfg.h ? *cfg.h : summarize(hs).mean;
  res.normalized_mean = res.nu.mean * radius / res.h;
  res.vmr_sqrt = res.nu.mean > 0.0 ? std::sqrt(res.nu.variance / res.nu.mean) : 0.0;
  if (cfg.h) {
    res.bounds = expected_length_bounds(*cfg.h, radius);
    res.variance = variance_bounds(*cfg.h, radius);
  }
  return res;
}

HopcountResult run_edge_experiment(const ExperimentConfig& cfg, const RouteVisitor& visit) {
  if (cfg.placement != Placement::NearEdge) throw std::invalid_argument("near-edge: edge experiment needs NearEdge placement");
  return run_hopcount_experiment(cfg, visit);
}

WaldReport wald_sanity(std::span<const RouteRecord> records, double radius, std::size_t min_routes) {
  WaldReport rep;
  const double ex = increment_moments(radius).mean_x;
  std::vector<double> sums, nus, resid;
  for (const RouteRecord& rec : records) {
    if (!rec.delivered()) continue;
    const double s = rec.total_progress();
    const double nu = static_cast<double>(rec.nu());
    const double h = rec.distances.front();
    sums.push_back(s);
    nus.push_back(nu);
    resid.push_back(s - ex * nu);
    if (s < h - radius || s > h + radius * nu / 2.0) ++rep.sandwich_violations;
  }
  rep.n = sums.size();
  rep.insufficient = rep.n < std::max<std::size_t>(min_routes, 2);
  if (rep.n == 0) return rep;
  rep.mean_progress_sum = summarize(sums).mean;
  rep.mean_nu = summarize(nus).mean;
  rep.predicted = ex * rep.mean_nu;
  rep.deviation = rep.mean_progress_sum - rep.predicted;
  rep.pooled_se = summarize(resid).std_error();
  rep.z = rep.pooled_se > 0.0 ? rep.deviation / rep.pooled_se : 0.0;
  return rep;
}

}  // namespace georoute
