#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "georoute/experiments.hpp"

namespace georoute {

namespace {

struct OverlapEvent {
  double area_ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool hit = false;
};

}  // namespace

MarkovResult markov_overlap_experiment(const ExperimentConfig& cfg, std::size_t n_bins, std::size_t min_events) {
  if (cfg.scheme.kind != SchemeKind::RandomEtaDisk)
    throw std::invalid_argument("scheme: overlap diagnostic needs the random eta-disk rule");
  if (n_bins == 0) throw std::invalid_argument("bins: must be >= 1");
  const double radius = cfg.base.radius;
  const double eta = cfg.scheme.eta;
  const double lambda = cfg.base.lambda;

  std::vector<std::vector<OverlapEvent>> slots(cfg.n_fields * cfg.n_routes_per_field);
  std::vector<std::size_t> disjoint(slots.size(), 0);
  run_hopcount_experiment(cfg, [&](std::size_t f, std::size_t k, const NodeField& field, const RouteRecord& rec) {
    const std::size_t slot = f * cfg.n_routes_per_field + k;
    auto& events = slots[slot];
    const Point2 dest = field.position(rec.dst);
    for (std::size_t n = 1; n + 1 < rec.relay_indices.size(); ++n) {
      const Wedge prev = Wedge::toward(field.position(rec.relay_indices[n - 1]), dest, eta, radius);
      const Wedge cur = Wedge::toward(field.position(rec.relay_indices[n]), dest, eta, radius);
      const double area = cur.area();
      const double overlap = std::min(wedge_intersection_area(prev, cur), area);
      if (!(overlap > 0.0)) {
        ++disjoint[slot];
        continue;
      }
      OverlapEvent ev;
      ev.area_ratio = overlap / area;
      ev.hit = wedge_contains(prev, field.position(rec.relay_indices[n + 1]));
      if (overlap < area * (1.0 - 1e-12)) {
        const RhoBounds b = rho_bounds(lambda, area, prev.area(), overlap);
        ev.lower = b.lower;
        ev.upper = b.upper;
      } else {
        ev.lower = ev.upper = ev.area_ratio;
      }
      events.push_back(ev);
    }
  });

  MarkovResult res;
  res.bins.resize(n_bins);
  std::vector<CompensatedSum> ratio_sum(n_bins), lower_sum(n_bins), upper_sum(n_bins);
  CompensatedSum pooled_ratio;
  for (std::size_t b = 0; b < n_bins; ++b) {
    res.bins[b].lo = static_cast<double>(b) / static_cast<double>(n_bins);
    res.bins[b].hi = static_cast<double>(b + 1) / static_cast<double>(n_bins);
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    res.n_disjoint += disjoint[s];
    for (const OverlapEvent& ev : slots[s]) {
      const auto b = std::min(n_bins - 1, static_cast<std::size_t>(ev.area_ratio * static_cast<double>(n_bins)));
      MarkovBin& bin = res.bins[b];
      ++bin.n_events;
      bin.n_hits += ev.hit ? 1 : 0;
      ratio_sum[b].add(ev.area_ratio);
      lower_sum[b].add(ev.lower);
      upper_sum[b].add(ev.upper);
      pooled_ratio.add(ev.area_ratio);
      ++res.n_events;
      res.n_hits += ev.hit ? 1 : 0;
    }
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    MarkovBin& bin = res.bins[b];
    bin.sufficient = bin.n_events >= min_events;
    if (bin.n_events == 0) continue;
    const double n = static_cast<double>(bin.n_events);
    bin.rho_hat = static_cast<double>(bin.n_hits) / n;
    bin.area_ratio = ratio_sum[b].value() / n;
    bin.lower = lower_sum[b].value() / n;
    bin.upper = upper_sum[b].value() / n;
  }
  if (res.n_events > 0) {
    const double n = static_cast<double>(res.n_events);
    res.rho_hat = static_cast<double>(res.n_hits) / n;
    res.mean_area_ratio = pooled_ratio.value() / n;
    res.p_value = binomial_cdf(res.n_hits, res.n_events, res.mean_area_ratio);
  }
  return res;
}

}  // namespace georoute
