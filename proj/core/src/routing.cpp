#include "georoute/routing.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace georoute {

SchemeSpec SchemeSpec::normalized() const {
  if (kind != SchemeKind::RandomEtaDisk) return {kind, 0.5};
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta: must lie in (0, 1]");
  return *this;
}

std::optional<SchemeKind> parse_scheme(std::string_view name) {
  if (name == "rdisk") return SchemeKind::RandomEtaDisk;
  if (name == "mfr") return SchemeKind::MFR;
  if (name == "nfp") return SchemeKind::NFP;
  if (name == "dir") return SchemeKind::DIR;
  if (name == "srd") return SchemeKind::SRD;
  return std::nullopt;
}

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::RandomEtaDisk: return "rdisk";
    case SchemeKind::MFR: return "mfr";
    case SchemeKind::NFP: return "nfp";
    case SchemeKind::DIR: return "dir";
    case SchemeKind::SRD: return "srd";
  }
  return "unknown";
}

std::string_view status_name(RouteStatus s) {
  switch (s) {
    case RouteStatus::Delivered: return "Delivered";
    case RouteStatus::DeadEnd: return "DeadEnd";
    case RouteStatus::HopLimit: return "HopLimit";
  }
  return "unknown";
}

namespace {

template <class Score>
std::size_t argmin(std::span<const LocalProgress> c, Score score) {
  std::size_t best = 0;
  double best_score = score(c[0]);
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double s = score(c[i]);
    if (s < best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

std::size_t select_relay(const SchemeSpec& scheme, std::span<const LocalProgress> candidates, double r, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("select_relay: no candidates");
  switch (scheme.kind) {
    case SchemeKind::RandomEtaDisk:
      return static_cast<std::size_t>(rng.below(candidates.size()));
    case SchemeKind::MFR:
      return argmin(candidates, [](const LocalProgress& p) { return -p.x_prime; });
    case SchemeKind::NFP:
      return argmin(candidates, [](const LocalProgress& p) { return std::hypot(p.x_prime, p.y_prime); });
    case SchemeKind::DIR:
      return argmin(candidates, [](const LocalProgress& p) { return std::abs(std::atan2(p.y_prime, p.x_prime)); });
    case SchemeKind::SRD:
      return argmin(candidates, [r](const LocalProgress& p) { return std::hypot(r - p.x_prime, p.y_prime); });
  }
  throw std::invalid_argument("select_relay: unknown scheme");
}

double RouteRecord::total_progress() const {
  double s = 0.0;
  for (const LocalProgress& p : progresses) s += p.x_prime;
  return s;
}

std::size_t default_max_hops(double h, double radius) {
  return static_cast<std::size_t>(std::ceil(100.0 * 4.0 * h / radius));
}

RouteRecord route(const NodeField& field, std::size_t src, std::size_t dst, const SchemeSpec& scheme, double radius,
                  Rng& rng, std::size_t max_hops) {
  if (src >= field.size() || dst >= field.size()) throw std::invalid_argument("route: node index out of range");
  if (src == dst) throw std::invalid_argument("route: src and dst must differ");
  if (!(radius > 0.0)) throw std::invalid_argument("route: radius must be positive");
  const SchemeSpec rule = scheme.normalized();
  const Point2 dest = field.position(dst);

  RouteRecord rec;
  rec.src = src;
  rec.dst = dst;
  std::size_t current = src;
  rec.relay_indices.push_back(current);
  rec.distances.push_back(distance(field.position(current), dest));
  rec.progresses.push_back({0.0, 0.0});

  std::vector<std::size_t> ids;
  std::vector<LocalProgress> cands;
  for (;;) {
    const double r = rec.distances.back();
    if (r <= radius) {
      rec.status = RouteStatus::Delivered;
      return rec;
    }
    if (rec.nu() >= max_hops) {
      rec.status = RouteStatus::HopLimit;
      return rec;
    }
    const Point2 here = field.position(current);
    neighbors_in_wedge(field, Wedge::toward(here, dest, rule.eta, radius), ids);
    if (ids.empty()) {
      rec.status = RouteStatus::DeadEnd;
      return rec;
    }
    cands.clear();
    for (std::size_t id : ids) cands.push_back(progress_coords(here, field.position(id), dest));
    const std::size_t pick = select_relay(rule, cands, r, rng);
    current = ids[pick];
    rec.relay_indices.push_back(current);
    rec.progresses.push_back(cands[pick]);
    rec.distances.push_back(distance(field.position(current), dest));
  }
}

double path_stretch(const RouteRecord& rec, const NodeField& field) {
  if (!rec.delivered()) throw std::invalid_argument("path_stretch: route was not delivered");
  double total = 0.0;
  for (std::size_t n = 1; n < rec.relay_indices.size(); ++n)
    total += distance(field.position(rec.relay_indices[n - 1]), field.position(rec.relay_indices[n]));
  total += distance(field.position(rec.relay_indices.back()), field.position(rec.dst));
  return total;
}

void write_trace_csv(std::ostream& os, const RouteRecord& rec, const NodeField& field) {
  os << "hop,node_index,x,y,r,x_prime,y_prime\n";
  for (std::size_t n = 0; n < rec.relay_indices.size(); ++n) {
    const Point2 p = field.position(rec.relay_indices[n]);
    fmt::print(os, "{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", n, rec.relay_indices[n], p.x, p.y, rec.distances[n],
               rec.progresses[n].x_prime, rec.progresses[n].y_prime);
  }
  fmt::print(os, "#status={} nu={}\n", status_name(rec.status), rec.nu());
}

}  // namespace georoute
