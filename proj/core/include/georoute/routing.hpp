#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "georoute/geometry.hpp"
#include "georoute/pointprocess.hpp"
#include "georoute/random.hpp"

namespace georoute {

enum class SchemeKind { RandomEtaDisk, MFR, NFP, DIR, SRD };

/// Relay selection rule. The deterministic rules always use the half disk.
struct SchemeSpec {
  SchemeKind kind = SchemeKind::RandomEtaDisk;
  double eta = 0.5;

  static SchemeSpec random_disk(double eta) { return {SchemeKind::RandomEtaDisk, eta}; }
  static SchemeSpec classic(SchemeKind kind) { return {kind, 0.5}; }
  /// Normalizes eta to 1/2 for non-random kinds; throws std::invalid_argument on bad eta.
  SchemeSpec normalized() const;
};

/// Accepts rdisk, mfr, nfp, dir, srd.
std::optional<SchemeKind> parse_scheme(std::string_view name);
std::string_view scheme_name(SchemeKind kind);

/// Index of the chosen candidate; `r` is the transmitter's distance to the
/// destination. Ties go to the lowest index. Throws std::invalid_argument on
/// an empty candidate list.
std::size_t select_relay(const SchemeSpec& scheme, std::span<const LocalProgress> candidates, double r, Rng& rng);

enum class RouteStatus { Delivered, DeadEnd, HopLimit };
std::string_view status_name(RouteStatus s);

struct RouteRecord {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::vector<std::size_t> relay_indices;  // X_0 = src, ..., X_nu
  std::vector<double> distances;           // r_n = |X_n - dst|
  // progresses[0] is (0, 0); progresses[n] is the hop X_{n-1} -> X_n in X_{n-1}'s frame.
  std::vector<LocalProgress> progresses;
  RouteStatus status = RouteStatus::DeadEnd;

  std::size_t nu() const { return relay_indices.empty() ? 0 : relay_indices.size() - 1; }
  bool delivered() const { return status == RouteStatus::Delivered; }
  /// Sum of x' over all hops.
  double total_progress() const;
};

/// ceil(100 * 4h/R).
std::size_t default_max_hops(double h, double radius);

/// Builds a route from src toward dst. Throws std::invalid_argument when
/// src == dst or an index is out of range.
RouteRecord route(const NodeField& field, std::size_t src, std::size_t dst, const SchemeSpec& scheme, double radius,
                  Rng& rng, std::size_t max_hops);

/// Euclidean path length including the last hop into dst. Throws
/// std::invalid_argument unless the record was delivered.
double path_stretch(const RouteRecord& rec, const NodeField& field);

/// Trace CSV `hop,node_index,x,y,r,x_prime,y_prime` plus a `#status=` footer.
void write_trace_csv(std::ostream& os, const RouteRecord& rec, const NodeField& field);

}  // namespace georoute
