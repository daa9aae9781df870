#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "georoute/geometry.hpp"
#include "georoute/random.hpp"

namespace georoute {

/// Poisson disk network parameters. Lengths are absolute; the region is the
/// disk of area `area` centred at the origin.
struct NetworkConfig {
  double lambda = 0.0;  // nodes per unit area
  double area = 1.0;
  double eta = 0.5;
  double radius = 0.0;  // transmission range R
  std::uint64_t seed = 0;

  double expected_nodes() const { return lambda * area; }       // N
  double normalized_disk() const { return kPi * radius * radius / area; }  // d
  double region_radius() const { return std::sqrt(area / kPi); }  // L

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Uniform-cell bucket grid over the square [-L, L]^2.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(std::span<const Point2> points, double region_radius, double cell_side);

  double cell_side() const { return cell_side_; }
  std::size_t cells_per_axis() const { return cells_; }

  /// Calls visit(index) for every point whose cell meets the square of
  /// half-side `reach` around `center`. Callers filter exactly.
  template <class Visit>
  void visit_square(Point2 center, double reach, Visit&& visit) const {
    if (cells_ == 0) return;
    const auto [x0, x1] = cell_range(center.x, reach);
    const auto [y0, y1] = cell_range(center.y, reach);
    for (std::size_t cy = y0; cy <= y1; ++cy) {
      for (std::size_t cx = x0; cx <= x1; ++cx) {
        const std::size_t cell = cy * cells_ + cx;
        for (std::uint32_t k = begin_[cell]; k < begin_[cell + 1]; ++k) visit(static_cast<std::size_t>(items_[k]));
      }
    }
  }

 private:
  std::pair<std::size_t, std::size_t> cell_range(double c, double reach) const;
  std::size_t cell_of(double v) const;

  double origin_ = 0.0;
  double cell_side_ = 1.0;
  std::size_t cells_ = 0;
  std::vector<std::uint32_t> begin_;
  std::vector<std::uint32_t> items_;
};

/// Immutable node placement plus its grid index.
class NodeField {
 public:
  NodeField() = default;
  /// Throws std::invalid_argument if any point lies outside the region.
  NodeField(std::vector<Point2> positions, double region_radius, double cell_side);

  std::span<const Point2> positions() const { return positions_; }
  Point2 position(std::size_t i) const { return positions_[i]; }
  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }
  double region_radius() const { return region_radius_; }
  const GridIndex& grid() const { return grid_; }

  /// Visits indices within `radius` of `center` (inclusive), exact.
  template <class Visit>
  void for_each_within(Point2 center, double radius, Visit&& visit) const {
    const double r2 = radius * radius;
    grid_.visit_square(center, radius, [&](std::size_t i) {
      const Point2 d = positions_[i] - center;
      if (dot(d, d) <= r2) visit(i);
    });
  }

 private:
  std::vector<Point2> positions_;
  double region_radius_ = 0.0;
  GridIndex grid_;
};

/// Grid cell side used for a configuration: max(R, L/1024).
double grid_cell_side(const NetworkConfig& cfg);

/// K ~ Poisson(lambda*area) points i.i.d. uniform on the disk; `pinned`
/// points are appended after the sampled ones (indices K, K+1, ...).
NodeField sample_field(const NetworkConfig& cfg, Rng& rng, std::span<const Point2> pinned = {});
/// Same as above with the generator Rng::stream(cfg.seed, {0}).
NodeField sample_field(const NetworkConfig& cfg);

std::vector<std::size_t> neighbors_in_wedge(const NodeField& field, const Wedge& w);
/// Buffer-reusing variant for hot loops; clears `out` first.
void neighbors_in_wedge(const NodeField& field, const Wedge& w, std::vector<std::size_t>& out);

/// Distance between a uniformly chosen ordered pair of distinct nodes.
/// Throws std::invalid_argument for fewer than two nodes.
double random_pair_distance(const NodeField& field, Rng& rng);

/// CSV with header `index,x,y`, 9 significant digits.
void write_field_csv(std::ostream& os, const NodeField& field);
/// Inverse of write_field_csv; uses the given region radius and cell side.
NodeField read_field_csv(std::istream& is, double region_radius, double cell_side);

}  // namespace georoute
