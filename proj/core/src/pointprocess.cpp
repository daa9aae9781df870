#include "georoute/pointprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace georoute {

void NetworkConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda: must be finite and >= 0");
  if (!(area > 0.0) || !std::isfinite(area)) throw std::invalid_argument("area: must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta: must lie in (0, 1]");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius: must be positive");
  if (radius > region_radius()) throw std::invalid_argument("radius: must not exceed the region radius L");
}

GridIndex::GridIndex(std::span<const Point2> points, double region_radius, double cell_side)
    : origin_(-region_radius), cell_side_(cell_side) {
  if (!(cell_side > 0.0)) throw std::invalid_argument("grid cell side must be positive");
  if (points.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("grid index supports at most 2^32-1 points");
  cells_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * region_radius / cell_side)));
  begin_.assign(cells_ * cells_ + 1, 0);
  std::vector<std::uint32_t> cell_ids(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t cell = cell_of(points[i].y) * cells_ + cell_of(points[i].x);
    cell_ids[i] = static_cast<std::uint32_t>(cell);
    ++begin_[cell + 1];
  }
  for (std::size_t c = 1; c < begin_.size(); ++c) begin_[c] += begin_[c - 1];
  items_.resize(points.size());
  std::vector<std::uint32_t> fill(begin_.begin(), begin_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) items_[fill[cell_ids[i]]++] = static_cast<std::uint32_t>(i);
}

std::size_t GridIndex::cell_of(double v) const {
  const double c = std::floor((v - origin_) / cell_side_);
  if (!(c > 0.0)) return 0;
  return std::min(cells_ - 1, static_cast<std::size_t>(c));
}

std::pair<std::size_t, std::size_t> GridIndex::cell_range(double c, double reach) const {
  return {cell_of(c - reach), cell_of(c + reach)};
}

NodeField::NodeField(std::vector<Point2> positions, double region_radius, double cell_side)
    : positions_(std::move(positions)), region_radius_(region_radius) {
  if (!(region_radius > 0.0)) throw std::invalid_argument("region radius must be positive");
  const double l2 = region_radius * region_radius;
  for (const Point2& p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("node position must be finite");
    if (dot(p, p) > l2) throw std::invalid_argument("node position lies outside the region");
  }
  grid_ = GridIndex(positions_, region_radius_, cell_side);
}

double grid_cell_side(const NetworkConfig& cfg) {
  return std::max(cfg.radius, cfg.region_radius() / 1024.0);
}

NodeField sample_field(const NetworkConfig& cfg, Rng& rng, std::span<const Point2> pinned) {
  cfg.validate();
  const double l = cfg.region_radius();
  const double l2 = l * l;
  const std::uint64_t count = rng.poisson(cfg.expected_nodes());
  std::vector<Point2> positions;
  positions.reserve(count + pinned.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    Point2 p;
    do {
      const double r = l * std::sqrt(rng.uniform());
      const double theta = kTwoPi * rng.uniform();
      p = {r * std::cos(theta), r * std::sin(theta)};
    } while (dot(p, p) > l2);  // guards the last-ulp rounding at r ~ L
    positions.push_back(p);
  }
  positions.insert(positions.end(), pinned.begin(), pinned.end());
  return NodeField(std::move(positions), l, grid_cell_side(cfg));
}

NodeField sample_field(const NetworkConfig& cfg) {
  Rng rng = Rng::stream(cfg.seed, {0});
  return sample_field(cfg, rng);
}

void neighbors_in_wedge(const NodeField& field, const Wedge& w, std::vector<std::size_t>& out) {
  out.clear();
  field.grid().visit_square(w.apex(), w.radius(), [&](std::size_t i) {
    if (wedge_contains(w, field.position(i))) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
}

std::vector<std::size_t> neighbors_in_wedge(const NodeField& field, const Wedge& w) {
  std::vector<std::size_t> out;
  neighbors_in_wedge(field, w, out);
  return out;
}

double random_pair_distance(const NodeField& field, Rng& rng) {
  const std::size_t n = field.size();
  if (n < 2) throw std::invalid_argument("random_pair_distance needs at least two nodes");
  const std::size_t i = rng.below(n);
  std::size_t j = rng.below(n - 1);
  if (j >= i) ++j;
  return distance(field.position(i), field.position(j));
}

void write_field_csv(std::ostream& os, const NodeField& field) {
  os << "index,x,y\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Point2 p = field.position(i);
    fmt::print(os, "{},{:.9g},{:.9g}\n", i, p.x, p.y);
  }
}

NodeField read_field_csv(std::istream& is, double region_radius, double cell_side) {
  std::string line;
  if (!std::getline(is, line) || line != "index,x,y") throw std::runtime_error("field CSV: missing header index,x,y");
  std::vector<Point2> positions;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, xs, ys;
    if (!std::getline(row, idx, ',') || !std::getline(row, xs, ',') || !std::getline(row, ys))
      throw std::runtime_error("field CSV: malformed row '" + line + "'");
    if (std::stoull(idx) != positions.size()) throw std::runtime_error("field CSV: indices must be consecutive");
    Point2 p{std::stod(xs), std::stod(ys)};
    // 9-digit rounding can push a boundary node just outside the disk.
    const double r = norm(p);
    if (r > region_radius && r <= region_radius * (1.0 + 1e-8)) p = (region_radius / r) * p;
    if (norm(p) > region_radius) p = std::nextafter(1.0, 0.0) * p;
    positions.push_back(p);
  }
  return NodeField(std::move(positions), region_radius, cell_side);
}

}  // namespace georoute
