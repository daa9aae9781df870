#include "georoute/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace georoute {

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

Wedge::Wedge(Point2 apex, double orientation, double eta, double radius)
    : apex_(apex), orientation_(wrap_angle(orientation)), eta_(eta), radius_(radius) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("wedge eta must lie in (0, 1]");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("wedge radius must be positive");
  if (!std::isfinite(apex.x) || !std::isfinite(apex.y)) throw std::invalid_argument("wedge apex must be finite");
}

Wedge Wedge::toward(Point2 apex, Point2 target, double eta, double radius) {
  const Point2 d = target - apex;
  if (d.x == 0.0 && d.y == 0.0) throw std::domain_error("wedge target coincides with apex");
  return Wedge(apex, std::atan2(d.y, d.x), eta, radius);
}

bool wedge_contains(const Wedge& w, Point2 p) {
  const Point2 d = p - w.apex();
  const double r2 = dot(d, d);
  if (r2 == 0.0 || r2 > w.radius() * w.radius()) return false;
  if (w.is_full_disk()) return true;
  const Point2 axis = unit_vector(w.orientation());
  // Unsigned angle between the axis and d, in [0, pi].
  const double off_axis = std::atan2(std::abs(cross(axis, d)), dot(axis, d));
  return off_axis <= w.half_angle();
}

LocalProgress progress_coords(Point2 current, Point2 next, Point2 dest) {
  const Point2 to_dest = dest - current;
  const double len = norm(to_dest);
  if (len == 0.0) throw std::domain_error("progress_coords: current relay is the destination");
  const Point2 axis = (1.0 / len) * to_dest;
  const Point2 hop = next - current;
  return {dot(hop, axis), cross(axis, hop)};
}

double widest_empty_gap(std::span<const double> angles) {
  if (angles.size() < 2) return kTwoPi;
  std::vector<double> sorted(angles.begin(), angles.end());
  for (double& a : sorted) a = wrap_angle(a);
  std::sort(sorted.begin(), sorted.end());
  double widest = kTwoPi - sorted.back() + sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) widest = std::max(widest, sorted[i] - sorted[i - 1]);
  return widest;
}

namespace {

struct Interval {
  double lo;
  double hi;
};

// Subsets of a ray parameter line; at most a handful of pieces ever occur.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval i) { push(i); }

  void push(Interval i) {
    if (i.hi > i.lo && size_ < items_.size()) items_[size_++] = i;
  }

  IntervalSet intersect(const IntervalSet& other) const {
    IntervalSet out;
    for (std::size_t a = 0; a < size_; ++a)
      for (std::size_t b = 0; b < other.size_; ++b)
        out.push({std::max(items_[a].lo, other.items_[b].lo), std::min(items_[a].hi, other.items_[b].hi)});
    return out;
  }

  // Integral of t dt over the set.
  double radial_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size_; ++i) s += 0.5 * (items_[i].hi * items_[i].hi - items_[i].lo * items_[i].lo);
    return s;
  }

  bool empty() const { return size_ == 0; }

 private:
  std::array<Interval, 4> items_{};
  std::size_t size_ = 0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// {t : |origin + t*dir - center| <= radius}, dir a unit vector.
IntervalSet ray_in_disk(Point2 origin, Point2 dir, Point2 center, double radius) {
  const Point2 c = origin - center;
  const double b = dot(c, dir);
  const double disc = b * b - (dot(c, c) - radius * radius);
  if (disc <= 0.0) return {};
  const double s = std::sqrt(disc);
  return IntervalSet({-b - s, -b + s});
}

// {t : n . (c + t dir) >= 0}
Interval ray_in_halfplane(Point2 c, Point2 dir, Point2 normal) {
  const double a = dot(normal, c);
  const double b = dot(normal, dir);
  if (b > 0.0) return {-a / b, kInf};
  if (b < 0.0) return {-kInf, -a / b};
  return a >= 0.0 ? Interval{-kInf, kInf} : Interval{0.0, 0.0};
}

// Convex cone (half angle <= pi/2) around `orientation` with vertex `apex`.
Interval ray_in_convex_cone(Point2 origin, Point2 dir, Point2 apex, double orientation, double half_angle) {
  const Point2 c = origin - apex;
  const double left = orientation + half_angle;
  const double right = orientation - half_angle;
  const Point2 n_left{std::sin(left), -std::cos(left)};
  const Point2 n_right{-std::sin(right), std::cos(right)};
  const Interval a = ray_in_halfplane(c, dir, n_left);
  const Interval b = ray_in_halfplane(c, dir, n_right);
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

IntervalSet ray_in_sector(Point2 origin, Point2 dir, const Wedge& w) {
  IntervalSet in_disk = ray_in_disk(origin, dir, w.apex(), w.radius());
  if (w.is_full_disk() || in_disk.empty()) return in_disk;
  const double alpha = w.half_angle();
  IntervalSet cone;
  if (alpha <= 0.5 * kPi) {
    cone.push(ray_in_convex_cone(origin, dir, w.apex(), w.orientation(), alpha));
  } else {
    // Complement of the opposite convex cone.
    const Interval hole = ray_in_convex_cone(origin, dir, w.apex(), w.orientation() + kPi, kPi - alpha);
    if (hole.hi <= hole.lo) {
      cone.push({-kInf, kInf});
    } else {
      cone.push({-kInf, hole.lo});
      cone.push({hole.hi, kInf});
    }
  }
  return in_disk.intersect(cone);
}

void circle_circle_points(Point2 c1, double r1, Point2 c2, double r2, std::vector<Point2>& out) {
  const Point2 d = c2 - c1;
  const double dist = norm(d);
  if (dist == 0.0 || dist > r1 + r2 || dist < std::abs(r1 - r2)) return;
  const double a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
  const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  const Point2 ex = (1.0 / dist) * d;
  const Point2 ey{-ex.y, ex.x};
  const Point2 base = c1 + a * ex;
  out.push_back(base + h * ey);
  out.push_back(base - h * ey);
}

void circle_segment_points(Point2 center, double r, Point2 p0, Point2 p1, std::vector<Point2>& out) {
  const Point2 d = p1 - p0;
  const double len = norm(d);
  if (len == 0.0) return;
  const Point2 u = (1.0 / len) * d;
  const Point2 c = p0 - center;
  const double b = dot(c, u);
  const double disc = b * b - (dot(c, c) - r * r);
  if (disc < 0.0) return;
  const double s = std::sqrt(disc);
  for (double t : {-b - s, -b + s})
    if (t >= 0.0 && t <= len) out.push_back(p0 + t * u);
}

struct Clip {
  std::optional<Wedge> sector;
  double region_radius = 0.0;  // used when sector is empty: disk at origin
};

class PolarIntegrator {
 public:
  PolarIntegrator(const Wedge& base, Clip clip) : base_(base), clip_(std::move(clip)) {}

  double integrand(double theta) const {
    const Point2 dir = unit_vector(theta);
    IntervalSet along = IntervalSet({0.0, base_.radius()});
    if (clip_.sector) {
      along = along.intersect(ray_in_sector(base_.apex(), dir, *clip_.sector));
    } else {
      along = along.intersect(ray_in_disk(base_.apex(), dir, Point2{}, clip_.region_radius));
    }
    return along.radial_moment();
  }

  double integrate() const {
    const double start = base_.orientation() - base_.half_angle();
    const double span = 2.0 * base_.half_angle();
    std::vector<double> cuts{0.0, span};
    for (Point2 p : feature_points()) {
      const Point2 d = p - base_.apex();
      if (dot(d, d) < 1e-300) continue;
      const double rel = wrap_angle(std::atan2(d.y, d.x) - start);
      if (rel > 0.0 && rel < span) cuts.push_back(rel);
      const double opposite = wrap_angle(rel + kPi);
      if (clip_.sector && opposite > 0.0 && opposite < span) cuts.push_back(opposite);
    }
    for (double rel : tangent_angles(start))
      if (rel > 0.0 && rel < span) cuts.push_back(rel);
    // Uniform panels keep the Kronrod error estimate honest on long smooth stretches.
    constexpr int kPanels = 8;
    for (int i = 1; i < kPanels; ++i) cuts.push_back(span * i / kPanels);
    std::sort(cuts.begin(), cuts.end());

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
    const auto f = [&](double rel) { return integrand(start + rel); };
    const double panel_tol = 1e-9 * std::max(base_.area(), 1e-300);
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const double a = cuts[i - 1];
      const double b = cuts[i];
      if (b - a < 1e-15) continue;
      double err = 0.0;
      double piece = Quadrature::integrate(f, a, b, 12, 1e-11, &err);
      if (err > panel_tol) {
        // Square-root kinks at tangent directions stall Kronrod; a smoothstep substitution flattens both endpoints.
        double alt_err = 0.0;
        const double alt = Quadrature::integrate(
            [&](double u) { return f(a + (b - a) * u * u * (3.0 - 2.0 * u)) * 6.0 * (b - a) * u * (1.0 - u); }, 0.0, 1.0,
            15, 1e-12, &alt_err);
        if (alt_err < err) {
          piece = alt;
          err = alt_err;
        }
      }
      total += piece;
      total_error += err;
    }
    if (total_error > 1e-6 * std::max(total, base_.area() * 1e-6)) return sampled();
    return total;
  }

 private:
  std::vector<Point2> feature_points() const {
    std::vector<Point2> pts;
    const Point2 c1 = base_.apex();
    const double r1 = base_.radius();
    if (!base_.is_full_disk()) {
      // Base wedge corners matter only for the clip's circle.
      pts.push_back(c1 + r1 * unit_vector(base_.orientation() + base_.half_angle()));
      pts.push_back(c1 + r1 * unit_vector(base_.orientation() - base_.half_angle()));
    }
    if (clip_.sector) {
      const Wedge& w = *clip_.sector;
      pts.push_back(w.apex());
      circle_circle_points(c1, r1, w.apex(), w.radius(), pts);
      if (!w.is_full_disk()) {
        for (double side : {-1.0, 1.0}) {
          const Point2 corner = w.apex() + w.radius() * unit_vector(w.orientation() + side * w.half_angle());
          pts.push_back(corner);
          circle_segment_points(c1, r1, w.apex(), corner, pts);
        }
      }
    } else {
      circle_circle_points(c1, r1, Point2{}, clip_.region_radius, pts);
    }
    return pts;
  }

  std::vector<double> tangent_angles(double start) const {
    std::vector<double> out;
    const Point2 center = clip_.sector ? clip_.sector->apex() : Point2{};
    const double radius = clip_.sector ? clip_.sector->radius() : clip_.region_radius;
    const Point2 d = center - base_.apex();
    const double dist = norm(d);
    if (dist > radius) {
      const double mid = std::atan2(d.y, d.x);
      const double half = std::asin(radius / dist);
      out.push_back(wrap_angle(mid - half - start));
      out.push_back(wrap_angle(mid + half - start));
    }
    return out;
  }

  bool clip_contains(Point2 p) const {
    if (clip_.sector) return wedge_contains(*clip_.sector, p);
    return dot(p, p) <= clip_.region_radius * clip_.region_radius;
  }

  // Stratified fallback; deterministic.
  double sampled() const {
    constexpr int kRadial = 1000;
    constexpr int kAngular = 1000;
    std::mt19937_64 engine(0x5eedULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double start = base_.orientation() - base_.half_angle();
    const double span = 2.0 * base_.half_angle();
    long hits = 0;
    for (int i = 0; i < kRadial; ++i) {
      for (int j = 0; j < kAngular; ++j) {
        const double t = base_.radius() * std::sqrt((i + unit(engine)) / kRadial);
        const double theta = start + span * (j + unit(engine)) / kAngular;
        if (clip_contains(base_.apex() + t * unit_vector(theta))) ++hits;
      }
    }
    return base_.area() * static_cast<double>(hits) / (static_cast<double>(kRadial) * kAngular);
  }

  Wedge base_;
  Clip clip_;
};

}  // namespace

double wedge_intersection_area(const Wedge& w1, const Wedge& w2) {
  const double reach = w1.radius() + w2.radius();
  const Point2 d = w2.apex() - w1.apex();
  if (dot(d, d) >= reach * reach) return 0.0;
  return PolarIntegrator(w1, Clip{w2, 0.0}).integrate();
}

double wedge_region_intersection_area(const Wedge& w, double region_radius) {
  if (!(region_radius > 0.0)) throw std::invalid_argument("region radius must be positive");
  const Point2 a = w.apex();
  if (dot(a, a) > region_radius * region_radius) throw std::domain_error("wedge apex lies outside the region");
  if (norm(a) + w.radius() <= region_radius) return w.area();
  return PolarIntegrator(w, Clip{std::nullopt, region_radius}).integrate();
}

}  // namespace georoute
