#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace georoute {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
// z-component of a x b; positive when b is counter-clockwise from a.
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Maps any angle into [0, 2pi).
double wrap_angle(double angle);

/// Relay selection region: a circular sector of radius `radius` and total
/// angle 2*pi*eta, bisected by `orientation`. eta = 1 is the full disk.
class Wedge {
 public:
  /// Throws std::invalid_argument unless 0 < eta <= 1 and radius > 0.
  Wedge(Point2 apex, double orientation, double eta, double radius);

  Point2 apex() const { return apex_; }
  double orientation() const { return orientation_; }
  double eta() const { return eta_; }
  double half_angle() const { return eta_ * kPi; }
  double radius() const { return radius_; }
  double area() const { return eta_ * kPi * radius_ * radius_; }
  bool is_full_disk() const { return eta_ >= 1.0; }

  /// Wedge at `apex` pointing at `target` (apex != target).
  static Wedge toward(Point2 apex, Point2 target, double eta, double radius);

 private:
  Point2 apex_;
  double orientation_;
  double eta_;
  double radius_;
};

/// Hop vector expressed in the transmitter's frame: x_prime along the
/// direction to the destination, y_prime to its left.
struct LocalProgress {
  double x_prime = 0.0;
  double y_prime = 0.0;
};

/// Closed sector membership. The apex itself is never contained.
bool wedge_contains(const Wedge& w, Point2 p);

/// Throws std::domain_error when current == dest (routing already terminated).
LocalProgress progress_coords(Point2 current, Point2 next, Point2 dest);

/// Signed change in distance to the destination for a hop (x', y') taken at
/// distance r: sqrt((r - x')^2 + y'^2) - r.
inline double g(double r, double x_prime, double y_prime) {
  return std::hypot(r - x_prime, y_prime) - r;
}

inline double distance_update(double r, LocalProgress lp) {
  return std::hypot(r - lp.x_prime, lp.y_prime);
}

/// Largest circular gap between the given directions; 2pi for zero or one angle.
double widest_empty_gap(std::span<const double> angles);

/// Area of w1 ∩ w2 (adaptive polar quadrature around w1's apex, exact clipping per ray).
double wedge_intersection_area(const Wedge& w1, const Wedge& w2);

/// Area of w ∩ {|p| <= region_radius}. Throws std::domain_error if the apex
/// lies outside the region.
double wedge_region_intersection_area(const Wedge& w, double region_radius);

}  // namespace georoute
