#pragma once

#include <cmath>
#include <vector>

namespace avor
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
// Left-hand normal of a direction.
constexpr Vec2 left_normal(const Vec2 & d) { return {-d.y, d.x}; }

Vec2 rotate(const Vec2 & v, double angle);

/// Rectangle footprint of a vehicle, centred at `center`, long axis along `heading`.
struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  bool contains(const Vec2 & p) const;
  /// Half extent projected on the road y axis.
  double lateral_half_extent() const;
  /// Half extent projected on the road x axis.
  double longitudinal_half_extent() const;
  /// Corners in counter-clockwise order.
  std::vector<Vec2> corners() const;
};

/// Simple (non self-intersecting) polygon.
struct Polygon
{
  std::vector<Vec2> vertices;

  bool contains(const Vec2 & p) const;
  double min_x() const;
  double max_x() const;
  double min_y() const;
  double max_y() const;
};

/// Area of a polygon clipped to the axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
double clipped_area(const std::vector<Vec2> & polygon, double xmin, double xmax, double ymin, double ymax);

}  // namespace avor
