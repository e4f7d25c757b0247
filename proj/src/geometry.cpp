#include "avor/geometry.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <limits>

namespace avor
{

const char * to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::format: return "format_error";
    case ErrorCode::reference: return "reference_error";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::io: return "io_error";
    case ErrorCode::no_cutin: return "no_cutin";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::spec_mismatch: return "spec_mismatch";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
  }
  return "unknown";
}

Vec2 rotate(const Vec2 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

bool OrientedBox::contains(const Vec2 & p) const
{
  const Vec2 axis = unit_from_heading(heading);
  const Vec2 d = p - center;
  const double lon = dot(d, axis);
  const double lat = dot(d, left_normal(axis));
  return std::abs(lon) <= 0.5 * length && std::abs(lat) <= 0.5 * width;
}

double OrientedBox::lateral_half_extent() const
{
  return 0.5 * length * std::abs(std::sin(heading)) + 0.5 * width * std::abs(std::cos(heading));
}

double OrientedBox::longitudinal_half_extent() const
{
  return 0.5 * length * std::abs(std::cos(heading)) + 0.5 * width * std::abs(std::sin(heading));
}

std::vector<Vec2> OrientedBox::corners() const
{
  const Vec2 a = unit_from_heading(heading) * (0.5 * length);
  const Vec2 b = left_normal(unit_from_heading(heading)) * (0.5 * width);
  return {center - a - b, center + a - b, center + a + b, center - a + b};
}

bool Polygon::contains(const Vec2 & p) const
{
  // crossing-number test
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = vertices[i];
    const Vec2 & b = vertices[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double Polygon::min_x() const
{
  double v = std::numeric_limits<double>::infinity();
  for (const auto & p : vertices) v = std::min(v, p.x);
  return v;
}

double Polygon::max_x() const
{
  double v = -std::numeric_limits<double>::infinity();
  for (const auto & p : vertices) v = std::max(v, p.x);
  return v;
}

double Polygon::min_y() const
{
  double v = std::numeric_limits<double>::infinity();
  for (const auto & p : vertices) v = std::min(v, p.y);
  return v;
}

double Polygon::max_y() const
{
  double v = -std::numeric_limits<double>::infinity();
  for (const auto & p : vertices) v = std::max(v, p.y);
  return v;
}

namespace
{

// One Sutherland-Hodgman pass against the half plane sign * (coord - bound) <= 0.
template <class Coord>
std::vector<Vec2> clip(const std::vector<Vec2> & in, Coord coord, double bound, double sign)
{
  std::vector<Vec2> out;
  const std::size_t n = in.size();
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & p = in[i];
    const Vec2 & q = in[(i + 1) % n];
    const double dp = sign * (coord(p) - bound);
    const double dq = sign * (coord(q) - bound);
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
  }
  return out;
}

}  // namespace

double clipped_area(const std::vector<Vec2> & polygon, double xmin, double xmax, double ymin, double ymax)
{
  const auto px = [](const Vec2 & v) { return v.x; };
  const auto py = [](const Vec2 & v) { return v.y; };
  auto poly = clip(polygon, px, xmin, -1.0);
  poly = clip(poly, px, xmax, 1.0);
  poly = clip(poly, py, ymin, -1.0);
  poly = clip(poly, py, ymax, 1.0);
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(twice);
}

}  // namespace avor
