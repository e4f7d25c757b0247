#include "avor/risk_field.hpp"

#include "avor/error.hpp"

#include <cmath>

namespace avor
{

const char * to_string(DrfOrigin o) noexcept
{
  return o == DrfOrigin::front_bumper ? "front" : "cg";
}

std::optional<DrfOrigin> parse_drf_origin(std::string_view s)
{
  if (s == "front" || s == "front_bumper") return DrfOrigin::front_bumper;
  if (s == "cg" || s == "center") return DrfOrigin::center;
  return std::nullopt;
}

void DrfParams::validate() const
{
  const bool ok = t_la > 0.0 && p_height > 0.0 && m_width > 0.0 && c_width > 0.0 && k_steer >= 0.0 &&
                  wheelbase > 0.0 && std::isfinite(t_la + p_height + m_width + c_width + k_steer + wheelbase);
  if (!ok) {
    throw Error(ErrorCode::validation, "drf: parameters must be positive (k_steer >= 0)");
  }
}

Vec2 drf_origin(const VehicleState & ego, const DrfParams & params)
{
  if (params.origin == DrfOrigin::center) return ego.position();
  return ego.position() + unit_from_heading(ego.heading) * (0.5 * ego.length);
}

PathCoordinates path_coordinates(const VehicleState & ego, double steering_angle, const DrfParams & params,
                                 const Vec2 & p)
{
  const Vec2 o = drf_origin(ego, params);
  const Vec2 u = unit_from_heading(ego.heading);
  if (std::abs(steering_angle) < kStraightSteering) {
    const Vec2 d = p - o;
    return {dot(d, u), cross(u, d)};
  }
  // Signed radius: positive turns left, the centre lies on the left-hand side.
  const double radius = params.wheelbase / std::tan(steering_angle);
  const Vec2 c = o + left_normal(u) * radius;
  const Vec2 a = o - c;
  const Vec2 b = p - c;
  const double theta = std::atan2(cross(a, b), dot(a, b));
  const double rho = norm(b);
  return {radius * theta, radius > 0.0 ? radius - rho : -(std::abs(radius) - rho)};
}

namespace
{

double field_height(double s, double n, double d_la, double steering_angle, const DrfParams & params)
{
  if (s < 0.0 || s > d_la) return 0.0;
  const double a = params.p_height * (s - d_la) * (s - d_la);
  const double sigma = (params.m_width + params.k_steer * std::abs(steering_angle)) * s + params.c_width;
  return a * std::exp(-(n * n) / (2.0 * sigma * sigma));
}

}  // namespace

double drf_value(const VehicleState & ego, double steering_angle, const DrfParams & params, const Vec2 & p)
{
  const double d_la = params.t_la * ego.speed();
  if (!(d_la > 0.0)) return 0.0;
  const auto pc = path_coordinates(ego, steering_angle, params, p);
  return field_height(pc.s, pc.n, d_la, steering_angle, params);
}

GridField build_drf(const VehicleState & ego, double steering_angle, const DrfParams & params,
                    const GridSpec & spec)
{
  params.validate();
  spec.validate();
  if (!spec.covers(ego.position())) {
    throw Error(ErrorCode::validation, "build_drf: grid does not cover the ego position");
  }
  GridField field(spec);
  const double d_la = params.t_la * ego.speed();
  if (!(d_la > 0.0)) return field;
  for (std::size_t j = 0; j < spec.ny; ++j) {
    for (std::size_t i = 0; i < spec.nx; ++i) {
      const auto pc = path_coordinates(ego, steering_angle, params, spec.cell_center(i, j));
      field.at(i, j) = field_height(pc.s, pc.n, d_la, steering_angle, params);
    }
  }
  return field;
}

}  // namespace avor
