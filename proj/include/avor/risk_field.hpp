#pragma once

#include "avor/grid.hpp"
#include "avor/scenario.hpp"

namespace avor
{

enum class DrfOrigin { front_bumper, center };

const char * to_string(DrfOrigin o) noexcept;
std::optional<DrfOrigin> parse_drf_origin(std::string_view s);

struct DrfParams
{
  double t_la{3.5};        // s, look-ahead time
  double p_height{0.0064};  // 1/m^2
  double m_width{0.001};
  double c_width{0.5};      // m
  double k_steer{0.2};
  double wheelbase{2.8};    // m
  DrfOrigin origin{DrfOrigin::front_bumper};

  void validate() const;
};

/// Steering angles below this are treated as a straight path.
inline constexpr double kStraightSteering = 1e-4;

/// Arc length `s` along the predicted path and signed offset `n` (left positive) of a point.
struct PathCoordinates
{
  double s{0.0};
  double n{0.0};
};

/// Start point of the predicted path for the configured origin.
Vec2 drf_origin(const VehicleState & ego, const DrfParams & params);

PathCoordinates path_coordinates(const VehicleState & ego, double steering_angle, const DrfParams & params,
                                 const Vec2 & p);

/// Field height at point p.
double drf_value(const VehicleState & ego, double steering_angle, const DrfParams & params, const Vec2 & p);

/// Field sampled at every cell centre. Throws validation error if the grid does not cover the ego.
GridField build_drf(const VehicleState & ego, double steering_angle, const DrfParams & params,
                    const GridSpec & spec);

}  // namespace avor
