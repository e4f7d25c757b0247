#pragma once

#include "avor/geometry.hpp"

#include <span>
#include <vector>

namespace avor
{

struct KinematicsOptions
{
  /// Centred moving-average window (samples) applied to velocities before they are
  /// differentiated into accelerations. 1 disables smoothing.
  int smoothing_window{5};

  void validate() const;
};

struct KinematicSeries
{
  std::vector<double> v_lon;           // central differences of x
  std::vector<double> v_lat;           // central differences of y
  std::vector<double> v_lon_smoothed;  // moving average of v_lon
  std::vector<double> v_lat_smoothed;
  std::vector<double> a_lon;           // central differences of v_lon_smoothed
  std::vector<double> a_lat;
};

/// Central differences in the interior, first-order one-sided differences at both ends.
std::vector<double> finite_difference(std::span<const double> values, double dt);

/// Centred moving average. Near the ends the window shrinks symmetrically so that a
/// linear signal is reproduced exactly.
std::vector<double> moving_average(std::span<const double> values, int window);

/// Velocities and accelerations of a sampled planar trajectory. Requires >= 3 samples.
KinematicSeries derive_kinematics(std::span<const Vec2> positions, double dt,
                                  const KinematicsOptions & options = {});

/// Accelerations from an already known velocity series (smoothed first).
std::vector<double> derive_acceleration(std::span<const double> velocity, double dt,
                                        const KinematicsOptions & options = {});

}  // namespace avor
