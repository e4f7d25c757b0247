#include "avor/kinematics.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace avor
{

void KinematicsOptions::validate() const
{
  if (smoothing_window < 1) {
    throw Error(ErrorCode::validation, "kinematics: smoothing_window must be >= 1");
  }
}

std::vector<double> finite_difference(std::span<const double> values, double dt)
{
  const std::size_t n = values.size();
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "finite_difference: need at least 2 samples");
  }
  std::vector<double> out(n);
  out.front() = (values[1] - values[0]) / dt;
  out.back() = (values[n - 1] - values[n - 2]) / dt;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> values, int window)
{
  const std::size_t n = values.size();
  std::vector<double> out(values.begin(), values.end());
  if (window <= 1 || n < 3) {
    return out;
  }
  const std::size_t half = static_cast<std::size_t>(window / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t h = std::min({half, k, n - 1 - k});
    double sum = 0.0;
    for (std::size_t m = k - h; m <= k + h; ++m) sum += values[m];
    out[k] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<double> derive_acceleration(std::span<const double> velocity, double dt,
                                        const KinematicsOptions & options)
{
  options.validate();
  const auto smoothed = moving_average(velocity, options.smoothing_window);
  return finite_difference(smoothed, dt);
}

KinematicSeries derive_kinematics(std::span<const Vec2> positions, double dt,
                                  const KinematicsOptions & options)
{
  options.validate();
  if (positions.size() < 3) {
    throw Error(ErrorCode::invalid_argument,
                "derive_kinematics: need at least 3 samples, got " + std::to_string(positions.size()));
  }
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "derive_kinematics: dt must be positive");
  }
  std::vector<double> xs(positions.size());
  std::vector<double> ys(positions.size());
  std::transform(positions.begin(), positions.end(), xs.begin(), [](const Vec2 & p) { return p.x; });
  std::transform(positions.begin(), positions.end(), ys.begin(), [](const Vec2 & p) { return p.y; });

  KinematicSeries out;
  out.v_lon = finite_difference(xs, dt);
  out.v_lat = finite_difference(ys, dt);
  out.v_lon_smoothed = moving_average(out.v_lon, options.smoothing_window);
  out.v_lat_smoothed = moving_average(out.v_lat, options.smoothing_window);
  out.a_lon = finite_difference(out.v_lon_smoothed, dt);
  out.a_lat = finite_difference(out.v_lat_smoothed, dt);
  return out;
}

}  // namespace avor
