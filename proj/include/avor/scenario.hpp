#pragma once

#include "avor/geometry.hpp"
#include "avor/kinematics.hpp"

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace avor
{

/// Scene population level: object of interest only, all road actors, actors plus road furniture.
enum class Population { objects, all_actors, all_actors_road };

enum class RiskLabel { hrs, lrs, unlabeled };

const char * to_string(Population p) noexcept;
const char * to_string(RiskLabel r) noexcept;
std::optional<Population> parse_population(std::string_view s);
std::optional<RiskLabel> parse_risk_label(std::string_view s);

/// Kinematic state in the road frame: x along the road, y lateral with y = 0 at the
/// ego-lane centre. (x, y) is the footprint centre.
struct VehicleState
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double v_lon{0.0};
  double v_lat{0.0};
  double a_lon{0.0};
  double a_lat{0.0};
  double length{4.6};
  double width{1.9};

  Vec2 position() const { return {x, y}; }
  OrientedBox footprint() const { return {{x, y}, heading, length, width}; }
  double speed() const { return std::hypot(v_lon, v_lat); }
  void validate() const;
};

enum class ObjectClass { car, truck, building, tree, barrier };

const char * to_string(ObjectClass c) noexcept;
std::optional<ObjectClass> parse_object_class(std::string_view s);

/// Parked vehicles count as road actors; everything else is road furniture.
inline bool is_road_furniture(ObjectClass c) { return c != ObjectClass::car && c != ObjectClass::truck; }

struct StaticObject
{
  Polygon footprint;
  ObjectClass object_class{ObjectClass::building};
};

/// Straight multi-lane road. Lane i has its centre at (i - ego_lane_index) * lane_width, so
/// lane indices grow towards +y.
struct RoadGeometry
{
  int lane_count{1};
  double lane_width{3.5};
  int ego_lane_index{0};
  double road_length{std::numeric_limits<double>::infinity()};
  std::vector<StaticObject> static_objects;

  void validate() const;
  double lane_center(int lane) const { return (lane - ego_lane_index) * lane_width; }
  double right_edge() const { return (-ego_lane_index - 0.5) * lane_width; }
  double left_edge() const { return (lane_count - ego_lane_index - 0.5) * lane_width; }
  /// Lane index containing lateral position y; nullopt when off the road.
  std::optional<int> lane_of(double y) const;
  /// Lateral positions of every lane line, road edges included, ascending.
  std::vector<double> lane_lines() const;
};

struct ScenarioTrace
{
  std::string id;
  double dt{0.1};
  RoadGeometry road;
  std::vector<VehicleState> ego;
  std::map<std::string, std::vector<VehicleState>> actors;
  std::string cutin_actor;
  Population population{Population::objects};
  RiskLabel risk_label{RiskLabel::unlabeled};

  std::size_t frame_count() const { return ego.size(); }
  /// Number of frames times dt.
  double duration() const { return static_cast<double>(ego.size()) * dt; }
  const std::vector<VehicleState> & cutin() const;
  std::vector<double> times() const;

  /// Checks every invariant; throws Error on the first violation.
  void validate() const;
};

/// Parses an "avor-scenario/1" document. Missing velocities are derived from positions,
/// accelerations always come from the (smoothed) velocities.
ScenarioTrace parse_scenario(std::string_view json_text, const KinematicsOptions & kinematics = {});
ScenarioTrace load_scenario(const std::filesystem::path & path, const KinematicsOptions & kinematics = {});

/// Frame listing for playback, filtered to the requested population level.
std::string scenario_frames_json(const ScenarioTrace & trace, Population population);

/// Bumper-to-bumper longitudinal gap from `rear` to `front` (negative when they overlap).
double longitudinal_gap(const VehicleState & rear, const VehicleState & front);

/// True when any part of the footprint lies inside the ego lane (|y| < lane_width / 2).
bool overlaps_ego_lane(const VehicleState & s, const RoadGeometry & road);
/// True when the whole footprint lies inside the ego lane.
bool inside_ego_lane(const VehicleState & s, const RoadGeometry & road);

}  // namespace avor
