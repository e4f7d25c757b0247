#include "avor/scenario.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace avor
{

const char * to_string(Population p) noexcept
{
  switch (p) {
    case Population::objects: return "O";
    case Population::all_actors: return "A";
    case Population::all_actors_road: return "A+R";
  }
  return "?";
}

const char * to_string(RiskLabel r) noexcept
{
  switch (r) {
    case RiskLabel::hrs: return "HRS";
    case RiskLabel::lrs: return "LRS";
    case RiskLabel::unlabeled: return "unlabeled";
  }
  return "?";
}

std::optional<Population> parse_population(std::string_view s)
{
  if (s == "O") return Population::objects;
  if (s == "A") return Population::all_actors;
  if (s == "A+R" || s == "A R") return Population::all_actors_road;  // '+' arrives as ' ' from query strings
  return std::nullopt;
}

std::optional<RiskLabel> parse_risk_label(std::string_view s)
{
  if (s == "HRS") return RiskLabel::hrs;
  if (s == "LRS") return RiskLabel::lrs;
  if (s == "unlabeled") return RiskLabel::unlabeled;
  return std::nullopt;
}

const char * to_string(ObjectClass c) noexcept
{
  switch (c) {
    case ObjectClass::car: return "car";
    case ObjectClass::truck: return "truck";
    case ObjectClass::building: return "building";
    case ObjectClass::tree: return "tree";
    case ObjectClass::barrier: return "barrier";
  }
  return "?";
}

std::optional<ObjectClass> parse_object_class(std::string_view s)
{
  if (s == "car") return ObjectClass::car;
  if (s == "truck") return ObjectClass::truck;
  if (s == "building") return ObjectClass::building;
  if (s == "tree") return ObjectClass::tree;
  if (s == "barrier") return ObjectClass::barrier;
  return std::nullopt;
}

void VehicleState::validate() const
{
  if (!(length > 0.0) || !(width > 0.0)) {
    throw Error(ErrorCode::validation, "vehicle state: length and width must be positive");
  }
  for (double v : {t, x, y, heading, v_lon, v_lat, a_lon, a_lat, length, width}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::validation, "vehicle state: non-finite value");
    }
  }
  if (!(std::abs(heading) < std::numbers::pi)) {
    throw Error(ErrorCode::validation, "vehicle state: |heading| must be < pi");
  }
}

void RoadGeometry::validate() const
{
  if (lane_count < 1) throw Error(ErrorCode::validation, "road: lane_count must be >= 1");
  if (ego_lane_index < 0 || ego_lane_index >= lane_count) {
    throw Error(ErrorCode::validation, "road: ego_lane_index out of range");
  }
  if (!(lane_width > 0.0) || !std::isfinite(lane_width)) {
    throw Error(ErrorCode::validation, "road: lane_width must be positive");
  }
  if (!(road_length > 0.0)) throw Error(ErrorCode::validation, "road: road_length must be positive");
  for (const auto & obj : static_objects) {
    if (obj.footprint.vertices.size() < 3) {
      throw Error(ErrorCode::validation, "road: static object polygon needs >= 3 vertices");
    }
  }
}

std::optional<int> RoadGeometry::lane_of(double y) const
{
  if (y < right_edge() || y > left_edge()) {
    return std::nullopt;
  }
  const int lane = static_cast<int>(std::floor((y - right_edge()) / lane_width));
  return std::min(lane, lane_count - 1);
}

std::vector<double> RoadGeometry::lane_lines() const
{
  std::vector<double> lines;
  lines.reserve(static_cast<std::size_t>(lane_count) + 1);
  for (int k = 0; k <= lane_count; ++k) {
    lines.push_back(right_edge() + k * lane_width);
  }
  return lines;
}

const std::vector<VehicleState> & ScenarioTrace::cutin() const
{
  const auto it = actors.find(cutin_actor);
  if (it == actors.end()) {
    throw Error(ErrorCode::reference, "scenario '" + id + "': cutin_actor '" + cutin_actor + "' not among actors");
  }
  return it->second;
}

std::vector<double> ScenarioTrace::times() const
{
  std::vector<double> t;
  t.reserve(ego.size());
  for (const auto & s : ego) t.push_back(s.t);
  return t;
}

void ScenarioTrace::validate() const
{
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::validation, "scenario '" + id + "': dt must be positive");
  }
  road.validate();
  if (ego.size() < 2) {
    throw Error(ErrorCode::validation, "scenario '" + id + "': trace too short (need >= 2 frames)");
  }
  if (actors.find(cutin_actor) == actors.end()) {
    throw Error(ErrorCode::reference, "scenario '" + id + "': cutin_actor '" + cutin_actor + "' not among actors");
  }
  constexpr double tol = 1e-9;
  for (std::size_t k = 0; k < ego.size(); ++k) {
    ego[k].validate();
    if (k > 0 && std::abs((ego[k].t - ego[k - 1].t) - dt) > tol) {
      throw Error(ErrorCode::format, "scenario '" + id + "': timestamps not uniform with stride dt at frame " +
                                       std::to_string(k));
    }
  }
  for (const auto & [name, states] : actors) {
    if (states.size() != ego.size()) {
      throw Error(ErrorCode::format, "scenario '" + id + "': actor '" + name + "' has " +
                                       std::to_string(states.size()) + " frames, ego has " +
                                       std::to_string(ego.size()));
    }
    for (std::size_t k = 0; k < states.size(); ++k) {
      states[k].validate();
      if (std::abs(states[k].t - ego[k].t) > tol) {
        throw Error(ErrorCode::format, "scenario '" + id + "': actor '" + name +
                                         "' timestamps differ from ego at frame " + std::to_string(k));
      }
    }
  }
}

double longitudinal_gap(const VehicleState & rear, const VehicleState & front)
{
  const double rear_front_bumper = rear.x + rear.footprint().longitudinal_half_extent();
  const double front_rear_bumper = front.x - front.footprint().longitudinal_half_extent();
  return front_rear_bumper - rear_front_bumper;
}

bool overlaps_ego_lane(const VehicleState & s, const RoadGeometry & road)
{
  const double half_lane = 0.5 * road.lane_width;
  const double e = s.footprint().lateral_half_extent();
  return s.y - e < half_lane && s.y + e > -half_lane;
}

bool inside_ego_lane(const VehicleState & s, const RoadGeometry & road)
{
  const double half_lane = 0.5 * road.lane_width;
  const double e = s.footprint().lateral_half_extent();
  return s.y + e <= half_lane && s.y - e >= -half_lane;
}

}  // namespace avor
