#include "avor/error.hpp"
#include "avor/scenario.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace avor
{

namespace
{

using nlohmann::json;

constexpr std::string_view kSchema = "avor-scenario/1";

[[noreturn]] void fail(const std::string & field, const std::string & what)
{
  throw Error(ErrorCode::parse, "scenario: field '" + field + "' " + what);
}

void check_keys(const json & obj, std::initializer_list<std::string_view> allowed, const std::string & where)
{
  if (!obj.is_object()) fail(where, "must be an object");
  for (const auto & [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(where.empty() ? key : where + "." + key, "is not part of the schema");
  }
}

const json & require(const json & obj, const char * key, const std::string & where)
{
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where.empty() ? key : where + "." + key, "is missing");
  return *it;
}

double number(const json & obj, const char * key, const std::string & where)
{
  const json & v = require(obj, key, where);
  if (!v.is_number()) fail(where.empty() ? key : where + "." + key, "must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json & obj, const char * key, const std::string & where)
{
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number()) fail(where + "." + key, "must be a number");
  return it->get<double>();
}

int integer(const json & obj, const char * key, const std::string & where)
{
  const json & v = require(obj, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "must be an integer");
  return v.get<int>();
}

std::string string(const json & obj, const char * key, const std::string & where)
{
  const json & v = require(obj, key, where);
  if (!v.is_string()) fail(where.empty() ? key : where + "." + key, "must be a string");
  return v.get<std::string>();
}

RoadGeometry parse_road(const json & j)
{
  check_keys(j, {"lane_count", "lane_width", "ego_lane_index", "road_length", "static_objects"}, "road");
  RoadGeometry road;
  road.lane_count = integer(j, "lane_count", "road");
  road.lane_width = number(j, "lane_width", "road");
  road.ego_lane_index = integer(j, "ego_lane_index", "road");
  if (auto len = optional_number(j, "road_length", "road")) road.road_length = *len;
  if (const auto it = j.find("static_objects"); it != j.end()) {
    if (!it->is_array()) fail("road.static_objects", "must be an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "road.static_objects[" + std::to_string(k) + "]";
      const json & o = (*it)[k];
      check_keys(o, {"class", "polygon"}, where);
      StaticObject obj;
      const auto cls = parse_object_class(string(o, "class", where));
      if (!cls) fail(where + ".class", "must be one of car, truck, building, tree, barrier");
      obj.object_class = *cls;
      const json & poly = require(o, "polygon", where);
      if (!poly.is_array() || poly.size() < 3) fail(where + ".polygon", "must be an array of >= 3 [x, y] points");
      for (const auto & p : poly) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          fail(where + ".polygon", "points must be [x, y] number pairs");
        }
        obj.footprint.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      road.static_objects.push_back(std::move(obj));
    }
  }
  return road;
}

std::vector<VehicleState> parse_frames(const json & j, const std::string & where, double dt,
                                       const KinematicsOptions & kinematics)
{
  if (!j.is_array()) fail(where, "must be an array of frames");
  std::vector<VehicleState> states;
  states.reserve(j.size());
  bool have_velocity = true;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string fw = where + "[" + std::to_string(k) + "]";
    const json & f = j[k];
    check_keys(f, {"t", "x", "y", "heading", "v_lon", "v_lat", "length", "width"}, fw);
    VehicleState s;
    s.t = number(f, "t", fw);
    s.x = number(f, "x", fw);
    s.y = number(f, "y", fw);
    s.heading = number(f, "heading", fw);
    const auto v_lon = optional_number(f, "v_lon", fw);
    const auto v_lat = optional_number(f, "v_lat", fw);
    if (v_lon && v_lat) {
      s.v_lon = *v_lon;
      s.v_lat = *v_lat;
    } else {
      have_velocity = false;
    }
    if (auto len = optional_number(f, "length", fw)) s.length = *len;
    if (auto wid = optional_number(f, "width", fw)) s.width = *wid;
    states.push_back(s);
  }
  if (states.size() < 2) {
    throw Error(ErrorCode::validation, "scenario: " + where + " trace too short (need >= 2 frames)");
  }

  std::vector<double> v_lon(states.size());
  std::vector<double> v_lat(states.size());
  if (have_velocity) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      v_lon[k] = states[k].v_lon;
      v_lat[k] = states[k].v_lat;
    }
  } else {
    std::vector<Vec2> positions;
    positions.reserve(states.size());
    for (const auto & s : states) positions.push_back(s.position());
    auto series = derive_kinematics(positions, dt, kinematics);
    v_lon = std::move(series.v_lon);
    v_lat = std::move(series.v_lat);
  }
  // With exactly two frames there is nothing to smooth; accelerations stay zero.
  if (states.size() >= 3) {
    const auto a_lon = derive_acceleration(v_lon, dt, kinematics);
    const auto a_lat = derive_acceleration(v_lat, dt, kinematics);
    for (std::size_t k = 0; k < states.size(); ++k) {
      states[k].a_lon = a_lon[k];
      states[k].a_lat = a_lat[k];
    }
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    states[k].v_lon = v_lon[k];
    states[k].v_lat = v_lat[k];
  }
  return states;
}

json state_json(const VehicleState & s)
{
  return json{{"x", s.x},          {"y", s.y},         {"heading", s.heading}, {"v_lon", s.v_lon},
              {"v_lat", s.v_lat},  {"length", s.length}, {"width", s.width}};
}

}  // namespace

ScenarioTrace parse_scenario(std::string_view json_text, const KinematicsOptions & kinematics)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error & e) {
    throw Error(ErrorCode::parse, std::string("scenario: invalid JSON: ") + e.what());
  }
  check_keys(j, {"schema", "id", "dt", "road", "population", "risk_label", "ego", "actors", "cutin_actor"}, "");
  if (string(j, "schema", "") != kSchema) fail("schema", "must be \"avor-scenario/1\"");

  ScenarioTrace trace;
  trace.id = string(j, "id", "");
  trace.dt = number(j, "dt", "");
  if (!(trace.dt > 0.0)) throw Error(ErrorCode::format, "scenario: dt must be positive");
  trace.road = parse_road(require(j, "road", ""));

  const auto pop = parse_population(string(j, "population", ""));
  if (!pop) fail("population", "must be one of O, A, A+R");
  trace.population = *pop;
  const auto label = parse_risk_label(string(j, "risk_label", ""));
  if (!label) fail("risk_label", "must be one of HRS, LRS, unlabeled");
  trace.risk_label = *label;

  const json & ego = require(j, "ego", "");
  if (ego.is_array() && ego.size() < 2) {
    throw Error(ErrorCode::validation, "scenario '" + trace.id + "': trace too short (need >= 2 frames)");
  }
  trace.ego = parse_frames(ego, "ego", trace.dt, kinematics);

  const json & actors = require(j, "actors", "");
  if (!actors.is_object()) fail("actors", "must be an object mapping actor id to frames");
  for (const auto & [name, frames] : actors.items()) {
    trace.actors.emplace(name, parse_frames(frames, "actors." + name, trace.dt, kinematics));
  }
  trace.cutin_actor = string(j, "cutin_actor", "");
  trace.validate();
  return trace;
}

ScenarioTrace load_scenario(const std::filesystem::path & path, const KinematicsOptions & kinematics)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open scenario file '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), kinematics);
}

std::string scenario_frames_json(const ScenarioTrace & trace, Population population)
{
  json out;
  out["id"] = trace.id;
  out["dt"] = trace.dt;
  out["population"] = to_string(population);
  out["cutin_actor"] = trace.cutin_actor;
  out["road"] = {{"lane_count", trace.road.lane_count},
                 {"lane_width", trace.road.lane_width},
                 {"ego_lane_index", trace.road.ego_lane_index}};
  if (std::isfinite(trace.road.road_length)) out["road"]["road_length"] = trace.road.road_length;

  json objects = json::array();
  if (population != Population::objects) {
    for (const auto & obj : trace.road.static_objects) {
      if (is_road_furniture(obj.object_class) && population != Population::all_actors_road) continue;
      json poly = json::array();
      for (const auto & p : obj.footprint.vertices) poly.push_back({p.x, p.y});
      objects.push_back({{"class", to_string(obj.object_class)}, {"polygon", poly}});
    }
  }
  out["static_objects"] = objects;

  json frames = json::array();
  for (std::size_t k = 0; k < trace.frame_count(); ++k) {
    json f;
    f["t"] = trace.ego[k].t;
    f["ego"] = state_json(trace.ego[k]);
    json actors = json::object();
    for (const auto & [name, states] : trace.actors) {
      if (population == Population::objects && name != trace.cutin_actor) continue;
      actors[name] = state_json(states[k]);
    }
    f["actors"] = std::move(actors);
    frames.push_back(std::move(f));
  }
  out["frames"] = std::move(frames);
  return out.dump();
}

}  // namespace avor
