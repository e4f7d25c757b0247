#include "support.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace avor::test
{

namespace
{

VehicleState state(double t, double x, double y, double v_lon, double v_lat, double length, double width)
{
  VehicleState s;
  s.t = t;
  s.x = x;
  s.y = y;
  s.v_lon = v_lon;
  s.v_lat = v_lat;
  s.length = length;
  s.width = width;
  return s;
}

}  // namespace

ScenarioTrace make_cutin(const CutInSpec & spec)
{
  ScenarioTrace trace;
  trace.id = spec.id;
  trace.dt = spec.dt;
  trace.road.lane_count = 3;
  trace.road.lane_width = 3.5;
  trace.road.ego_lane_index = 1;
  trace.population = spec.population;
  trace.cutin_actor = "cutin";

  auto & cut = trace.actors["cutin"];
  double y = spec.y0;
  for (std::size_t k = 0; k < spec.frames; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    trace.ego.push_back(state(t, spec.ego_speed * t, 0.0, spec.ego_speed, 0.0, 4.6, 1.9));
    const bool moving = k >= spec.start_frame && (spec.v_lat < 0.0 ? y > 0.0 : y < 2.0 * spec.y0);
    double v_lat = moving ? spec.v_lat : 0.0;
    cut.push_back(state(t, spec.gap + spec.cut_speed * t, y, spec.cut_speed, v_lat, spec.length, spec.width));
    y += v_lat * spec.dt;
    if (spec.v_lat < 0.0 && y < 0.0) y = 0.0;
  }
  if (spec.neighbours) {
    auto & lead = trace.actors["lead"];
    auto & left = trace.actors["left"];
    auto & right = trace.actors["right"];
    for (std::size_t k = 0; k < spec.frames; ++k) {
      const double t = static_cast<double>(k) * spec.dt;
      lead.push_back(state(t, 60.0 + spec.ego_speed * t, 0.0, spec.ego_speed, 0.0, 4.6, 1.9));
      left.push_back(state(t, -15.0 + spec.ego_speed * t, 3.5, spec.ego_speed, 0.0, 4.6, 1.9));
      right.push_back(state(t, 20.0 + spec.ego_speed * t, -3.5, spec.ego_speed, 0.0, 4.6, 1.9));
    }
  }
  trace.validate();
  return trace;
}

std::string scenario_json(const ScenarioTrace & trace)
{
  using nlohmann::json;
  const auto frames = [](const std::vector<VehicleState> & states) {
    json out = json::array();
    for (const auto & s : states) {
      out.push_back({{"t", s.t},
                     {"x", s.x},
                     {"y", s.y},
                     {"heading", s.heading},
                     {"v_lon", s.v_lon},
                     {"v_lat", s.v_lat},
                     {"length", s.length},
                     {"width", s.width}});
    }
    return out;
  };
  json road{{"lane_count", trace.road.lane_count},
            {"lane_width", trace.road.lane_width},
            {"ego_lane_index", trace.road.ego_lane_index}};
  json objects = json::array();
  for (const auto & obj : trace.road.static_objects) {
    json poly = json::array();
    for (const auto & p : obj.footprint.vertices) poly.push_back({p.x, p.y});
    objects.push_back({{"class", to_string(obj.object_class)}, {"polygon", poly}});
  }
  road["static_objects"] = objects;
  json actors = json::object();
  for (const auto & [name, states] : trace.actors) actors[name] = frames(states);
  json doc{{"schema", "avor-scenario/1"},
           {"id", trace.id},
           {"dt", trace.dt},
           {"road", road},
           {"population", to_string(trace.population)},
           {"risk_label", to_string(trace.risk_label)},
           {"ego", frames(trace.ego)},
           {"actors", actors},
           {"cutin_actor", trace.cutin_actor}};
  return doc.dump();
}

std::filesystem::path data_dir() { return AVOR_TEST_DATA_DIR; }

std::filesystem::path scenario_path(const std::string & name)
{
  return data_dir() / "scenarios" / (name + ".json");
}

TempDir::TempDir(const std::string & tag)
{
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("avor_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path & path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace avor::test
