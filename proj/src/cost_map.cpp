#include "avor/cost_map.hpp"

#include "avor/error.hpp"

#include <algorithm>
#include <cmath>

namespace avor
{

void CostParams::validate() const
{
  const double costs[] = {cost_car, cost_offroad, cost_lane_marking, cost_building, cost_tree};
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::validation, "cost: all costs must be finite and >= 0");
    }
  }
  if (!(cost_car > cost_lane_marking)) {
    throw Error(ErrorCode::validation, "cost: cost_car must exceed cost_lane_marking");
  }
  if (!(marking_width >= 0.0)) {
    throw Error(ErrorCode::validation, "cost: marking_width must be >= 0");
  }
}

double CostParams::class_cost(ObjectClass c) const
{
  switch (c) {
    case ObjectClass::car:
    case ObjectClass::truck: return cost_car;
    case ObjectClass::tree: return cost_tree;
    case ObjectClass::building:
    case ObjectClass::barrier: return cost_building;
  }
  return cost_building;
}

const char * to_string(VccKernel k) noexcept
{
  return k == VccKernel::point ? "point" : "footprint";
}

std::optional<VccKernel> parse_vcc_kernel(std::string_view s)
{
  if (s == "point") return VccKernel::point;
  if (s == "footprint") return VccKernel::footprint;
  return std::nullopt;
}

void VccOptions::validate() const
{
  if (!(v_lat_min > 0.0)) {
    throw Error(ErrorCode::validation, "vcc: v_lat_min must be positive");
  }
}

std::optional<RayHit> intersect_lines(const Vec2 & a0, const Vec2 & da, const Vec2 & b0, const Vec2 & db)
{
  const double den = cross(da, db);
  if (std::abs(den) <= 1e-12 * norm(da) * norm(db)) return std::nullopt;
  const Vec2 w = b0 - a0;
  return RayHit{cross(w, db) / den, cross(w, da) / den};
}

VccPoint vcc_from_rays(const Vec2 & ego_pos, const Vec2 & ego_dir, const Vec2 & cut_pos,
                       const Vec2 & lat_velocity, double v_lat_min)
{
  VccPoint out;
  const double v_lat = norm(lat_velocity);
  const double dir_len = norm(ego_dir);
  if (!(v_lat >= v_lat_min) || !(dir_len > 0.0)) return out;
  const Vec2 a = ego_dir * (1.0 / dir_len);
  const Vec2 b = lat_velocity * (1.0 / v_lat);
  // Moving away from the ego path: the lateral ray can only meet it behind the cut-in.
  if (cross(a, cut_pos - ego_pos) * cross(a, b) >= 0.0) return out;
  const auto hit = intersect_lines(ego_pos, a, cut_pos, b);
  if (!hit || hit->t < 0.0 || !(hit->u > 0.0)) return out;
  const Vec2 p = cut_pos + b * hit->u;
  out.x = p.x;
  out.y = p.y;
  out.d_vcc = hit->u;
  out.tta = hit->u / v_lat;
  out.valid = true;
  return out;
}

VccPoint compute_vcc(const VehicleState & ego, const VehicleState & cutin, const VccOptions & options)
{
  VccPoint vcc = vcc_from_rays(ego.position(), unit_from_heading(ego.heading), cutin.position(),
                               {0.0, cutin.v_lat}, options.v_lat_min);
  vcc.heading = cutin.heading;
  vcc.length = cutin.length;
  vcc.width = cutin.width;
  return vcc;
}

std::vector<SceneActor> scene_actors(const ScenarioTrace & trace, std::size_t frame)
{
  std::vector<SceneActor> out;
  out.reserve(trace.actors.size());
  for (const auto & [name, states] : trace.actors) {
    out.push_back({states.at(frame), name == trace.cutin_actor});
  }
  return out;
}

namespace
{

struct CellRange
{
  std::size_t lo{0};
  std::size_t hi{0};  // exclusive
};

// Cells whose centres may fall within [lo, hi] along one axis.
CellRange axis_range(double lo, double hi, double origin, double res, std::size_t n)
{
  const double a = std::ceil((lo - origin) / res - 1e-9);
  const double b = std::floor((hi - origin) / res + 1e-9);
  if (b < 0.0 || a > static_cast<double>(n - 1) || a > b) return {0, 0};
  const auto first = static_cast<std::size_t>(std::max(a, 0.0));
  const auto last = static_cast<std::size_t>(std::min(b, static_cast<double>(n - 1)));
  return {first, last + 1};
}

// Cells take value * covered fraction.
void stamp(GridField & field, const std::vector<Vec2> & outline, double xmin, double xmax, double ymin, double ymax,
           double value)
{
  const GridSpec & spec = field.spec();
  const double h = 0.5 * spec.res;
  const auto ri = axis_range(xmin - h, xmax + h, spec.origin_x, spec.res, spec.nx);
  const auto rj = axis_range(ymin - h, ymax + h, spec.origin_y, spec.res, spec.ny);
  for (std::size_t j = rj.lo; j < rj.hi; ++j) {
    for (std::size_t i = ri.lo; i < ri.hi; ++i) {
      const Vec2 c = spec.cell_center(i, j);
      const double f = clipped_area(outline, c.x - h, c.x + h, c.y - h, c.y + h) / (spec.res * spec.res);
      if (f <= 0.0) continue;
      double & cell = field.at(i, j);
      cell = std::max(cell, value * f);
    }
  }
}

void stamp_box(GridField & field, const OrientedBox & box, double value)
{
  const double hx = box.longitudinal_half_extent();
  const double hy = box.lateral_half_extent();
  stamp(field, box.corners(), box.center.x - hx, box.center.x + hx, box.center.y - hy, box.center.y + hy, value);
}

bool included(Population population, bool is_cutin)
{
  return is_cutin || population != Population::objects;
}

bool included(Population population, ObjectClass c)
{
  if (population == Population::objects) return false;
  return !is_road_furniture(c) || population == Population::all_actors_road;
}

}  // namespace

GridField build_static_costmap(const RoadGeometry & road, std::span<const SceneActor> actors,
                               Population population, const GridSpec & spec, const CostParams & params)
{
  spec.validate();
  params.validate();
  GridField field(spec);

  const double y_right = road.right_edge();
  const double y_left = road.left_edge();
  const bool bounded = std::isfinite(road.road_length);
  const auto lines = road.lane_lines();
  const double half_mark = 0.5 * params.marking_width;

  for (std::size_t j = 0; j < spec.ny; ++j) {
    const double y = spec.origin_y + static_cast<double>(j) * spec.res;
    // Painted lines are usually thinner than a cell, so a cell takes the covered fraction.
    double marking = 0.0;
    for (double yl : lines) {
      const double overlap = std::min(y + 0.5 * spec.res, yl + half_mark) - std::max(y - 0.5 * spec.res, yl - half_mark);
      if (overlap > 0.0) marking = std::max(marking, params.cost_lane_marking * std::min(overlap / spec.res, 1.0));
    }
    const bool off_lateral = y < y_right || y > y_left;
    for (std::size_t i = 0; i < spec.nx; ++i) {
      const double x = spec.origin_x + static_cast<double>(i) * spec.res;
      const bool off = off_lateral || (bounded && (x < 0.0 || x > road.road_length));
      field.at(i, j) = off ? std::max(marking, params.cost_offroad) : marking;
    }
  }

  for (const auto & actor : actors) {
    if (!included(population, actor.is_cutin)) continue;
    stamp_box(field, actor.state.footprint(), params.cost_car);
  }
  for (const auto & obj : road.static_objects) {
    if (!included(population, obj.object_class) || obj.footprint.vertices.size() < 3) continue;
    const auto & poly = obj.footprint;
    stamp(field, poly.vertices, poly.min_x(), poly.max_x(), poly.min_y(), poly.max_y(), params.class_cost(obj.object_class));
  }
  return field;
}

GridField build_dynamic_costmap(std::span<const VccPoint> vccs, const GridSpec & spec, const CostParams & params,
                                VccKernel kernel)
{
  spec.validate();
  GridField field(spec);
  for (const auto & vcc : vccs) {
    if (!vcc.valid || !(vcc.tta > 0.0)) continue;
    const auto cell = spec.cell_of({vcc.x, vcc.y});
    if (!cell) continue;
    const double value = params.cost_car / vcc.tta;
    double & centre = field.at(cell->i, cell->j);
    centre = std::max(centre, value);
    if (kernel == VccKernel::footprint && vcc.length > 0.0 && vcc.width > 0.0) {
      stamp_box(field, OrientedBox{{vcc.x, vcc.y}, vcc.heading, vcc.length, vcc.width}, value);
    }
  }
  return field;
}

GridField build_dynamic_costmap(const VccPoint & vcc, const GridSpec & spec, const CostParams & params,
                                VccKernel kernel)
{
  return build_dynamic_costmap(std::span<const VccPoint>(&vcc, 1), spec, params, kernel);
}

CostMapStack compose_costmap(const GridField & static_layer, const GridField & dynamic_layer)
{
  if (!(static_layer.spec() == dynamic_layer.spec())) {
    throw Error(ErrorCode::spec_mismatch, "compose_costmap: layers are on different grids");
  }
  CostMapStack stack{static_layer, dynamic_layer, GridField(static_layer.spec())};
  const auto s = static_layer.values();
  const auto d = dynamic_layer.values();
  auto c = stack.composed.values();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = s[k] + d[k];
  return stack;
}

}  // namespace avor
