#pragma once

#include "avor/grid.hpp"
#include "avor/scenario.hpp"

#include <optional>
#include <span>
#include <vector>

namespace avor
{

struct CostParams
{
  double cost_car{10000.0};  // also the baseline k of the dynamic cost
  double cost_offroad{2000.0};
  double cost_lane_marking{500.0};
  double cost_building{10000.0};  // buildings and barriers
  double cost_tree{10000.0};
  double marking_width{0.15};  // m, painted line width

  void validate() const;
  double class_cost(ObjectClass c) const;
};

/// How the dynamic cost of a VCC is laid onto the grid.
///  point: only the cell containing the VCC.
///  footprint: every cell under a virtual copy of the cut-in vehicle placed at the VCC.
enum class VccKernel { point, footprint };

const char * to_string(VccKernel k) noexcept;
std::optional<VccKernel> parse_vcc_kernel(std::string_view s);

struct VccOptions
{
  double v_lat_min{0.05};  // m/s
  VccKernel kernel{VccKernel::footprint};
  // Drop the VCC once the whole cut-in footprint is inside the ego lane.
  bool drop_inside_lane{true};

  void validate() const;
};

struct VccPoint
{
  double x{0.0};
  double y{0.0};
  double d_vcc{0.0};
  double tta{0.0};
  bool valid{false};
  // Footprint of the cut-in vehicle, used by the footprint kernel.
  double heading{0.0};
  double length{0.0};
  double width{0.0};
};

/// Parameters (t, u) of the intersection a0 + t*da = b0 + u*db; nullopt for parallel lines.
struct RayHit
{
  double t{0.0};
  double u{0.0};
};
std::optional<RayHit> intersect_lines(const Vec2 & a0, const Vec2 & da, const Vec2 & b0, const Vec2 & db);

/// VCC of an ego travelling along `ego_dir` from `ego_pos` and a cut-in at `cut_pos` with
/// lateral velocity vector `lat_velocity`. Frame independent.
VccPoint vcc_from_rays(const Vec2 & ego_pos, const Vec2 & ego_dir, const Vec2 & cut_pos,
                       const Vec2 & lat_velocity, double v_lat_min);

/// VCC in the road frame: ego ray along its heading, cut-in ray along (0, v_lat).
VccPoint compute_vcc(const VehicleState & ego, const VehicleState & cutin, const VccOptions & options = {});

/// Non-ego vehicle for the static layer.
struct SceneActor
{
  VehicleState state;
  bool is_cutin{false};
};

std::vector<SceneActor> scene_actors(const ScenarioTrace & trace, std::size_t frame);

/// Static cost layer. Overlapping costs resolve by max.
GridField build_static_costmap(const RoadGeometry & road, std::span<const SceneActor> actors,
                               Population population, const GridSpec & spec, const CostParams & params);

/// Dynamic cost layer: cost_car / tta under the kernel of every valid VCC, max where they overlap.
/// Invalid VCCs and VCCs outside the grid contribute nothing.
GridField build_dynamic_costmap(std::span<const VccPoint> vccs, const GridSpec & spec, const CostParams & params,
                                VccKernel kernel = VccKernel::point);
GridField build_dynamic_costmap(const VccPoint & vcc, const GridSpec & spec, const CostParams & params,
                                VccKernel kernel = VccKernel::point);

struct CostMapStack
{
  GridField static_layer;
  GridField dynamic_layer;
  GridField composed;
};

/// Cell-wise exact sum. Throws spec_mismatch when the layers live on different grids.
CostMapStack compose_costmap(const GridField & static_layer, const GridField & dynamic_layer);

}  // namespace avor
