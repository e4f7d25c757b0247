#include "avor/metrics.hpp"

#include <limits>

namespace avor
{

SurrogateTrace surrogate_metrics(const ScenarioTrace & trace)
{
  const std::size_t n = trace.frame_count();
  const auto & cut = trace.cutin();
  SurrogateTrace out;
  out.t = trace.times();
  out.ttc_inv.assign(n, 0.0);
  out.thw_inv.assign(n, 0.0);
  out.ttc_valid.assign(n, 0);
  out.thw_valid.assign(n, 0);
  out.gap.assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const VehicleState & ego = trace.ego[k];
    const VehicleState * target = nullptr;
    if (overlaps_ego_lane(cut[k], trace.road) && cut[k].x > ego.x) {
      target = &cut[k];
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (const auto & [name, states] : trace.actors) {
        const VehicleState & s = states[k];
        if (s.x <= ego.x || !overlaps_ego_lane(s, trace.road)) continue;
        const double g = longitudinal_gap(ego, s);
        if (g < best) {
          best = g;
          target = &s;
        }
      }
    }
    if (target == nullptr) continue;

    const double gap = longitudinal_gap(ego, *target);
    if (!(gap > 0.0)) continue;
    out.gap[k] = gap;
    if (ego.v_lon > 0.0) {
      out.thw_inv[k] = ego.v_lon / gap;
      out.thw_valid[k] = 1;
    }
    const double closing = ego.v_lon - target->v_lon;
    if (closing > 0.0) {
      out.ttc_inv[k] = closing / gap;
      out.ttc_valid[k] = 1;
    }
  }
  return out;
}

}  // namespace avor
