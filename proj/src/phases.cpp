#include "avor/phases.hpp"

#include "avor/error.hpp"
#include "avor/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace avor
{

void PhaseOptions::validate() const
{
  if (!(v_lat_init > 0.0) || sustain < 0.0 || !(ttc_safe > 0.0) || phase0_length < 0.0) {
    throw Error(ErrorCode::validation, "phases: thresholds must be positive");
  }
}

const char * to_string(Phase p) noexcept
{
  switch (p) {
    case Phase::none: return "-";
    case Phase::baseline: return "0";
    case Phase::initiation: return "I";
    case Phase::execution: return "II";
    case Phase::completion: return "III";
  }
  return "?";
}

Phase phase_at(const PhaseSegmentation & seg, double t)
{
  if (t < seg.t_phase0_start || t >= seg.t_III_end) return Phase::none;
  if (t < seg.t_I_start) return Phase::baseline;
  if (t < seg.t_II_start) return Phase::initiation;
  if (t < seg.t_III_start) return Phase::execution;
  return Phase::completion;
}

PhaseSegmentation segment_phases(const ScenarioTrace & trace, const PhaseOptions & options)
{
  options.validate();
  const auto & cut = trace.cutin();
  const std::size_t n = cut.size();
  const double half_lane = 0.5 * trace.road.lane_width;

  const auto start_lane = trace.road.lane_of(cut.front().y);
  if (!start_lane || std::abs(*start_lane - trace.road.ego_lane_index) != 1) {
    throw Error(ErrorCode::validation, "segment_phases: cut-in actor '" + trace.cutin_actor +
                                         "' does not start in a lane adjacent to the ego lane");
  }
  const double side = cut.front().y > 0.0 ? 1.0 : -1.0;

  const auto sustain_samples = static_cast<std::size_t>(std::ceil(options.sustain / trace.dt - 1e-9));
  const auto toward = [&](std::size_t k) { return -side * cut[k].v_lat; };

  std::size_t i_init = n;
  for (std::size_t k = 0; k + sustain_samples < n; ++k) {
    bool sustained = true;
    for (std::size_t m = k; m <= k + sustain_samples && sustained; ++m) {
      sustained = toward(m) > options.v_lat_init;
    }
    if (sustained) {
      i_init = k;
      break;
    }
  }
  if (i_init == n) {
    throw Error(ErrorCode::no_cutin, "no cut-in detected");
  }

  std::size_t i_exec = n;
  for (std::size_t k = i_init + 1; k < n; ++k) {
    const double near_edge = side * cut[k].y - cut[k].footprint().lateral_half_extent();
    if (near_edge < half_lane) {
      i_exec = k;
      break;
    }
  }
  if (i_exec == n) {
    throw Error(ErrorCode::no_cutin, "no cut-in detected: actor never crosses into the ego lane");
  }

  std::size_t i_comp = n;
  for (std::size_t k = i_exec + 1; k < n; ++k) {
    if (inside_ego_lane(cut[k], trace.road)) {
      i_comp = k;
      break;
    }
  }
  if (i_comp == n) {
    throw Error(ErrorCode::no_cutin, "no cut-in detected: actor never fully enters the ego lane");
  }

  const auto sm = surrogate_metrics(trace);
  std::size_t i_end = n - 1;
  for (std::size_t k = i_comp + 1; k < n; ++k) {
    const bool safe = !sm.ttc_valid[k] || sm.ttc_inv[k] <= 1.0 / options.ttc_safe;
    if (safe) {
      i_end = k;
      break;
    }
  }

  const auto lead = static_cast<std::size_t>(std::llround(options.phase0_length / trace.dt));
  const std::size_t i_zero = i_init > lead ? i_init - lead : 0;

  PhaseSegmentation seg;
  seg.t_phase0_start = trace.ego[i_zero].t;
  seg.t_I_start = trace.ego[i_init].t;
  seg.t_II_start = trace.ego[i_exec].t;
  seg.t_III_start = trace.ego[i_comp].t;
  seg.t_III_end = trace.ego[i_end].t;
  return seg;
}

std::size_t sample_index(const ScenarioTrace & trace, double t)
{
  const double t0 = trace.ego.front().t;
  const double k = std::round((t - t0) / trace.dt);
  if (k < 0.0 || k > static_cast<double>(trace.frame_count() - 1)) {
    throw Error(ErrorCode::out_of_range, "time " + std::to_string(t) + " s is outside the trace");
  }
  const auto idx = static_cast<std::size_t>(k);
  if (std::abs(trace.ego[idx].t - t) > 1e-6) {
    throw Error(ErrorCode::out_of_range, "time " + std::to_string(t) + " s is not a sample time");
  }
  return idx;
}

CutInCharacteristics characterize_cutin(const ScenarioTrace & trace, const PhaseSegmentation & seg)
{
  const std::size_t i_init = sample_index(trace, seg.t_I_start);
  const std::size_t i_comp = sample_index(trace, seg.t_III_start);
  if (i_comp <= i_init) {
    throw Error(ErrorCode::validation, "characterize_cutin: completion must follow initiation");
  }
  const auto & cut = trace.cutin();
  const double side = cut.front().y > 0.0 ? 1.0 : -1.0;

  CutInCharacteristics c;
  c.duration = seg.t_III_start - seg.t_I_start;
  double sum_v = 0.0;
  double sum_a = 0.0;
  for (std::size_t k = i_init; k <= i_comp; ++k) {
    const double v = std::abs(cut[k].v_lat);
    sum_v += v;
    sum_a += -side * cut[k].a_lat;
    c.v_lat_max = std::max(c.v_lat_max, v);
  }
  const auto count = static_cast<double>(i_comp - i_init + 1);
  c.v_lat_avg = sum_v / count;
  c.a_lat_avg = sum_a / count;

  const auto & ego = trace.ego[i_init];
  const auto & other = cut[i_init];
  c.initial_cutin_distance = other.x >= ego.x ? longitudinal_gap(ego, other) : longitudinal_gap(other, ego);
  return c;
}

}  // namespace avor
