#pragma once

#include "avor/scenario.hpp"

#include <string>

namespace avor
{

struct PhaseOptions
{
  double v_lat_init{0.2};  // m/s towards the ego lane that marks initiation
  double sustain{0.3};     // s the lateral speed must stay above v_lat_init
  double ttc_safe{4.0};    // s; completion ends at the first safe TTC
  double phase0_length{2.0};

  void validate() const;
};

/// Phase boundaries of a cut-in. Every boundary is a sample time of the trace.
struct PhaseSegmentation
{
  double t_phase0_start{0.0};
  double t_I_start{0.0};
  double t_II_start{0.0};
  double t_III_start{0.0};
  double t_III_end{0.0};
};

enum class Phase { none, baseline, initiation, execution, completion };

const char * to_string(Phase p) noexcept;

/// Phase of time t with half-open windows [start, end). Samples before phase 0 or at/after
/// t_III_end are Phase::none.
Phase phase_at(const PhaseSegmentation & seg, double t);

/// Initiation: first sample from which the cut-in actor's lateral speed towards the ego lane
/// exceeds v_lat_init for at least `sustain` seconds. Execution: first later sample where the
/// near-side footprint edge is inside the ego lane. Completion: first later sample with the full
/// footprint inside the ego lane; it lasts until the first later sample with TTC >= ttc_safe
/// (undefined TTC counts as safe) or the end of the trace.
PhaseSegmentation segment_phases(const ScenarioTrace & trace, const PhaseOptions & options = {});

struct CutInCharacteristics
{
  double duration{0.0};          // t_III_start - t_I_start
  double v_lat_avg{0.0};         // mean |v_lat| over [t_I_start, t_III_start]
  double v_lat_max{0.0};
  double a_lat_avg{0.0};         // mean lateral acceleration towards the ego lane
  double initial_cutin_distance{0.0};  // bumper-to-bumper gap at t_I_start
};

CutInCharacteristics characterize_cutin(const ScenarioTrace & trace, const PhaseSegmentation & seg);

/// Index of the sample whose time equals t (within 1e-6 s); throws out_of_range otherwise.
std::size_t sample_index(const ScenarioTrace & trace, double t);

}  // namespace avor
