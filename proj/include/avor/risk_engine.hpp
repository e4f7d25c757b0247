#pragma once

#include "avor/cost_map.hpp"
#include "avor/grid.hpp"
#include "avor/risk_field.hpp"
#include "avor/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avor
{

enum class RiskModel { drf, avor };

const char * to_string(RiskModel m) noexcept;
/// Accepts "drf" / "avor" in any case.
std::optional<RiskModel> parse_risk_model(std::string_view s);

struct RiskTrace
{
  RiskModel model{RiskModel::drf};
  std::vector<double> t;
  std::vector<double> value;
  std::string scenario_id;
  Population population{Population::objects};

  void validate() const;
};

/// Sum over cells of z * C * res^2, row-major with compensated accumulation.
double evaluate_risk(const GridField & field, const GridField & cost);

enum class SteeringSource { trajectory, zero };

const char * to_string(SteeringSource s) noexcept;
std::optional<SteeringSource> parse_steering_source(std::string_view s);

/// Steering angle per frame from the ego path curvature (three-point circumradius),
/// delta = atan(wheelbase * kappa). End frames copy their neighbour.
std::vector<double> estimate_steering(std::span<const VehicleState> ego, double wheelbase);

struct EngineParams
{
  DrfParams drf;
  CostParams cost;
  VccOptions vcc;
  GridExtent grid;
  SteeringSource steering{SteeringSource::trajectory};
  unsigned threads{0};  // 0 picks the hardware concurrency

  void validate() const;
};

struct FrameDetail
{
  double steering{0.0};
  VccPoint vcc;       // as computed
  bool vcc_applied{false};  // valid, inside the grid and not dropped by the lane gate
};

struct ScenarioRun
{
  std::vector<RiskTrace> traces;  // in the order the models were requested
  std::vector<FrameDetail> frames;
  Population population{Population::objects};
};

/// Evaluates the requested models on every frame. `population` overrides the trace's own level.
ScenarioRun run_scenario(const ScenarioTrace & trace, std::span<const RiskModel> models,
                         const EngineParams & params, std::optional<Population> population = std::nullopt);

/// Grids and layers of one frame, for inspection and dumps.
struct FrameFields
{
  GridField drf;
  CostMapStack costs;
  FrameDetail detail;
};
FrameFields frame_fields(const ScenarioTrace & trace, std::size_t frame, const EngineParams & params,
                         std::optional<Population> population = std::nullopt);

}  // namespace avor
