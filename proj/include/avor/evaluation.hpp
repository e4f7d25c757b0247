#pragma once

#include "avor/metrics.hpp"
#include "avor/phases.hpp"
#include "avor/risk_engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace avor
{

struct NormalizeOptions
{
  /// Offset used when no ratings are available (e.g. `run`); 5 is the neutral rating.
  double phase0_srr{5.0};
  /// Fixed scale; unset means 10 - offset.
  std::optional<double> scale;

  double scale_for(double offset) const { return scale ? *scale : default_normalization_scale(offset); }
};

struct EvalOptions
{
  PhaseOptions phases;
  NormalizeOptions normalize;
  double onset_threshold{0.5};
  std::vector<RiskModel> models{RiskModel::drf, RiskModel::avor};
  std::vector<Population> populations{Population::objects, Population::all_actors, Population::all_actors_road};
};

struct EvalCell
{
  RiskModel model{RiskModel::drf};
  std::string scenario;  // column label: HRS / LRS, or the scenario id when unlabeled
  std::string scenario_id;
  Population population{Population::objects};
  std::size_t raters{0};
  double phase0_srr{0.0};
  std::optional<PhaseRmse> rmse;  // empty when no ratings exist for the condition
};

struct OnsetRecord
{
  std::string rater_id;
  std::string scenario_id;
  Population population{Population::objects};
  OnsetResult result;
};

struct EvalReport
{
  std::vector<std::string> scenarios;  // column labels in input order
  std::vector<EvalCell> cells;         // model-major, then population, then scenario
  std::vector<OnsetRecord> onsets;
  double onset_threshold{0.5};

  std::size_t onset_positive() const;
  double onset_fraction() const;  // NaN without any rating
  const EvalCell * find(RiskModel model, Population population, const std::string & scenario) const;
};

/// Scores every (model, scenario, population) condition against the across-rater mean of the
/// ratings that belong to it. Throws not_found when no rating matches any condition.
EvalReport evaluate(std::span<const ScenarioTrace> scenarios, std::span<const RatingTrace> ratings,
                    const EngineParams & engine, const EvalOptions & options = {});

/// Rows are models; columns are population x scenario x phase; "NA" where no ratings exist.
void write_rmse_table(const EvalReport & report, std::ostream & out);
std::string onset_summary_json(const EvalReport & report);

/// Reads every *.json rating in `dir` (sorted by file name).
std::vector<RatingTrace> load_ratings(const std::filesystem::path & dir);

}  // namespace avor
