#include "avor/evaluation.hpp"

#include "avor/error.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace avor
{

std::size_t EvalReport::onset_positive() const
{
  return static_cast<std::size_t>(
    std::count_if(onsets.begin(), onsets.end(), [](const OnsetRecord & r) { return r.result.onset; }));
}

double EvalReport::onset_fraction() const
{
  if (onsets.empty()) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(onset_positive()) / static_cast<double>(onsets.size());
}

const EvalCell * EvalReport::find(RiskModel model, Population population, const std::string & scenario) const
{
  for (const auto & c : cells) {
    if (c.model == model && c.population == population && c.scenario == scenario) return &c;
  }
  return nullptr;
}

namespace
{

std::string column_label(const ScenarioTrace & trace)
{
  switch (trace.risk_label) {
    case RiskLabel::hrs: return "HRS";
    case RiskLabel::lrs: return "LRS";
    case RiskLabel::unlabeled: break;
  }
  return trace.id;
}

}  // namespace

EvalReport evaluate(std::span<const ScenarioTrace> scenarios, std::span<const RatingTrace> ratings,
                    const EngineParams & engine, const EvalOptions & options)
{
  EvalReport report;
  report.onset_threshold = options.onset_threshold;
  for (const auto & s : scenarios) {
    std::string label = column_label(s);
    if (std::find(report.scenarios.begin(), report.scenarios.end(), label) != report.scenarios.end()) label = s.id;
    report.scenarios.push_back(label);
  }

  struct Condition
  {
    std::size_t scenario;
    Population population;
    std::vector<const RatingTrace *> ratings;
  };
  std::vector<Condition> conditions;
  std::size_t matched = 0;
  for (std::size_t si = 0; si < scenarios.size(); ++si) {
    for (Population p : options.populations) {
      Condition c{si, p, {}};
      for (const auto & r : ratings) {
        if (r.scenario_id == scenarios[si].id && r.population == p) c.ratings.push_back(&r);
      }
      matched += c.ratings.size();
      conditions.push_back(std::move(c));
    }
  }
  if (matched == 0) {
    throw Error(ErrorCode::not_found, "evaluate: no rating matches any scenario and population");
  }

  // Indexed [model][condition]
  std::vector<std::vector<EvalCell>> by_model(options.models.size());
  for (const auto & cond : conditions) {
    const ScenarioTrace & trace = scenarios[cond.scenario];
    std::vector<EvalCell> cells;
    for (RiskModel m : options.models) {
      EvalCell cell;
      cell.model = m;
      cell.scenario = report.scenarios[cond.scenario];
      cell.scenario_id = trace.id;
      cell.population = cond.population;
      cell.raters = cond.ratings.size();
      cells.push_back(cell);
    }
    if (!cond.ratings.empty()) {
      const auto seg = segment_phases(trace, options.phases);
      const auto grid_t = trace.times();
      std::vector<RatingTrace> group;
      for (const auto * r : cond.ratings) group.push_back(*r);
      const auto agg = aggregate_ratings(group, grid_t);
      const double offset = phase0_mean(grid_t, agg.mean, seg);
      const auto run = run_scenario(trace, options.models, engine, cond.population);
      for (std::size_t mi = 0; mi < options.models.size(); ++mi) {
        const auto norm = normalize_risk(run.traces[mi].value, offset, options.normalize.scale_for(offset));
        cells[mi].phase0_srr = offset;
        cells[mi].rmse = rmse_per_phase(grid_t, norm, agg.mean, seg);
      }
      for (const auto * r : cond.ratings) {
        report.onsets.push_back({r->rater_id, r->scenario_id, r->population,
                                 measure_onset(*r, seg, options.onset_threshold)});
      }
    }
    for (std::size_t mi = 0; mi < cells.size(); ++mi) by_model[mi].push_back(std::move(cells[mi]));
  }

  for (auto & model_cells : by_model) {
    // population-major within a model, matching the report columns
    std::stable_sort(model_cells.begin(), model_cells.end(), [&](const EvalCell & a, const EvalCell & b) {
      const auto pa = std::find(options.populations.begin(), options.populations.end(), a.population);
      const auto pb = std::find(options.populations.begin(), options.populations.end(), b.population);
      return pa < pb;
    });
    for (auto & c : model_cells) report.cells.push_back(std::move(c));
  }
  return report;
}

void write_rmse_table(const EvalReport & report, std::ostream & out)
{
  std::vector<RiskModel> models;
  std::vector<Population> pops;
  for (const auto & c : report.cells) {
    if (std::find(models.begin(), models.end(), c.model) == models.end()) models.push_back(c.model);
    if (std::find(pops.begin(), pops.end(), c.population) == pops.end()) pops.push_back(c.population);
  }
  static constexpr const char * phases[] = {"I", "II", "III"};
  out << "model";
  for (Population p : pops) {
    for (const auto & s : report.scenarios) {
      for (const char * ph : phases) out << ',' << to_string(p) << '/' << s << '/' << ph;
    }
  }
  out << '\n';
  for (RiskModel m : models) {
    out << to_string(m);
    for (Population p : pops) {
      for (const auto & s : report.scenarios) {
        const EvalCell * cell = report.find(m, p, s);
        for (int k = 0; k < 3; ++k) {
          out << ',';
          if (cell == nullptr || !cell->rmse) {
            out << "NA";
            continue;
          }
          const double v = k == 0 ? cell->rmse->initiation : k == 1 ? cell->rmse->execution : cell->rmse->completion;
          out << detail::format_fixed(v, 2);
        }
      }
    }
    out << '\n';
  }
}

std::string onset_summary_json(const EvalReport & report)
{
  nlohmann::ordered_json j;
  j["threshold"] = report.onset_threshold;
  j["positive"] = report.onset_positive();
  j["total"] = report.onsets.size();
  const double f = report.onset_fraction();
  if (std::isnan(f)) {
    j["fraction"] = nullptr;
  } else {
    j["fraction"] = f;
  }
  auto raters = nlohmann::ordered_json::array();
  for (const auto & r : report.onsets) {
    raters.push_back({{"rater_id", r.rater_id},
                      {"scenario_id", r.scenario_id},
                      {"population", to_string(r.population)},
                      {"phase0_mean", r.result.phase0_mean},
                      {"phase1_max", r.result.phase1_max},
                      {"delta", r.result.delta},
                      {"onset", r.result.onset}});
  }
  j["raters"] = std::move(raters);
  return j.dump(2) + "\n";
}

std::vector<RatingTrace> load_ratings(const std::filesystem::path & dir)
{
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::io, "ratings directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RatingTrace> out;
  for (const auto & f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot read rating file '" + f.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      out.push_back(parse_rating(buf.str()));
    } catch (const Error & e) {
      throw Error(e.code(), f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace avor
