#include "avor/avor.h"

#include "avor/config.hpp"
#include "avor/error.hpp"
#include "avor/evaluation.hpp"
#include "avor/metrics.hpp"
#include "avor/phases.hpp"
#include "avor/risk_engine.hpp"
#include "avor/scenario.hpp"
#include "avor/session.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct avor_config
{
  avor::Config config;
};

struct avor_scenario
{
  avor::ScenarioTrace trace;
};

struct avor_risk_result
{
  avor::ScenarioRun run;
  std::string scenario_id;
  double dt{0.0};
  std::optional<avor::PhaseSegmentation> phases;
  std::optional<avor::CutInCharacteristics> stats;
  std::string phase_error;
  double offset{0.0};
  double scale{0.0};
  std::vector<std::optional<std::vector<double>>> normalized;  // per trace
  std::string config_text;
};

struct avor_session_store
{
  explicit avor_session_store(const std::string & dir) : store(dir) {}
  avor::SessionStore store;
};

namespace
{

using nlohmann::ordered_json;

thread_local std::string g_last_error;

avor_status to_status(avor::ErrorCode code)
{
  using avor::ErrorCode;
  switch (code) {
    case ErrorCode::parse: return AVOR_E_PARSE;
    case ErrorCode::format: return AVOR_E_FORMAT;
    case ErrorCode::reference: return AVOR_E_REFERENCE;
    case ErrorCode::validation: return AVOR_E_VALIDATION;
    case ErrorCode::io: return AVOR_E_IO;
    case ErrorCode::no_cutin: return AVOR_E_NO_CUTIN;
    case ErrorCode::degenerate: return AVOR_E_DEGENERATE;
    case ErrorCode::spec_mismatch: return AVOR_E_SPEC_MISMATCH;
    case ErrorCode::out_of_range: return AVOR_E_OUT_OF_RANGE;
    case ErrorCode::invalid_argument: return AVOR_E_INVALID_ARGUMENT;
    case ErrorCode::not_found: return AVOR_E_NOT_FOUND;
    case ErrorCode::conflict: return AVOR_E_CONFLICT;
  }
  return AVOR_E_INTERNAL;
}

template <class F>
avor_status guarded(F && body)
{
  try {
    g_last_error.clear();
    body();
    return AVOR_OK;
  } catch (const avor::Error & e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception & e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return AVOR_E_PARSE;
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return AVOR_E_INTERNAL;
  } catch (const std::exception & e) {
    g_last_error = e.what();
    return AVOR_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return AVOR_E_INTERNAL;
  }
}

void require(bool condition, const char * what)
{
  if (!condition) throw avor::Error(avor::ErrorCode::invalid_argument, what);
}

char * dup_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

const avor::Config & config_or_default(const avor_config * config)
{
  static const avor::Config defaults;
  return config != nullptr ? config->config : defaults;
}

avor::Population population_arg(const char * s)
{
  const auto p = avor::parse_population(s);
  if (!p) throw avor::Error(avor::ErrorCode::invalid_argument, std::string("unknown population '") + s + "'");
  return *p;
}

ordered_json phases_json(const avor::PhaseSegmentation & s)
{
  return ordered_json{{"t_phase0_start", s.t_phase0_start},
                      {"t_I_start", s.t_I_start},
                      {"t_II_start", s.t_II_start},
                      {"t_III_start", s.t_III_start},
                      {"t_III_end", s.t_III_end}};
}

ordered_json stats_json(const avor::CutInCharacteristics & c)
{
  return ordered_json{{"duration", c.duration},
                      {"v_lat_avg", c.v_lat_avg},
                      {"v_lat_max", c.v_lat_max},
                      {"a_lat_avg", c.a_lat_avg},
                      {"initial_cutin_distance", c.initial_cutin_distance}};
}

std::string session_json(const avor::SessionRecord & r)
{
  ordered_json j{{"session_id", r.session_id},
                 {"rater_id", r.rater_id},
                 {"scenario_id", r.scenario_id},
                 {"population", avor::to_string(r.population)},
                 {"started_at", r.started_at},
                 {"completed", r.completed}};
  if (r.completed) {
    j["samples"] = r.rating.t.size();
    j["file"] = r.file.filename().string();
  }
  return j.dump();
}

const char * phase_label(const avor_risk_result & r, double t)
{
  if (!r.phases) return "-";
  return avor::to_string(avor::phase_at(*r.phases, t));
}

}  // namespace

extern "C" {

const char * avor_version(void)
{
  return "1.0.0";
}

const char * avor_last_error(void)
{
  return g_last_error.c_str();
}

const char * avor_status_name(avor_status status)
{
  switch (status) {
    case AVOR_OK: return "ok";
    case AVOR_E_PARSE: return "parse_error";
    case AVOR_E_FORMAT: return "format_error";
    case AVOR_E_REFERENCE: return "reference_error";
    case AVOR_E_VALIDATION: return "validation_error";
    case AVOR_E_IO: return "io_error";
    case AVOR_E_NO_CUTIN: return "no_cutin";
    case AVOR_E_DEGENERATE: return "degenerate_trace";
    case AVOR_E_SPEC_MISMATCH: return "spec_mismatch";
    case AVOR_E_OUT_OF_RANGE: return "out_of_range";
    case AVOR_E_INVALID_ARGUMENT: return "invalid_argument";
    case AVOR_E_NOT_FOUND: return "not_found";
    case AVOR_E_CONFLICT: return "conflict";
    case AVOR_E_INTERNAL: return "internal_error";
  }
  return "internal_error";
}

void avor_string_free(char * s)
{
  std::free(s);
}

avor_status avor_config_new(avor_config ** out)
{
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new avor_config{};
  });
}

avor_status avor_config_load(const char * path, avor_config ** out)
{
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out are required");
    auto cfg = std::make_unique<avor_config>();
    cfg->config = avor::load_config(path);
    cfg->config.validate();
    *out = cfg.release();
  });
}

avor_status avor_config_set(avor_config * config, const char * key, const char * value)
{
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "config, key and value are required");
    avor::Config next = config->config;
    avor::set_config_value(next, key, value);
    next.validate();
    config->config = next;
  });
}

avor_status avor_config_apply_env(avor_config * config)
{
  return guarded([&] {
    require(config != nullptr, "config is NULL");
    avor::Config next = config->config;
    avor::apply_env_overrides(next);
    next.validate();
    config->config = next;
  });
}

avor_status avor_config_to_text(const avor_config * config, char ** out)
{
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = dup_string(avor::config_to_text(config_or_default(config)));
  });
}

void avor_config_free(avor_config * config)
{
  delete config;
}

avor_status avor_scenario_load(const char * path, const avor_config * config, avor_scenario ** out)
{
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out are required");
    auto s = std::make_unique<avor_scenario>();
    s->trace = avor::load_scenario(path, config_or_default(config).kinematics);
    *out = s.release();
  });
}

avor_status avor_scenario_parse(const char * json, size_t length, const avor_config * config, avor_scenario ** out)
{
  return guarded([&] {
    require(json != nullptr && out != nullptr, "json and out are required");
    auto s = std::make_unique<avor_scenario>();
    s->trace = avor::parse_scenario(std::string_view(json, length), config_or_default(config).kinematics);
    *out = s.release();
  });
}

void avor_scenario_free(avor_scenario * scenario)
{
  delete scenario;
}

avor_status avor_scenario_info_json(const avor_scenario * scenario, char ** out)
{
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "scenario and out are required");
    const auto & t = scenario->trace;
    ordered_json j{{"id", t.id},
                   {"dt", t.dt},
                   {"frames", t.frame_count()},
                   {"duration", t.duration()},
                   {"population", avor::to_string(t.population)},
                   {"risk_label", avor::to_string(t.risk_label)},
                   {"cutin_actor", t.cutin_actor},
                   {"populations", {"O", "A", "A+R"}}};
    *out = dup_string(j.dump());
  });
}

avor_status avor_scenario_frames_json(const avor_scenario * scenario, const char * population, char ** out)
{
  return guarded([&] {
    require(scenario != nullptr && population != nullptr && out != nullptr, "scenario, population and out are required");
    *out = dup_string(avor::scenario_frames_json(scenario->trace, population_arg(population)));
  });
}

avor_status avor_segment_phases(const avor_scenario * scenario, const avor_config * config, avor_phases * out)
{
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "scenario and out are required");
    const auto s = avor::segment_phases(scenario->trace, config_or_default(config).phases);
    *out = avor_phases{s.t_phase0_start, s.t_I_start, s.t_II_start, s.t_III_start, s.t_III_end};
  });
}

avor_status avor_characterize(const avor_scenario * scenario, const avor_config * config, avor_phases * phases,
                              avor_cutin_stats * out)
{
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "scenario and out are required");
    const auto s = avor::segment_phases(scenario->trace, config_or_default(config).phases);
    const auto c = avor::characterize_cutin(scenario->trace, s);
    if (phases != nullptr) *phases = avor_phases{s.t_phase0_start, s.t_I_start, s.t_II_start, s.t_III_start, s.t_III_end};
    *out = avor_cutin_stats{c.duration, c.v_lat_avg, c.v_lat_max, c.a_lat_avg, c.initial_cutin_distance};
  });
}

avor_status avor_run(const avor_scenario * scenario, const avor_config * config, unsigned models,
                     const char * population, avor_risk_result ** out)
{
  return guarded([&] {
    require(scenario != nullptr && out != nullptr, "scenario and out are required");
    require(models != 0 && (models & ~unsigned{AVOR_MODEL_DRF | AVOR_MODEL_AVOR}) == 0, "models must be a non-empty mask of AVOR_MODEL_*");
    const avor::Config & cfg = config_or_default(config);
    cfg.validate();
    std::vector<avor::RiskModel> list;
    if ((models & AVOR_MODEL_DRF) != 0) list.push_back(avor::RiskModel::drf);
    if ((models & AVOR_MODEL_AVOR) != 0) list.push_back(avor::RiskModel::avor);
    std::optional<avor::Population> pop;
    if (population != nullptr) pop = population_arg(population);

    auto r = std::make_unique<avor_risk_result>();
    const auto & trace = scenario->trace;
    r->run = avor::run_scenario(trace, list, cfg.engine, pop);
    r->scenario_id = trace.id;
    r->dt = trace.dt;
    r->config_text = avor::config_to_text(cfg);
    try {
      r->phases = avor::segment_phases(trace, cfg.phases);
      r->stats = avor::characterize_cutin(trace, *r->phases);
    } catch (const avor::Error & e) {
      r->phase_error = e.what();
    }
    r->offset = cfg.normalize.phase0_srr;
    r->scale = cfg.normalize.scale_for(r->offset);
    for (const auto & tr : r->run.traces) {
      try {
        r->normalized.emplace_back(avor::normalize_risk(tr.value, r->offset, r->scale));
      } catch (const avor::Error & e) {
        if (e.code() != avor::ErrorCode::degenerate) throw;
        r->normalized.emplace_back(std::nullopt);
      }
    }
    *out = r.release();
  });
}

size_t avor_risk_frame_count(const avor_risk_result * result)
{
  if (result == nullptr || result->run.traces.empty()) return 0;
  return result->run.traces.front().t.size();
}

avor_status avor_risk_values(const avor_risk_result * result, unsigned model, const double ** values, size_t * count)
{
  return guarded([&] {
    require(result != nullptr && values != nullptr && count != nullptr, "result, values and count are required");
    require(model == AVOR_MODEL_DRF || model == AVOR_MODEL_AVOR, "model must be AVOR_MODEL_DRF or AVOR_MODEL_AVOR");
    const auto want = model == AVOR_MODEL_DRF ? avor::RiskModel::drf : avor::RiskModel::avor;
    for (const auto & tr : result->run.traces) {
      if (tr.model == want) {
        *values = tr.value.data();
        *count = tr.value.size();
        return;
      }
    }
    throw avor::Error(avor::ErrorCode::not_found, "model was not part of the run");
  });
}

avor_status avor_risk_csv(const avor_risk_result * result, char ** out)
{
  return guarded([&] {
    require(result != nullptr && out != nullptr, "result and out are required");
    std::string csv = "t,model,raw,normalized,phase\n";
    for (std::size_t m = 0; m < result->run.traces.size(); ++m) {
      const auto & tr = result->run.traces[m];
      const auto & norm = result->normalized[m];
      for (std::size_t k = 0; k < tr.t.size(); ++k) {
        csv += avor::detail::format_double(tr.t[k]);
        csv += ',';
        csv += avor::to_string(tr.model);
        csv += ',';
        csv += avor::detail::format_double(tr.value[k]);
        csv += ',';
        if (norm) csv += avor::detail::format_double((*norm)[k]);
        csv += ',';
        csv += phase_label(*result, tr.t[k]);
        csv += '\n';
      }
    }
    *out = dup_string(csv);
  });
}

avor_status avor_risk_write_csv(const avor_risk_result * result, const char * path)
{
  char * csv = nullptr;
  const avor_status st = avor_risk_csv(result, &csv);
  if (st != AVOR_OK) return st;
  const std::string text(csv);
  avor_string_free(csv);
  return guarded([&] {
    require(path != nullptr, "path is NULL");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw avor::Error(avor::ErrorCode::io, std::string("cannot write '") + path + "'");
    f << text;
    f.close();
    if (!f) throw avor::Error(avor::ErrorCode::io, std::string("cannot write '") + path + "'");
  });
}

avor_status avor_risk_summary_json(const avor_risk_result * result, char ** out)
{
  return guarded([&] {
    require(result != nullptr && out != nullptr, "result and out are required");
    const auto & r = *result;
    ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["population"] = avor::to_string(r.run.population);
    j["frames"] = avor_risk_frame_count(result);
    j["dt"] = r.dt;
    if (r.phases) {
      j["phases"] = phases_json(*r.phases);
      j["cutin"] = stats_json(*r.stats);
    } else {
      j["phases"] = nullptr;
      j["phase_error"] = r.phase_error;
    }
    std::size_t vcc_frames = 0;
    for (const auto & f : r.run.frames) vcc_frames += f.vcc_applied ? 1 : 0;
    j["vcc_frames"] = vcc_frames;
    j["normalization"] = {{"phase0_srr", r.offset}, {"scale", r.scale}};

    static constexpr avor::Phase phases[] = {avor::Phase::baseline, avor::Phase::initiation, avor::Phase::execution,
                                             avor::Phase::completion};
    ordered_json models = ordered_json::object();
    for (std::size_t m = 0; m < r.run.traces.size(); ++m) {
      const auto & tr = r.run.traces[m];
      const auto & norm = r.normalized[m];
      ordered_json mj;
      double lo = tr.value.front();
      double hi = lo;
      double sum = 0.0;
      for (double v : tr.value) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      mj["raw_min"] = lo;
      mj["raw_max"] = hi;
      mj["raw_mean"] = sum / static_cast<double>(tr.value.size());
      if (r.phases) {
        ordered_json per_phase = ordered_json::object();
        for (avor::Phase ph : phases) {
          double s_raw = 0.0;
          double s_norm = 0.0;
          double max_norm = 0.0;
          std::size_t n = 0;
          for (std::size_t k = 0; k < tr.t.size(); ++k) {
            if (avor::phase_at(*r.phases, tr.t[k]) != ph) continue;
            s_raw += tr.value[k];
            if (norm) {
              s_norm += (*norm)[k];
              max_norm = n == 0 ? (*norm)[k] : std::max(max_norm, (*norm)[k]);
            }
            ++n;
          }
          ordered_json pj{{"frames", n}};
          if (n > 0) {
            pj["raw_mean"] = s_raw / static_cast<double>(n);
            if (norm) {
              pj["normalized_mean"] = s_norm / static_cast<double>(n);
              pj["normalized_max"] = max_norm;
            }
          }
          per_phase[avor::to_string(ph)] = std::move(pj);
        }
        mj["phases"] = std::move(per_phase);
      }
      if (!norm) mj["normalized"] = "degenerate trace";
      models[avor::to_string(tr.model)] = std::move(mj);
    }
    j["models"] = std::move(models);
    *out = dup_string(j.dump(2) + "\n");
  });
}

avor_status avor_risk_json(const avor_risk_result * result, char ** out)
{
  return guarded([&] {
    require(result != nullptr && out != nullptr, "result and out are required");
    const auto & r = *result;
    ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["population"] = avor::to_string(r.run.population);
    j["t"] = r.run.traces.front().t;
    j["phases"] = r.phases ? phases_json(*r.phases) : ordered_json(nullptr);
    ordered_json models = ordered_json::object();
    for (std::size_t m = 0; m < r.run.traces.size(); ++m) {
      models[avor::to_string(r.run.traces[m].model)] = {
        {"raw", r.run.traces[m].value},
        {"normalized", r.normalized[m] ? ordered_json(*r.normalized[m]) : ordered_json(nullptr)}};
    }
    j["models"] = std::move(models);
    *out = dup_string(j.dump());
  });
}

void avor_risk_free(avor_risk_result * result)
{
  delete result;
}

avor_status avor_evaluate(const char * const * scenario_paths, size_t count, const char * ratings_dir,
                          const avor_config * config, char ** rmse_csv, char ** onset_json)
{
  return guarded([&] {
    require(scenario_paths != nullptr && count > 0 && ratings_dir != nullptr, "scenarios and ratings_dir are required");
    require(rmse_csv != nullptr && onset_json != nullptr, "outputs are required");
    const avor::Config & cfg = config_or_default(config);
    cfg.validate();
    std::vector<avor::ScenarioTrace> scenarios;
    for (size_t k = 0; k < count; ++k) {
      require(scenario_paths[k] != nullptr, "scenario path is NULL");
      scenarios.push_back(avor::load_scenario(scenario_paths[k], cfg.kinematics));
    }
    const auto ratings = avor::load_ratings(ratings_dir);
    const auto report = avor::evaluate(scenarios, ratings, cfg.engine, cfg.eval_options());
    std::ostringstream table;
    avor::write_rmse_table(report, table);
    const std::string onset = avor::onset_summary_json(report);
    *rmse_csv = dup_string(table.str());
    try {
      *onset_json = dup_string(onset);
    } catch (...) {
      std::free(*rmse_csv);
      *rmse_csv = nullptr;
      throw;
    }
  });
}

avor_status avor_sessions_open(const char * data_dir, avor_session_store ** out)
{
  return guarded([&] {
    require(data_dir != nullptr && out != nullptr, "data_dir and out are required");
    *out = new avor_session_store(data_dir);
  });
}

void avor_sessions_free(avor_session_store * store)
{
  delete store;
}

avor_status avor_session_create(avor_session_store * store, const char * rater_id, const char * scenario_id,
                                const char * population, char ** out)
{
  return guarded([&] {
    require(store != nullptr && rater_id != nullptr && scenario_id != nullptr && population != nullptr && out != nullptr,
            "store, rater_id, scenario_id, population and out are required");
    const auto rec = store->store.create(rater_id, scenario_id, population_arg(population));
    *out = dup_string(session_json(rec));
  });
}

avor_status avor_session_submit(avor_session_store * store, const char * session_id, const char * body, char ** out)
{
  return guarded([&] {
    require(store != nullptr && session_id != nullptr && body != nullptr && out != nullptr,
            "store, session_id, body and out are required");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error & e) {
      throw avor::Error(avor::ErrorCode::parse, std::string("body is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array()) {
      throw avor::Error(avor::ErrorCode::parse, "body must be an object with a 'samples' array");
    }
    std::vector<avor::RatingSample> samples;
    for (const auto & s : j["samples"]) {
      if (!s.is_object() || !s.contains("t") || !s.contains("srr") || !s["t"].is_number() || !s["srr"].is_number()) {
        throw avor::Error(avor::ErrorCode::parse, "every sample must be {\"t\": number, \"srr\": number}");
      }
      samples.push_back({s["t"].get<double>(), s["srr"].get<double>()});
    }
    const auto rec = store->store.complete(session_id, samples);
    *out = dup_string(session_json(rec));
  });
}

avor_status avor_ratings_json(avor_session_store * store, const char * scenario_id, char ** out)
{
  return guarded([&] {
    require(store != nullptr && out != nullptr, "store and out are required");
    std::optional<std::string> filter;
    if (scenario_id != nullptr) filter = scenario_id;
    const auto ratings = store->store.ratings(filter);
    auto arr = nlohmann::json::array();
    for (const auto & r : ratings) arr.push_back(nlohmann::json::parse(avor::rating_to_json(r)));
    *out = dup_string(arr.dump());
  });
}

}  // extern "C"
