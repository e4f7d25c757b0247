#include "avor/error.hpp"
#include "avor/metrics.hpp"

#include <nlohmann/json.hpp>

namespace avor
{

namespace
{

using nlohmann::json;

[[noreturn]] void fail(const std::string & field, const std::string & what)
{
  throw Error(ErrorCode::parse, "rating: field '" + field + "' " + what);
}

std::string string_field(const json & j, const char * key)
{
  const auto it = j.find(key);
  if (it == j.end()) fail(key, "is missing");
  if (!it->is_string()) fail(key, "must be a string");
  return it->get<std::string>();
}

}  // namespace

RatingTrace parse_rating(std::string_view json_text)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error & e) {
    throw Error(ErrorCode::parse, std::string("rating: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("", "document must be an object");
  for (const auto & [key, value] : j.items()) {
    if (key != "schema" && key != "rater_id" && key != "scenario_id" && key != "population" && key != "samples" &&
        key != "session_id" && key != "started_at" && key != "completed") {
      fail(key, "is not part of the schema");
    }
  }
  if (const auto it = j.find("schema"); it != j.end() && *it != "avor-rating/1") {
    fail("schema", "must be \"avor-rating/1\"");
  }
  RatingTrace r;
  r.rater_id = string_field(j, "rater_id");
  r.scenario_id = string_field(j, "scenario_id");
  const auto pop = parse_population(string_field(j, "population"));
  if (!pop) fail("population", "must be one of O, A, A+R");
  r.population = *pop;

  const auto it = j.find("samples");
  if (it == j.end()) fail("samples", "is missing");
  if (!it->is_array()) fail("samples", "must be an array");
  for (std::size_t k = 0; k < it->size(); ++k) {
    const json & s = (*it)[k];
    const std::string where = "samples[" + std::to_string(k) + "]";
    if (!s.is_object() || s.size() != 2 || !s.contains("t") || !s.contains("srr")) {
      fail(where, "must be an object {t, srr}");
    }
    if (!s["t"].is_number() || !s["srr"].is_number()) fail(where, "t and srr must be numbers");
    r.t.push_back(s["t"].get<double>());
    r.srr.push_back(s["srr"].get<double>());
  }
  r.validate();
  return r;
}

std::string rating_to_json(const RatingTrace & rating, const std::map<std::string, std::string> & extra)
{
  json j;
  j["schema"] = "avor-rating/1";
  j["rater_id"] = rating.rater_id;
  j["scenario_id"] = rating.scenario_id;
  j["population"] = to_string(rating.population);
  for (const auto & [key, value] : extra) j[key] = value;
  json samples = json::array();
  for (std::size_t k = 0; k < rating.t.size(); ++k) {
    samples.push_back({{"t", rating.t[k]}, {"srr", rating.srr[k]}});
  }
  j["samples"] = std::move(samples);
  return j.dump(1) + "\n";
}

}  // namespace avor
