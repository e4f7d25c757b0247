#include "service.hpp"

#include "httplib.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace avor_tools
{

namespace
{

using nlohmann::json;

struct ApiError : std::runtime_error
{
  ApiError(int s, std::string c, const std::string & m) : std::runtime_error(m), status(s), code(std::move(c)) {}
  int status;
  std::string code;
};

int http_status(avor_status st)
{
  switch (st) {
    case AVOR_E_PARSE:
    case AVOR_E_FORMAT:
    case AVOR_E_VALIDATION:
    case AVOR_E_INVALID_ARGUMENT:
    case AVOR_E_REFERENCE:
    case AVOR_E_OUT_OF_RANGE: return 400;
    case AVOR_E_NOT_FOUND: return 404;
    case AVOR_E_CONFLICT: return 409;
    case AVOR_E_NO_CUTIN:
    case AVOR_E_DEGENERATE: return 422;
    default: return 500;
  }
}

void check(avor_status st)
{
  if (st != AVOR_OK) throw ApiError(http_status(st), avor_status_name(st), avor_last_error());
}

std::string take(char * s)
{
  std::string out(s != nullptr ? s : "");
  avor_string_free(s);
  return out;
}

void send_error(httplib::Response & res, int status, const std::string & code, const std::string & message)
{
  res.status = status;
  res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json");
}

json parse_body(const httplib::Request & req)
{
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw ApiError(400, "parse_error", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error & e) {
    throw ApiError(400, "parse_error", std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string string_field(const json & j, const char * key)
{
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ApiError(400, "validation_error", std::string("field '") + key + "' must be a non-empty string");
  }
  return it->get<std::string>();
}

template <class F>
httplib::Server::Handler handler(F && body)
{
  return [body = std::forward<F>(body)](const httplib::Request & req, httplib::Response & res) {
    try {
      body(req, res);
    } catch (const ApiError & e) {
      send_error(res, e.status, e.code, e.what());
    } catch (const std::exception & e) {
      send_error(res, 500, "internal_error", e.what());
    }
  };
}

}  // namespace

Service::Service(ServiceOptions options)
: options_(std::move(options)), server_(std::make_unique<httplib::Server>())
{
  std::error_code ec;
  if (!std::filesystem::is_directory(options_.scenarios_dir, ec)) {
    throw std::runtime_error("scenarios directory '" + options_.scenarios_dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto & e : std::filesystem::directory_iterator(options_.scenarios_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto & f : files) {
    avor_scenario * s = nullptr;
    if (avor_scenario_load(f.c_str(), options_.config, &s) != AVOR_OK) {
      throw std::runtime_error(f.filename().string() + ": " + avor_last_error());
    }
    std::unique_ptr<avor_scenario, ScenarioDeleter> owned(s);
    const json info = json::parse(take([&] {
      char * out = nullptr;
      avor_scenario_info_json(s, &out);
      return out;
    }()));
    scenarios_.emplace(info.at("id").get<std::string>(), std::move(owned));
  }
  if (avor_sessions_open(options_.data_dir.c_str(), &sessions_) != AVOR_OK) {
    throw std::runtime_error(avor_last_error());
  }
  // SO_REUSEPORT would let a second server share the port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

Service::~Service()
{
  stop();
  avor_sessions_free(sessions_);
}

bool Service::bind()
{
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(options_.host, options_.port)) return false;
  port_ = options_.port;
  return true;
}

void Service::listen()
{
  server_->listen_after_bind();
}

void Service::stop()
{
  if (server_) server_->stop();
}

std::string Service::risk_json(const std::string & id, const avor_scenario * scenario, unsigned models,
                               const std::string & population)
{
  const std::string key = id + "|" + std::to_string(models) + "|" + population;
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = risk_cache_.find(key); it != risk_cache_.end()) return it->second;
  }
  avor_risk_result * result = nullptr;
  check(avor_run(scenario, options_.config, models, population.empty() ? nullptr : population.c_str(), &result));
  char * out = nullptr;
  const avor_status st = avor_risk_json(result, &out);
  avor_risk_free(result);
  check(st);
  std::string body = take(out);
  std::lock_guard lock(cache_mutex_);
  risk_cache_.emplace(key, body);
  return body;
}

void Service::routes()
{
  auto & srv = *server_;

  srv.Get("/api/scenarios", handler([this](const httplib::Request &, httplib::Response & res) {
    json list = json::array();
    for (const auto & [id, s] : scenarios_) {
      char * out = nullptr;
      check(avor_scenario_info_json(s.get(), &out));
      list.push_back(json::parse(take(out)));
    }
    res.set_content(list.dump(), "application/json");
  }));

  auto find = [this](const std::string & id) -> const avor_scenario * {
    const auto it = scenarios_.find(id);
    if (it == scenarios_.end()) throw ApiError(404, "not_found", "unknown scenario '" + id + "'");
    return it->second.get();
  };

  srv.Get(R"(/api/scenarios/([^/]+)/frames)", handler([find](const httplib::Request & req, httplib::Response & res) {
    const avor_scenario * s = find(req.matches[1]);
    std::string population;
    if (req.has_param("population")) {
      population = req.get_param_value("population");
    } else {
      char * info = nullptr;
      check(avor_scenario_info_json(s, &info));
      population = json::parse(take(info)).at("population").get<std::string>();
    }
    char * out = nullptr;
    check(avor_scenario_frames_json(s, population.c_str(), &out));
    res.set_content(take(out), "application/json");
  }));

  srv.Get(R"(/api/scenarios/([^/]+)/risk)", handler([this, find](const httplib::Request & req, httplib::Response & res) {
    const std::string id = req.matches[1];
    const avor_scenario * s = find(id);
    const std::string model = req.has_param("model") ? req.get_param_value("model") : "both";
    unsigned mask = 0;
    if (model == "drf" || model == "DRF") {
      mask = AVOR_MODEL_DRF;
    } else if (model == "avor" || model == "AVOR") {
      mask = AVOR_MODEL_AVOR;
    } else if (model == "both") {
      mask = AVOR_MODEL_DRF | AVOR_MODEL_AVOR;
    } else {
      throw ApiError(400, "invalid_argument", "model must be drf, avor or both");
    }
    const std::string population = req.has_param("population") ? req.get_param_value("population") : "";
    res.set_content(risk_json(id, s, mask, population), "application/json");
  }));

  srv.Post("/api/sessions", handler([this, find](const httplib::Request & req, httplib::Response & res) {
    const json body = parse_body(req);
    const std::string rater = string_field(body, "rater_id");
    const std::string scenario = string_field(body, "scenario_id");
    const std::string population = string_field(body, "population");
    find(scenario);
    char * out = nullptr;
    check(avor_session_create(sessions_, rater.c_str(), scenario.c_str(), population.c_str(), &out));
    res.status = 201;
    res.set_content(take(out), "application/json");
  }));

  srv.Post(R"(/api/sessions/([^/]+)/ratings)", handler([this](const httplib::Request & req, httplib::Response & res) {
    const std::string id = req.matches[1];
    parse_body(req);
    char * out = nullptr;
    check(avor_session_submit(sessions_, id.c_str(), req.body.c_str(), &out));
    res.status = 201;
    res.set_content(take(out), "application/json");
  }));

  srv.Get("/api/ratings", handler([this](const httplib::Request & req, httplib::Response & res) {
    const std::string scenario = req.has_param("scenario") ? req.get_param_value("scenario") : "";
    char * out = nullptr;
    check(avor_ratings_json(sessions_, scenario.empty() ? nullptr : scenario.c_str(), &out));
    res.set_content(take(out), "application/json");
  }));

  if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir)) {
    srv.set_mount_point("/", options_.static_dir.string());
  }

  srv.set_error_handler([](const httplib::Request & req, httplib::Response & res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    } else {
      send_error(res, res.status, "http_error", "request failed with status " + std::to_string(res.status));
    }
  });
}

}  // namespace avor_tools
