// avor command line: run, eval, characterize, serve.
#include "avor/avor.h"
#include "service.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace
{

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code(avor_status st)
{
  return st == AVOR_E_IO ? kExitIo : kExitValidation;
}

int report(avor_status st, const std::string & context)
{
  std::cerr << "avor: " << context << ": " << avor_last_error() << " [" << avor_status_name(st) << "]\n";
  return exit_code(st);
}

struct ConfigDeleter
{
  void operator()(avor_config * c) const { avor_config_free(c); }
};
using ConfigPtr = std::unique_ptr<avor_config, ConfigDeleter>;

struct ScenarioDeleter
{
  void operator()(avor_scenario * s) const { avor_scenario_free(s); }
};
using ScenarioPtr = std::unique_ptr<avor_scenario, ScenarioDeleter>;

std::string take(char * s)
{
  std::string out(s != nullptr ? s : "");
  avor_string_free(s);
  return out;
}

bool write_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  return static_cast<bool>(f);
}

std::string fixed(double v, int digits)
{
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// Sibling file next to `out` with the extension replaced by `suffix`.
std::filesystem::path sibling(const std::filesystem::path & out, const std::string & suffix)
{
  std::filesystem::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

avor_tools::Service * g_service = nullptr;

void on_signal(int)
{
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Perceived-risk engine for cut-in scenarios"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "TOML-style configuration file");
  app.add_option("--out", out_path, "Output file");
  app.add_option("--set", overrides, "Override a configuration key, e.g. --set grid.res=0.125");

  auto * run = app.add_subcommand("run", "Evaluate risk models on a scenario and write the risk CSV");
  std::string run_scenario;
  std::string models = "drf,avor";
  std::string run_population;
  run->add_option("scenario", run_scenario, "Scenario JSON")->required();
  run->add_option("--models", models, "Comma separated models: drf, avor")->capture_default_str();
  run->add_option("--population", run_population, "Population override: O, A or A+R");

  auto * eval = app.add_subcommand("eval", "Score the models against stored ratings (RMSE table and onset summary)");
  std::vector<std::string> eval_scenarios;
  std::string ratings_dir;
  eval->add_option("scenarios", eval_scenarios, "Scenario JSON files")->required();
  eval->add_option("--ratings", ratings_dir, "Directory of avor-rating/1 files")->required();

  auto * characterize = app.add_subcommand("characterize", "Print cut-in phases and kinematic characteristics");
  std::vector<std::string> char_scenarios;
  characterize->add_option("scenarios", char_scenarios, "Scenario JSON files")->required();

  auto * serve = app.add_subcommand("serve", "Serve scenarios and collect ratings over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string scenarios_dir;
  std::string data_dir;
  std::string static_dir;
  serve->add_option("--port", port, "Listening port")->capture_default_str();
  serve->add_option("--host", host, "Listening address")->capture_default_str();
  serve->add_option("--scenarios", scenarios_dir, "Directory of scenario files")->required();
  serve->add_option("--data", data_dir, "Directory for rating files")->required();
  serve->add_option("--static", static_dir, "Directory of the rating UI bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  avor_config * raw_config = nullptr;
  avor_status st = config_path.empty() ? avor_config_new(&raw_config) : avor_config_load(config_path.c_str(), &raw_config);
  if (st != AVOR_OK) return report(st, "config");
  ConfigPtr config(raw_config);
  if ((st = avor_config_apply_env(config.get())) != AVOR_OK) return report(st, "environment");
  for (const auto & o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      std::cerr << "avor: --set expects key=value, got '" << o << "'\n";
      return kExitValidation;
    }
    if ((st = avor_config_set(config.get(), o.substr(0, eq).c_str(), o.substr(eq + 1).c_str())) != AVOR_OK) {
      return report(st, "--set " + o);
    }
  }

  if (*run) {
    unsigned mask = 0;
    std::stringstream list(models);
    for (std::string m; std::getline(list, m, ',');) {
      if (m == "drf") {
        mask |= AVOR_MODEL_DRF;
      } else if (m == "avor") {
        mask |= AVOR_MODEL_AVOR;
      } else {
        std::cerr << "avor: unknown model '" << m << "' (expected drf or avor)\n";
        return kExitValidation;
      }
    }
    avor_scenario * s = nullptr;
    if ((st = avor_scenario_load(run_scenario.c_str(), config.get(), &s)) != AVOR_OK) return report(st, run_scenario);
    ScenarioPtr scenario(s);
    avor_risk_result * r = nullptr;
    st = avor_run(scenario.get(), config.get(), mask, run_population.empty() ? nullptr : run_population.c_str(), &r);
    if (st != AVOR_OK) return report(st, run_scenario);
    char * csv = nullptr;
    char * summary = nullptr;
    st = avor_risk_csv(r, &csv);
    if (st == AVOR_OK) st = avor_risk_summary_json(r, &summary);
    avor_risk_free(r);
    const std::string csv_text = take(csv);
    const std::string summary_text = take(summary);
    if (st != AVOR_OK) return report(st, run_scenario);
    if (out_path.empty()) {
      std::cout << csv_text;
      return 0;
    }
    const auto summary_path = sibling(out_path, ".summary.json");
    if (!write_file(out_path, csv_text) || !write_file(summary_path, summary_text)) {
      std::cerr << "avor: cannot write '" << out_path << "'\n";
      return kExitIo;
    }
    return 0;
  }

  if (*eval) {
    std::vector<const char *> paths;
    for (const auto & p : eval_scenarios) paths.push_back(p.c_str());
    char * table = nullptr;
    char * onset = nullptr;
    st = avor_evaluate(paths.data(), paths.size(), ratings_dir.c_str(), config.get(), &table, &onset);
    if (st != AVOR_OK) return report(st, "eval");
    const std::string table_text = take(table);
    const std::string onset_text = take(onset);
    const auto summary = nlohmann::json::parse(onset_text);
    if (out_path.empty()) {
      std::cout << table_text;
    } else if (!write_file(out_path, table_text) || !write_file(sibling(out_path, ".onset.json"), onset_text)) {
      std::cerr << "avor: cannot write '" << out_path << "'\n";
      return kExitIo;
    }
    std::cout << "onset fraction " << fixed(summary["fraction"].get<double>(), 2) << " (" << summary["positive"]
              << " of " << summary["total"] << " ratings, threshold " << summary["threshold"] << ")\n";
    return 0;
  }

  if (*characterize) {
    std::ostringstream out;
    out << "scenario,duration_s,v_lat_avg_mps,v_lat_max_mps,a_lat_avg_mps2,initial_distance_m,t_I,t_II,t_III,t_III_end\n";
    for (const auto & path : char_scenarios) {
      avor_scenario * s = nullptr;
      if ((st = avor_scenario_load(path.c_str(), config.get(), &s)) != AVOR_OK) return report(st, path);
      ScenarioPtr scenario(s);
      avor_phases ph{};
      avor_cutin_stats c{};
      if ((st = avor_characterize(scenario.get(), config.get(), &ph, &c)) != AVOR_OK) return report(st, path);
      const auto info = nlohmann::json::parse(take([&] {
        char * o = nullptr;
        avor_scenario_info_json(scenario.get(), &o);
        return o;
      }()));
      out << info["id"].get<std::string>() << ',' << fixed(c.duration, 2) << ',' << fixed(c.v_lat_avg, 4) << ','
          << fixed(c.v_lat_max, 4) << ',' << fixed(c.a_lat_avg, 4) << ',' << fixed(c.initial_cutin_distance, 2)
          << ',' << fixed(ph.t_I_start, 2) << ',' << fixed(ph.t_II_start, 2) << ',' << fixed(ph.t_III_start, 2)
          << ',' << fixed(ph.t_III_end, 2) << '\n';
    }
    if (out_path.empty()) {
      std::cout << out.str();
    } else if (!write_file(out_path, out.str())) {
      std::cerr << "avor: cannot write '" << out_path << "'\n";
      return kExitIo;
    }
    return 0;
  }

  if (*serve) {
    avor_tools::ServiceOptions opts;
    opts.host = host;
    opts.port = port;
    opts.scenarios_dir = scenarios_dir;
    opts.data_dir = data_dir;
    opts.static_dir = static_dir;
    opts.config = config.get();
    std::unique_ptr<avor_tools::Service> service;
    try {
      service = std::make_unique<avor_tools::Service>(opts);
    } catch (const std::exception & e) {
      std::cerr << "avor: serve: " << e.what() << '\n';
      return kExitIo;
    }
    if (!service->bind()) {
      std::cerr << "avor: serve: cannot listen on " << host << ':' << port << " (port busy?)\n";
      return kExitValidation;
    }
    g_service = service.get();
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "avor: serving " << service->scenario_count() << " scenarios on http://" << host << ':'
              << service->port() << '\n';
    service->listen();
    g_service = nullptr;
    return 0;
  }
  return kExitValidation;
}
