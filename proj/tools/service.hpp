#pragma once

#include "avor/avor.h"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib
{
class Server;
}

namespace avor_tools
{

struct ServiceOptions
{
  std::string host{"127.0.0.1"};
  int port{8080};  // 0 picks a free port
  std::filesystem::path scenarios_dir;
  std::filesystem::path data_dir;
  std::filesystem::path static_dir;  // optional UI bundle
  const avor_config * config{nullptr};
};

/// HTTP front end for scenario playback and rating collection.
class Service
{
public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service &) = delete;
  Service & operator=(const Service &) = delete;

  /// Binds the listening socket; false when the port is unavailable.
  bool bind();
  int port() const { return port_; }
  /// Blocks until stop().
  void listen();
  void stop();
  std::size_t scenario_count() const { return scenarios_.size(); }

private:
  struct ScenarioDeleter
  {
    void operator()(avor_scenario * s) const { avor_scenario_free(s); }
  };

  void routes();
  std::string risk_json(const std::string & id, const avor_scenario * scenario, unsigned models,
                        const std::string & population);

  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::map<std::string, std::unique_ptr<avor_scenario, ScenarioDeleter>> scenarios_;
  avor_session_store * sessions_{nullptr};
  std::mutex cache_mutex_;
  std::map<std::string, std::string> risk_cache_;
  int port_{0};
};

}  // namespace avor_tools
