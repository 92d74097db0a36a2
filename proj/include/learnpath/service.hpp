#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "learnpath/aco.hpp"
#include "learnpath/fp_graph.hpp"

namespace httplib {
class Server;
}

namespace learnpath {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string graph_path;
  // Empty keeps sessions in memory only.
  std::string session_dir;
  ACOParams defaults;
};

// Reads an optional JSON config file, then applies SERVICE_PORT and
// GRAPH_PATH from the environment.
ServiceConfig load_service_config(const std::string& config_path);

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

nlohmann::json error_body(std::string_view code, std::string_view detail);

struct Session {
  std::string id;
  std::uint64_t graph_version = 0;
  KnownSet known_terms;
  // (query, served path document) in the order served.
  std::vector<std::pair<std::string, nlohmann::json>> history;
};

nlohmann::json to_json(const Session& session);
Session session_from_json(const nlohmann::json& doc);

// Request handlers behind the HTTP routes. Each returns the status and JSON
// body the route sends, so they can be exercised without a socket.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  HttpResult load_graph(const nlohmann::json& snapshot);
  HttpResult load_graph_text(std::string_view text);
  HttpResult get_graph() const;
  HttpResult list_terms() const;
  HttpResult query(const nlohmann::json& request);
  HttpResult apply_transactions(std::string_view qa_log);
  HttpResult create_session(const nlohmann::json& request);
  HttpResult get_session(const std::string& id) const;
  HttpResult drilldown(const std::string& id, const nlohmann::json& request);
  HttpResult mark_known(const std::string& id, const nlohmann::json& request);

  std::uint64_t version() const;
  const ServiceConfig& config() const noexcept { return config_; }

  void mount(httplib::Server& server);

 private:
  struct SessionSlot {
    std::mutex mutex;
    Session session;
  };

  std::pair<std::shared_ptr<const FPGraph>, std::uint64_t> current() const;
  void publish(std::shared_ptr<const FPGraph> graph);
  SessionSlot* find_session(const std::string& id) const;
  void persist(const Session& session) const;
  HttpResult run_query(const std::shared_ptr<const FPGraph>& graph, std::uint64_t version, const std::string& term,
                       const KnownSet& known, const nlohmann::json& request);
  std::string new_session_id();

  ServiceConfig config_;

  mutable std::shared_mutex graph_mutex_;
  std::shared_ptr<const FPGraph> graph_;
  std::uint64_t version_ = 0;
  std::mutex writer_mutex_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<SessionSlot>> sessions_;
  std::uint64_t session_counter_ = 0;
};

// Binds and serves until stopped. Returns false if the port cannot be bound.
bool serve(Service& service, const std::string& host, int port);

}  // namespace learnpath
