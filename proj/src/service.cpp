#include "learnpath/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "learnpath/corpus.hpp"
#include "learnpath/errors.hpp"

namespace learnpath {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::size_t kMaxSuggestions = 5;

std::size_t common_prefix(std::string_view a, std::string_view b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

// Terms sharing the longest prefix with `term`, best first.
std::vector<std::string> suggestions_for(const FPGraph& graph, std::string_view term) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& [name, node] : graph.nodes()) {
    if (name == kRootTerm) continue;
    const std::size_t shared = common_prefix(name, term);
    if (shared > 0) scored.emplace_back(shared, name);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < kMaxSuggestions; ++i) out.push_back(scored[i].second);
  return out;
}

HttpResult bad_request(std::string_view detail) { return {400, error_body("bad_request", detail)}; }

HttpResult no_graph() { return {409, error_body("no_graph", "no graph has been loaded")}; }

std::optional<std::string> term_field(const json& request, const char* name) {
  if (!request.is_object() || !request.contains(name) || !request[name].is_string()) return std::nullopt;
  return request[name].get<std::string>();
}

KnownSet known_field(const json& request) {
  KnownSet known;
  if (!request.is_object() || !request.contains("known")) return known;
  const json& arr = request["known"];
  if (!arr.is_array()) throw Error(Errc::kParse, "\"known\" must be an array of terms");
  for (const auto& item : arr) {
    if (!item.is_string()) throw Error(Errc::kParse, "\"known\" must be an array of terms");
    known.insert(normalize_term(item.get<std::string>()));
  }
  return known;
}

HttpResult from_error(const Error& e) {
  switch (e.code()) {
    case Errc::kNotFound:
      return {404, error_body(errc_name(e.code()), e.what())};
    case Errc::kNoPath: {
      HttpResult r{409, error_body(errc_name(e.code()), e.what())};
      r.body["frontier"] = static_cast<const NoPathError&>(e).frontier();
      return r;
    }
    default:
      return {400, error_body(errc_name(e.code()), e.what())};
  }
}

void send(httplib::Response& res, const HttpResult& result) {
  res.status = result.status;
  res.set_content(result.body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    send(res, bad_request(std::string("request body is not valid JSON: ") + e.what()));
    return std::nullopt;
  }
}

}  // namespace

json error_body(std::string_view code, std::string_view detail) {
  return {{"error", std::string(code)}, {"detail", std::string(detail)}};
}

ServiceConfig load_service_config(const std::string& config_path) {
  ServiceConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error(Errc::kIo, "cannot read config file '" + config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(Errc::kParse, config_path + ": " + e.what());
    }
    try {
      if (doc.contains("host")) config.host = doc["host"].get<std::string>();
      if (doc.contains("port")) config.port = doc["port"].get<int>();
      if (doc.contains("graph_path")) config.graph_path = doc["graph_path"].get<std::string>();
      if (doc.contains("session_dir")) config.session_dir = doc["session_dir"].get<std::string>();
    } catch (const json::exception& e) {
      throw Error(Errc::kParse, config_path + ": " + e.what());
    }
    if (doc.contains("params")) config.defaults = merge_params(config.defaults, doc["params"]);
  }
  if (const char* port = std::getenv("SERVICE_PORT"); port != nullptr && *port != '\0') {
    try {
      config.port = std::stoi(port);
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidParameter, std::string("SERVICE_PORT is not a number: ") + port);
    }
  }
  if (const char* path = std::getenv("GRAPH_PATH"); path != nullptr && *path != '\0') config.graph_path = path;
  return config;
}

json to_json(const Session& s) {
  json history = json::array();
  for (const auto& [term, path] : s.history) history.push_back({{"query", term}, {"path", path}});
  return {{"id", s.id},
          {"graph_version", s.graph_version},
          {"known", std::vector<std::string>(s.known_terms.begin(), s.known_terms.end())},
          {"history", std::move(history)}};
}

Session session_from_json(const json& doc) {
  Session s;
  s.id = doc.at("id").get<std::string>();
  s.graph_version = doc.at("graph_version").get<std::uint64_t>();
  for (const auto& k : doc.at("known")) s.known_terms.insert(k.get<std::string>());
  for (const auto& h : doc.at("history")) s.history.emplace_back(h.at("query").get<std::string>(), h.at("path"));
  return s;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  config_.defaults.validate();
  if (config_.session_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(config_.session_dir, ec);
  for (const auto& entry : fs::directory_iterator(config_.session_dir, ec)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    try {
      auto slot = std::make_unique<SessionSlot>();
      slot->session = session_from_json(json::parse(in));
      const auto id = slot->session.id;
      sessions_.emplace(id, std::move(slot));
    } catch (const std::exception&) {
      // Unreadable session files are left on disk and skipped.
    }
  }
}

Service::~Service() = default;

std::pair<std::shared_ptr<const FPGraph>, std::uint64_t> Service::current() const {
  std::shared_lock lock(graph_mutex_);
  return {graph_, version_};
}

void Service::publish(std::shared_ptr<const FPGraph> graph) {
  std::unique_lock lock(graph_mutex_);
  graph_ = std::move(graph);
  ++version_;
}

std::uint64_t Service::version() const { return current().second; }

HttpResult Service::load_graph(const json& snapshot) {
  std::lock_guard writer(writer_mutex_);
  try {
    auto graph = std::make_shared<const FPGraph>(FPGraph::restore(snapshot));
    publish(std::move(graph));
  } catch (const Error& e) {
    return {400, error_body(errc_name(e.code()), e.what())};
  }
  return {200, {{"version", version()}}};
}

HttpResult Service::load_graph_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    return {400, error_body("validation_error", std::string("snapshot is not valid JSON: ") + e.what())};
  }
  return load_graph(doc);
}

HttpResult Service::get_graph() const {
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  return {200, graph->snapshot()};
}

HttpResult Service::list_terms() const {
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  std::map<std::string_view, std::size_t> out_degree;
  for (const auto& [key, edge] : graph->edges()) ++out_degree[edge.from];
  json terms = json::array();
  for (const auto& [term, node] : graph->nodes()) {
    terms.push_back({{"term", term},
                     {"data_list_size", node.data_list.size()},
                     {"in_degree", graph->predecessors(term).size()},
                     {"out_degree", out_degree[term]}});
  }
  return {200, {{"version", version}, {"count", terms.size()}, {"terms", std::move(terms)}}};
}

HttpResult Service::run_query(const std::shared_ptr<const FPGraph>& graph, std::uint64_t version,
                              const std::string& term, const KnownSet& known, const json& request) {
  json overrides = json::object();
  if (request.contains("params")) {
    if (!request["params"].is_object()) return bad_request("\"params\" must be an object");
    overrides = request["params"];
  }
  if (request.contains("seed")) overrides["seed"] = request["seed"];
  if (!overrides.contains("seed")) {
    std::random_device rd;
    overrides["seed"] = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  if (known.contains(term)) return {400, error_body("already_known", "'" + term + "' is marked known")};
  try {
    const ACOParams params = merge_params(config_.defaults, overrides);
    const auto run = run_learning_path(*graph, term, known, params);
    json body = to_json(run.result);
    body["seed"] = params.seed;
    body["version"] = version;
    body["known"] = std::vector<std::string>(known.begin(), known.end());
    return {200, std::move(body)};
  } catch (const Error& e) {
    HttpResult r = from_error(e);
    if (e.code() == Errc::kNotFound) r.body["suggestions"] = suggestions_for(*graph, term);
    r.body["version"] = version;
    return r;
  }
}

HttpResult Service::query(const json& request) {
  const auto raw = term_field(request, "term");
  if (!raw) return bad_request("request needs a string \"term\"");
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  std::string term;
  KnownSet known;
  try {
    term = normalize_term(*raw);
    known = known_field(request);
  } catch (const Error& e) {
    return from_error(e);
  }

  if (!request.contains("session")) return run_query(graph, version, term, known, request);

  if (!request["session"].is_string()) return bad_request("\"session\" must be a string id");
  SessionSlot* slot = find_session(request["session"].get<std::string>());
  if (slot == nullptr) return {404, error_body("not_found", "unknown session")};
  std::lock_guard lock(slot->mutex);
  known.insert(slot->session.known_terms.begin(), slot->session.known_terms.end());
  HttpResult result = run_query(graph, version, term, known, request);
  if (result.status == 200) {
    slot->session.graph_version = version;
    slot->session.history.emplace_back(term, result.body);
    result.body["session"] = slot->session.id;
    persist(slot->session);
  }
  return result;
}

HttpResult Service::apply_transactions(std::string_view qa_log) {
  std::vector<Transaction> txns;
  try {
    txns = parse_qa_log(qa_log);
  } catch (const Error& e) {
    return bad_request(e.what());
  }
  std::lock_guard writer(writer_mutex_);
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  json report = {{"applied", txns.size()}, {"matched", 0}, {"unmatched", 0}, {"unknown_target", 0}};
  if (txns.empty()) {
    report["version"] = version;
    report["results"] = json::array();
    report["promoted"] = json::array();
    return {200, std::move(report)};
  }

  auto next = std::make_shared<FPGraph>(*graph);
  json results = json::array();
  for (const auto& txn : txns) {
    const MatchReport m = next->apply_qa_transaction(txn);
    const std::size_t matched_len = m.status == MatchStatus::kFull || m.status == MatchStatus::kSuffix
                                        ? txn.prerequisites.size() + 1 - m.suffix_start
                                        : 0;
    results.push_back({{"question", txn.target},
                       {"status", match_status_name(m.status)},
                       {"matched_length", matched_len},
                       {"credited_edges", m.credited_edges}});
    switch (m.status) {
      case MatchStatus::kFull:
      case MatchStatus::kSuffix:
        report["matched"] = report["matched"].get<int>() + 1;
        break;
      case MatchStatus::kUnmatched:
        report["unmatched"] = report["unmatched"].get<int>() + 1;
        break;
      case MatchStatus::kUnknownTarget:
        report["unknown_target"] = report["unknown_target"].get<int>() + 1;
        break;
    }
  }
  json promoted = json::array();
  for (const auto& key : next->promote_associations()) promoted.push_back({{"from", key.from}, {"to", key.to}});
  publish(std::move(next));
  report["results"] = std::move(results);
  report["promoted"] = std::move(promoted);
  report["version"] = version + 1;
  return {200, std::move(report)};
}

std::string Service::new_session_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream id;
  id << std::hex << rng() << '-' << ++session_counter_;
  return id.str();
}

HttpResult Service::create_session(const json& request) {
  KnownSet known;
  try {
    known = known_field(request);
  } catch (const Error& e) {
    return from_error(e);
  }
  auto slot = std::make_unique<SessionSlot>();
  slot->session.known_terms = std::move(known);
  slot->session.graph_version = version();
  std::lock_guard lock(sessions_mutex_);
  slot->session.id = new_session_id();
  json body = to_json(slot->session);
  persist(slot->session);
  sessions_.emplace(slot->session.id, std::move(slot));
  return {201, std::move(body)};
}

Service::SessionSlot* Service::find_session(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

HttpResult Service::get_session(const std::string& id) const {
  SessionSlot* slot = find_session(id);
  if (slot == nullptr) return {404, error_body("not_found", "unknown session")};
  std::lock_guard lock(slot->mutex);
  return {200, to_json(slot->session)};
}

HttpResult Service::drilldown(const std::string& id, const json& request) {
  SessionSlot* slot = find_session(id);
  if (slot == nullptr) return {404, error_body("not_found", "unknown session")};
  const auto raw = term_field(request, "term");
  if (!raw) return bad_request("request needs a string \"term\"");
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  std::string term;
  try {
    term = normalize_term(*raw);
  } catch (const Error& e) {
    return from_error(e);
  }

  std::lock_guard lock(slot->mutex);
  Session& s = slot->session;
  if (s.history.empty()) return {422, error_body("not_in_last_path", "session has no path to drill into yet")};
  const json& recommended = s.history.back().second.at("recommended");
  if (std::find(recommended.begin(), recommended.end(), term) == recommended.end()) {
    return {422, error_body("not_in_last_path", "'" + term + "' is not in the last recommended path")};
  }
  if (s.known_terms.contains(term)) return {422, error_body("already_known", "'" + term + "' is marked known")};

  HttpResult result = run_query(graph, version, term, s.known_terms, request);
  if (result.status != 200) return result;
  s.graph_version = version;
  s.history.emplace_back(term, result.body);
  persist(s);
  return {200, {{"session", to_json(s)}, {"path", result.body}}};
}

HttpResult Service::mark_known(const std::string& id, const json& request) {
  SessionSlot* slot = find_session(id);
  if (slot == nullptr) return {404, error_body("not_found", "unknown session")};
  const auto raw = term_field(request, "term");
  if (!raw) return bad_request("request needs a string \"term\"");
  if (*raw == kRootTerm) return bad_request("Root is always terminal and cannot be marked known");
  const auto [graph, version] = current();
  if (!graph) return no_graph();
  std::string term;
  try {
    term = normalize_term(*raw);
  } catch (const Error& e) {
    return from_error(e);
  }
  if (!graph->contains(term)) {
    HttpResult r{404, error_body("not_found", "unknown term '" + term + "'")};
    r.body["suggestions"] = suggestions_for(*graph, term);
    return r;
  }
  std::lock_guard lock(slot->mutex);
  slot->session.known_terms.insert(term);
  persist(slot->session);
  return {200, to_json(slot->session)};
}

void Service::persist(const Session& session) const {
  if (config_.session_dir.empty()) return;
  const fs::path path = fs::path(config_.session_dir) / (session.id + ".json");
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << to_json(session).dump(2) << '\n';
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
}

void Service::mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Post("/graph", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, load_graph_text(req.body));
  });
  server.Get("/graph", [this](const httplib::Request&, httplib::Response& res) {
    const auto result = get_graph();
    send(res, result);
    if (result.status == 200) res.set_header("X-Graph-Version", std::to_string(version()));
  });
  server.Get("/terms", [this](const httplib::Request&, httplib::Response& res) { send(res, list_terms()); });
  server.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, query(*body));
  });
  server.Post("/transactions", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, apply_transactions(req.body));
  });
  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, create_session(*body));
  });
  server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_session(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/drilldown)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, drilldown(req.matches[1], *body));
  });
  server.Post(R"(/sessions/([^/]+)/known)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, mark_known(req.matches[1], *body));
  });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  // httplib defaults to SO_REUSEPORT, which would let a second process share
  // an occupied port silently. SO_REUSEADDR alone still allows quick restarts.
  server.set_socket_options([](auto sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (!server.bind_to_port(host, port)) return false;
  return server.listen_after_bind();
}

}  // namespace learnpath
