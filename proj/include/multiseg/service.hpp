#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "multiseg/anomaly.hpp"
#include "multiseg/segment_tree.hpp"

namespace multiseg {

struct ServiceConfig {
  std::string bind_host = "127.0.0.1";
  int port = 8080;
  std::size_t max_upload_bytes = 256u << 20;
  std::size_t workers = 4;
  /// Append log of mutating requests, replayed on start when set.
  std::optional<std::string> snapshot_path;

  /// MULTISEG_BIND (host[:port]), MULTISEG_MAX_UPLOAD_BYTES, MULTISEG_WORKERS, MULTISEG_SNAPSHOT.
  static ServiceConfig from_env();
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// HTTP status for an error code (400, 404, 409, 413).
int http_status(ErrorCode code) noexcept;

enum class ForwardTarget { temporal, geographic };

/// Session store and the operations behind every route. Every method throws
/// Error; `handle` turns errors into JSON `{code, message, location}` bodies.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceConfig& config() const noexcept { return config_; }

  std::string create_session();
  nlohmann::json session_summary(const std::string& session) const;
  nlohmann::json upload_series(const std::string& session, const std::string& name,
                               std::string_view csv);
  nlohmann::json list_series(const std::string& session) const;
  /// Evaluates and installs the tree; returns the tree JSON.
  nlohmann::json run_query(const std::string& session, const std::string& series,
                           std::string_view query_json);
  nlohmann::json get_tree(const std::string& session, const std::string& series) const;
  nlohmann::json sibling_similarity(const std::string& session, const std::string& series,
                                    const std::string& node,
                                    const std::vector<std::string>& dimensions) const;
  nlohmann::json forward_segment(const std::string& session, const std::string& series,
                                 const std::string& node, ForwardTarget target);
  nlohmann::json forwarded(const std::string& session) const;
  nlohmann::json detail(const std::string& session, const std::string& series,
                        const std::string& node, const std::set<Detector>& detectors,
                        const std::optional<std::string>& dimension,
                        const DetectorParams& params) const;
  nlohmann::json set_bookmark(const std::string& session, const std::string& series,
                              const std::string& node, bool flag);
  nlohmann::json label_node(const std::string& session, const std::string& series,
                            const std::string& node, const std::string& text);
  /// kind: tree_csv or query_json. Errors: NoTree when nothing was evaluated yet.
  std::string export_data(const std::string& session, const std::string& series,
                          const std::string& kind, std::string* content_type = nullptr) const;
  nlohmann::json progress(const std::string& session, const std::string& series) const;
  void cancel(const std::string& session, const std::string& series);

  /// Routes one request; never throws.
  HttpResponse handle(const HttpRequest& request);

  struct Session;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  void log(const nlohmann::json& entry);
  void replay(const std::string& path);

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex log_mutex_;
  bool replaying_ = false;
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  /// Binds (port 0 picks a free port) and serves on a background thread; returns the port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace multiseg
