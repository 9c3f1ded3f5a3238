#pragma once

// Review service: persisted sessions behind an HTTP+JSON API.
//
// SessionStore holds the logic and answers with transport-neutral
// ApiResponse values; HttpServer only maps routes onto it.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "accsams/model.hpp"
#include "accsams/pipeline.hpp"
#include "accsams/structure.hpp"

namespace accsams::service {

struct ServiceConfig {
  std::filesystem::path data_dir = "accsams-data";
  std::size_t max_upload = 16u << 20;
  std::string host = "127.0.0.1";
  int port = 8080;
  PipelineConfig pipeline;

  /// Reads ACCSAMS_DATA_DIR, ACCSAMS_MAX_UPLOAD (bytes) and ACCSAMS_BIND
  /// ("host:port" or just "port") over the defaults.
  static ServiceConfig from_env();
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Fields a reviewer can pin on a block.
inline constexpr std::string_view kPinnableFields[] = {"category", "text", "alt_text", "is_solution"};

struct Session {
  std::string id;
  ExamDocument document;
  DocTree tree;
  long long version = 0;
  std::set<std::pair<std::string, std::string>> pins;
  bool hierarchy_pinned = false;
  std::string created;
  std::string updated;
};

/// Serialized session state, as returned by GET /api/documents/{id} and
/// stored in state.json.
std::string session_to_json(const Session& s);
/// Inverse of session_to_json(). Throws SyntaxError or SchemaError.
Session session_from_json(std::string_view bytes);

class SessionStore {
 public:
  /// Loads every session found under cfg.data_dir.
  explicit SessionStore(ServiceConfig cfg);

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  ApiResponse create(std::string_view block_file);
  ApiResponse list() const;
  ApiResponse get(const std::string& id) const;
  ApiResponse patch_block(const std::string& id, const std::string& block_id, std::string_view body);
  ApiResponse put_hierarchy(const std::string& id, std::string_view body);
  ApiResponse recompute(const std::string& id, std::string_view body);
  ApiResponse export_session(const std::string& id, std::string_view body) const;
  ApiResponse page_image(const std::string& id, int page) const;

  /// Current state of a session, or nullopt.
  std::optional<Session> snapshot(const std::string& id) const;
  /// Rebuilds a session by replaying its append-only log.
  Session replay(const std::string& id) const;

  const ServiceConfig& config() const { return cfg_; }

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    Session session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  std::filesystem::path session_dir(const std::string& id) const;
  void persist(const Session& s, const std::string& log_line) const;

  ServiceConfig cfg_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

/// Minimal ustar archive of (name, content) pairs; deterministic (mtime 0).
std::string make_tar(const std::vector<std::pair<std::string, std::string>>& files);

class HttpServer {
 public:
  explicit HttpServer(SessionStore& store);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port; throws Error when binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace accsams::service
