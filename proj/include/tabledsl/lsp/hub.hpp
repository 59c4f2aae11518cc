// Language server that answers completions on DSL lines itself and
// hands everything else to an optional downstream server.

#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tabledsl/config.hpp"
#include "tabledsl/lsp/document_store.hpp"
#include "tabledsl/lsp/downstream.hpp"
#include "tabledsl/lsp/framing.hpp"
#include "tabledsl/result.hpp"

namespace tabledsl::lsp {

using json = nlohmann::json;

namespace error_code {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
inline constexpr int kServerNotInitialized = -32002;
}  // namespace error_code

enum class Route { LocalDsl, Downstream, Both, Unhandled };
std::string_view to_string(Route route);

struct RpcError {
  int code = error_code::kInternalError;
  std::string message;
};

/// Where a client message goes. Lifecycle requests are local; document
/// sync goes to both sides; a completion is local on a DSL line. Anything
/// else goes downstream when one is configured.
Result<Route, RpcError> dispatch(const json& message, const DocumentStore& store,
                                 const config::HubConfig& config);

/// Target chosen by the nearest `target_code` line above `line_no`.
ast::Target target_state(const DocumentStore& store, const std::string& uri,
                         std::size_t line_no, const config::HubConfig& config);

/// Diagnostics for the DSL lines of a document, as LSP Diagnostic objects.
json dsl_diagnostics(const Document& doc, const config::HubConfig& config);

/// LSP completion result for a position in a document.
json completion_result(const Document& doc, const std::string& uri, std::size_t line,
                       std::size_t character, const DocumentStore& store,
                       const config::HubConfig& config);

class Hub {
 public:
  using Sink = std::function<void(const std::string& body)>;
  using DownstreamFactory = std::function<std::unique_ptr<Downstream>(const std::string& command)>;

  /// `to_client` is called with complete message bodies, never concurrently.
  Hub(config::HubConfig config, Sink to_client, DownstreamFactory factory = {});
  ~Hub();
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  /// Processes one message from the client. Returns false after `exit`.
  bool handle(std::string_view body);

  /// 0 when `exit` followed `shutdown`, 1 otherwise.
  int exit_code() const { return shutdown_requested_ ? 0 : 1; }
  const DocumentStore& documents() const { return store_; }
  bool downstream_running() const;

 private:
  enum class DownstreamState { NotStarted, Ready, Dead };

  void send(const json& message);
  void send_raw(const std::string& body);
  void reply(const json& id, json result);
  void reply_error(const json& id, int code, std::string message);

  void handle_request(const json& msg, std::string_view body);
  void handle_notification(const json& msg, std::string_view body);
  void on_initialize(const json& id, const json& params);
  void on_shutdown(const json& id);
  void on_completion(const json& id, const json& params);
  void on_sync(const std::string& method, const json& params);
  void publish(const std::string& uri);

  config::HubConfig effective_config() const;
  bool ensure_downstream();
  bool forward(std::string_view body);
  void on_downstream_message(std::string body);
  void on_downstream_exit();
  void stop_downstream();

  config::HubConfig config_;
  Sink sink_;
  DownstreamFactory factory_;
  DocumentStore store_;
  json init_params_ = json::object();
  bool initialized_ = false;
  bool shutdown_requested_ = false;

  std::mutex sink_mu_;

  // Shared with the downstream relay thread.
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::unique_ptr<Downstream> downstream_;
  DownstreamState ds_state_ = DownstreamState::NotStarted;
  bool ds_stopping_ = false;
  std::set<std::string> internal_replies_;
  std::set<std::string> pending_;  ///< Dumped ids of requests forwarded downstream.
  std::map<std::string, json> dsl_diags_;
  std::map<std::string, json> ds_diags_;
  std::map<std::string, std::int64_t> versions_;
};

/// Reads framed messages from `in` until `exit` or end of input and
/// writes replies to `out_fd`. Returns the process exit code.
int serve(const config::HubConfig& config, ByteSource& in, int out_fd);

}  // namespace tabledsl::lsp
