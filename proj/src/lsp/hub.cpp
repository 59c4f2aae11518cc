#include "tabledsl/lsp/hub.hpp"

#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>

#include "tabledsl/codegen.hpp"
#include "tabledsl/completion.hpp"
#include "tabledsl/parser.hpp"
#include "tabledsl/transpile.hpp"

namespace tabledsl::lsp {
namespace {

constexpr std::string_view kServerVersion = "0.1.0";
constexpr auto kInitTimeout = std::chrono::seconds(10);
constexpr auto kShutdownTimeout = std::chrono::seconds(5);
const std::string kInitId = "tabledsl:init";
const std::string kShutdownId = "tabledsl:shutdown";

// LSP CompletionItemKind values.
constexpr int kKindText = 1;
constexpr int kKindVariable = 6;
constexpr int kKindKeyword = 14;
constexpr int kKindSnippet = 15;
constexpr int kKindOperator = 24;

void log(std::string_view level, std::string_view text) {
  std::cerr << "tabledsl [" << level << "] " << text << std::endl;
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json position(std::size_t line, std::size_t character) {
  return {{"line", line}, {"character", character}};
}

json range(std::size_t line, std::size_t begin, std::size_t end) {
  return {{"start", position(line, begin)}, {"end", position(line, end)}};
}

json edit(json rng, std::string text) { return {{"range", std::move(rng)}, {"newText", std::move(text)}}; }

std::string_view without_cr(std::string_view line) {
  if (line.ends_with('\r')) line.remove_suffix(1);
  return line;
}

std::optional<std::size_t> index_field(const json& obj, const char* key) {
  if (!obj.is_object()) return std::nullopt;
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) return std::nullopt;
  return it->get<std::size_t>();
}

std::optional<ast::Target> target_option(const ast::DslLine& line) {
  if (line.chain.size() != 1) return std::nullopt;
  if (const auto* opt = std::get_if<ast::op::TargetOption>(&line.chain.front())) return opt->target;
  return std::nullopt;
}

bool is_sync(std::string_view method) {
  return method == "textDocument/didOpen" || method == "textDocument/didChange" ||
         method == "textDocument/didClose";
}

bool is_lifecycle(std::string_view method) {
  return method == "initialize" || method == "initialized" || method == "shutdown" ||
         method == "exit";
}

Position parse_position(const json& j) {
  return {j.at("line").get<std::size_t>(), j.at("character").get<std::size_t>()};
}

json merged(const json& a, const json& b) {
  json out = a.is_array() ? a : json::array();
  if (b.is_array())
    for (const auto& d : b) out.push_back(d);
  return out;
}

json completion_item(const completion::CompletionItem& item, std::size_t line_no,
                     std::size_t word_begin, std::size_t cursor, std::string_view partial) {
  char sort_text[16];
  std::snprintf(sort_text, sizeof sort_text, "%04d", item.rank);
  json out = {{"label", item.label}, {"sortText", sort_text}};
  if (!item.detail.empty()) out["detail"] = item.detail;
  switch (item.kind) {
    case completion::ItemKind::Preview:
      out["kind"] = kKindSnippet;
      out["preselect"] = true;
      out["filterText"] = std::string(partial);
      out["textEdit"] = edit(range(line_no, cursor, cursor), "");
      break;
    case completion::ItemKind::Keyword: {
      const bool word = std::isalpha(static_cast<unsigned char>(item.label.front()));
      out["kind"] = word ? kKindKeyword : kKindOperator;
      if (item.insert_text != item.label) out["filterText"] = item.insert_text;
      out["textEdit"] = edit(range(line_no, word_begin, cursor), item.insert_text);
      break;
    }
    case completion::ItemKind::Identifier:
      out["kind"] = kKindVariable;
      out["textEdit"] = edit(range(line_no, word_begin, cursor), item.insert_text);
      break;
    case completion::ItemKind::Hint:
      out["kind"] = kKindText;
      out["filterText"] = std::string(partial);
      out["textEdit"] = edit(range(line_no, cursor, cursor), "");
      break;
  }
  return out;
}

// Puts the generated code on the line after the DSL comment, replacing the
// output of an earlier acceptance.
json preview_edits(const Document& doc, std::size_t line_no, const std::string& code,
                   const config::HubConfig& config) {
  const std::string_view line = without_cr(doc.lines[line_no]);
  const std::string generated = transpile::generated_line(transpile::leading_indent(line), code);
  json edits = json::array();
  if (line_no + 1 < doc.lines.size()) {
    const std::string_view next = without_cr(doc.lines[line_no + 1]);
    if (transpile::is_generated_line(next, config.dsl_prefix))
      edits.push_back(edit(range(line_no + 1, 0, next.size()), generated));
    else
      edits.push_back(edit(range(line_no + 1, 0, 0), generated + "\n"));
  } else {
    edits.push_back(edit(range(line_no, line.size(), line.size()), "\n" + generated));
  }
  return edits;
}

}  // namespace

std::string_view to_string(Route route) {
  switch (route) {
    case Route::LocalDsl: return "local-dsl";
    case Route::Downstream: return "downstream";
    case Route::Both: return "both";
    case Route::Unhandled: return "unhandled";
  }
  return "?";
}

Result<Route, RpcError> dispatch(const json& message, const DocumentStore& store,
                                 const config::HubConfig& config) {
  const Route elsewhere = config.downstream_cmd ? Route::Downstream : Route::Unhandled;
  if (!message.is_object()) return RpcError{error_code::kInvalidRequest, "message is not an object"};
  const auto method_it = message.find("method");
  if (method_it == message.end()) return elsewhere;
  if (!method_it->is_string()) return RpcError{error_code::kInvalidRequest, "method is not a string"};
  const std::string& method = method_it->get_ref<const std::string&>();

  if (is_lifecycle(method)) return Route::LocalDsl;
  if (is_sync(method)) return Route::Both;
  if (method != "textDocument/completion") return elsewhere;

  const json params = message.value("params", json::object());
  const json text_document = params.is_object() ? params.value("textDocument", json()) : json();
  if (!text_document.is_object() || !text_document.contains("uri") ||
      !text_document["uri"].is_string())
    return RpcError{error_code::kInvalidParams, "missing textDocument.uri"};
  const std::string uri = text_document["uri"];
  const Document* doc = store.find(uri);
  if (!doc) return RpcError{error_code::kInvalidParams, "document " + uri + " is not open"};

  const json pos = params.value("position", json());
  const auto line = index_field(pos, "line");
  const auto character = index_field(pos, "character");
  if (!line || !character) return RpcError{error_code::kInvalidParams, "malformed position"};
  if (*line >= doc->lines.size())
    return RpcError{error_code::kInvalidParams,
                    "line " + std::to_string(*line) + " is out of range (document has " +
                        std::to_string(doc->lines.size()) + " lines)"};

  if (parser::detect_dsl_line(doc->lines[*line], config.dsl_prefix).is_dsl) return Route::LocalDsl;
  return elsewhere;
}

ast::Target target_state(const DocumentStore& store, const std::string& uri,
                         std::size_t line_no, const config::HubConfig& config) {
  ast::Target target = config.default_target;
  const Document* doc = store.find(uri);
  if (!doc) return target;
  for (std::size_t i = 0; i < std::min(line_no, doc->lines.size()); ++i) {
    const std::string_view line = without_cr(doc->lines[i]);
    const auto det = parser::detect_dsl_line(line, config.dsl_prefix);
    if (!det.is_dsl) continue;
    const auto parsed = parser::parse_line(line.substr(det.payload_offset));
    if (!parsed) continue;
    if (const auto t = target_option(parsed.value())) target = *t;
  }
  return target;
}

json dsl_diagnostics(const Document& doc, const config::HubConfig& config) {
  json diags = json::array();
  codegen::GenContext ctx;
  ctx.target = config.default_target;
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    const std::string_view line = without_cr(doc.lines[i]);
    const auto det = parser::detect_dsl_line(line, config.dsl_prefix);
    if (!det.is_dsl) continue;
    const auto parsed = parser::parse_line(line.substr(det.payload_offset));
    if (!parsed) {
      const auto& err = parsed.error();
      const std::size_t begin = std::min(det.payload_offset + err.position, line.size());
      const std::size_t end = std::min(begin + err.found.size(), line.size());
      diags.push_back({{"range", range(i, begin, end)},
                       {"severity", 1},
                       {"source", "tabledsl"},
                       {"message", err.describe()}});
      continue;
    }
    if (const auto t = target_option(parsed.value())) {
      ctx.target = *t;
      continue;
    }
    for (const auto& w : codegen::generate(parsed.value(), ctx).warnings)
      diags.push_back({{"range", range(i, det.payload_offset, line.size())},
                       {"severity", 2},
                       {"source", "tabledsl"},
                       {"message", w.message}});
  }
  return diags;
}

json completion_result(const Document& doc, const std::string& uri, std::size_t line_no,
                       std::size_t character, const DocumentStore& store,
                       const config::HubConfig& config) {
  const std::string_view line = without_cr(doc.lines.at(line_no));
  const std::size_t cursor = std::min(character, line.size());
  const auto det = parser::detect_dsl_line(line, config.dsl_prefix);

  completion::CompletionOptions opts;
  opts.prefix = config.dsl_prefix;
  opts.known_identifiers = completion::collect_identifiers(doc.lines, config.dsl_prefix, line_no);
  codegen::GenContext ctx;
  ctx.target = target_state(store, uri, line_no, config);

  const auto items = completion::complete(line, cursor, ctx, opts);
  const std::size_t word_begin = std::max(completion::word_start(line, cursor), det.payload_offset);
  const std::string_view partial = line.substr(word_begin, cursor - word_begin);

  json out = json::array();
  for (const auto& item : items) {
    json j = completion_item(item, line_no, word_begin, cursor, partial);
    if (item.kind == completion::ItemKind::Preview && !item.insert_text.empty())
      j["additionalTextEdits"] = preview_edits(doc, line_no, item.insert_text, config);
    out.push_back(std::move(j));
  }
  return {{"isIncomplete", false}, {"items", std::move(out)}};
}

Hub::Hub(config::HubConfig config, Sink to_client, DownstreamFactory factory)
    : config_(std::move(config)), sink_(std::move(to_client)), factory_(std::move(factory)) {
  if (!factory_)
    factory_ = [](const std::string& cmd) { return std::make_unique<ProcessDownstream>(cmd); };
}

Hub::~Hub() { stop_downstream(); }

bool Hub::downstream_running() const {
  std::lock_guard lock(mu_);
  return ds_state_ == DownstreamState::Ready;
}

config::HubConfig Hub::effective_config() const {
  config::HubConfig cfg = config_;
  std::lock_guard lock(mu_);
  if (ds_state_ == DownstreamState::Dead) cfg.downstream_cmd.reset();
  return cfg;
}

void Hub::send(const json& message) { send_raw(dump(message)); }

void Hub::send_raw(const std::string& body) {
  std::lock_guard lock(sink_mu_);
  sink_(body);
}

void Hub::reply(const json& id, json result) {
  send({{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}});
}

void Hub::reply_error(const json& id, int code, std::string message) {
  send({{"jsonrpc", "2.0"},
        {"id", id},
        {"error", {{"code", code}, {"message", std::move(message)}}}});
}

bool Hub::handle(std::string_view body) {
  json msg;
  try {
    msg = json::parse(body);
  } catch (const json::parse_error& e) {
    reply_error(nullptr, error_code::kParseError, std::string("parse error: ") + e.what());
    return true;
  }
  if (!msg.is_object()) {
    reply_error(nullptr, error_code::kInvalidRequest, "message is not an object");
    return true;
  }
  const bool has_id = msg.contains("id");
  const json id = has_id ? msg["id"] : json();

  if (!msg.contains("method")) {
    if (has_id && (msg.contains("result") || msg.contains("error")))
      forward(body);
    else
      reply_error(id, error_code::kInvalidRequest, "neither a request nor a response");
    return true;
  }
  if (!msg["method"].is_string()) {
    if (has_id) reply_error(id, error_code::kInvalidRequest, "method is not a string");
    return true;
  }
  if (msg["method"] == "exit") {
    if (downstream_running()) forward(dump({{"jsonrpc", "2.0"}, {"method", "exit"}}));
    stop_downstream();
    return false;
  }

  try {
    if (has_id)
      handle_request(msg, body);
    else
      handle_notification(msg, body);
  } catch (const std::exception& e) {
    log("error", std::string("while handling ") + msg["method"].get<std::string>() + ": " + e.what());
    if (has_id) reply_error(id, error_code::kInternalError, e.what());
  }
  return true;
}

void Hub::handle_request(const json& msg, std::string_view body) {
  const json& id = msg["id"];
  const std::string method = msg["method"];
  const json params = msg.value("params", json::object());

  if (!initialized_ && method != "initialize") {
    reply_error(id, error_code::kServerNotInitialized, "server not initialized");
    return;
  }
  if (shutdown_requested_) {
    reply_error(id, error_code::kInvalidRequest, "server is shutting down");
    return;
  }
  if (method == "initialize") return on_initialize(id, params);
  if (method == "shutdown") return on_shutdown(id);

  const auto route = dispatch(msg, store_, effective_config());
  if (!route) {
    reply_error(id, route.error().code, route.error().message);
    return;
  }
  if (*route == Route::LocalDsl && method == "textDocument/completion")
    return on_completion(id, params);

  if (*route == Route::Downstream && ensure_downstream()) {
    const std::string key = dump(id);
    {
      std::lock_guard lock(mu_);
      pending_.insert(key);
    }
    if (forward(body)) return;
    std::lock_guard lock(mu_);
    // Already answered when the downstream died in between.
    if (pending_.erase(key) == 0) return;
  }
  if (method == "textDocument/completion")
    reply(id, {{"isIncomplete", false}, {"items", json::array()}});
  else
    reply_error(id, error_code::kMethodNotFound, "method not found: " + method);
}

void Hub::handle_notification(const json& msg, std::string_view body) {
  if (!initialized_) return;
  const std::string method = msg["method"];
  if (method == "initialized") return;
  if (is_sync(method)) {
    on_sync(method, msg.value("params", json::object()));
    if (downstream_running()) forward(body);
    return;
  }
  if (downstream_running()) forward(body);
}

void Hub::on_initialize(const json& id, const json& params) {
  if (initialized_) {
    reply_error(id, error_code::kInvalidRequest, "initialize was already received");
    return;
  }
  init_params_ = params;
  initialized_ = true;

  json caps = {
      {"textDocumentSync", {{"openClose", true}, {"change", 1}}},
      {"completionProvider", {{"triggerCharacters", {" ", ":"}}, {"resolveProvider", false}}},
  };
  if (config_.downstream_cmd) {
    caps["hoverProvider"] = true;
    caps["definitionProvider"] = true;
    caps["referencesProvider"] = true;
    caps["documentSymbolProvider"] = true;
    caps["signatureHelpProvider"] = {{"triggerCharacters", {"(", ","}}};
  }
  reply(id, {{"capabilities", std::move(caps)},
             {"serverInfo", {{"name", "tabledsl"}, {"version", kServerVersion}}}});
}

void Hub::on_shutdown(const json& id) {
  if (downstream_running()) {
    forward(dump({{"jsonrpc", "2.0"}, {"id", kShutdownId}, {"method", "shutdown"}}));
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, kShutdownTimeout, [&] {
      return internal_replies_.count(kShutdownId) > 0 || ds_state_ == DownstreamState::Dead;
    });
  }
  shutdown_requested_ = true;
  reply(id, nullptr);
}

void Hub::on_completion(const json& id, const json& params) {
  json result = {{"isIncomplete", false}, {"items", json::array()}};
  try {
    const std::string uri = params.at("textDocument").at("uri");
    const std::size_t line = params.at("position").at("line");
    const std::size_t character = params.at("position").at("character");
    const Document* doc = store_.find(uri);
    if (doc) result = completion_result(*doc, uri, line, character, store_, effective_config());
  } catch (const std::exception& e) {
    log("error", std::string("completion failed: ") + e.what());
  }
  reply(id, std::move(result));
}

void Hub::on_sync(const std::string& method, const json& params) {
  const json& td = params.at("textDocument");
  const std::string uri = td.at("uri");
  if (method == "textDocument/didOpen") {
    store_.open(uri, td.value("languageId", ""), td.at("version").get<std::int64_t>(),
                td.at("text").get<std::string>());
    publish(uri);
  } else if (method == "textDocument/didChange") {
    std::vector<ContentChange> changes;
    for (const auto& c : params.at("contentChanges")) {
      ContentChange change{std::nullopt, c.at("text").get<std::string>()};
      if (c.contains("range"))
        change.range = Range{parse_position(c["range"].at("start")),
                             parse_position(c["range"].at("end"))};
      changes.push_back(std::move(change));
    }
    if (auto err = store_.change(uri, td.at("version").get<std::int64_t>(), changes)) {
      log("warning", "ignored didChange: " + *err);
      return;
    }
    publish(uri);
  } else {
    store_.close(uri);
    {
      std::lock_guard lock(mu_);
      dsl_diags_.erase(uri);
      ds_diags_.erase(uri);
      versions_.erase(uri);
    }
    send({{"jsonrpc", "2.0"},
          {"method", "textDocument/publishDiagnostics"},
          {"params", {{"uri", uri}, {"diagnostics", json::array()}}}});
  }
}

void Hub::publish(const std::string& uri) {
  const Document* doc = store_.find(uri);
  if (!doc) return;
  json diags = dsl_diagnostics(*doc, effective_config());
  std::lock_guard lock(mu_);
  dsl_diags_[uri] = diags;
  versions_[uri] = doc->version;
  send({{"jsonrpc", "2.0"},
        {"method", "textDocument/publishDiagnostics"},
        {"params", {{"uri", uri}, {"version", doc->version}, {"diagnostics", merged(diags, ds_diags_[uri])}}}});
}

bool Hub::ensure_downstream() {
  {
    std::lock_guard lock(mu_);
    if (ds_state_ == DownstreamState::Ready) return true;
    if (ds_state_ == DownstreamState::Dead || !config_.downstream_cmd) return false;
  }
  auto ds = factory_(*config_.downstream_cmd);
  const bool started =
      ds && ds->start([this](std::string body) { on_downstream_message(std::move(body)); },
                      [this] { on_downstream_exit(); });
  if (!started) {
    log("warning", "could not start downstream server '" + *config_.downstream_cmd +
                       "'; continuing without it");
    std::lock_guard lock(mu_);
    ds_state_ = DownstreamState::Dead;
    return false;
  }
  {
    std::lock_guard lock(mu_);
    downstream_ = std::move(ds);
  }
  downstream_->send(dump({{"jsonrpc", "2.0"},
                          {"id", kInitId},
                          {"method", "initialize"},
                          {"params", init_params_}}));
  bool answered = false;
  {
    std::unique_lock lock(mu_);
    answered = cv_.wait_for(lock, kInitTimeout, [&] {
      return internal_replies_.count(kInitId) > 0 || ds_state_ == DownstreamState::Dead;
    });
    answered = answered && ds_state_ != DownstreamState::Dead;
    if (answered) ds_state_ = DownstreamState::Ready;
  }
  if (!answered) {
    log("warning", "downstream server did not answer initialize; continuing without it");
    stop_downstream();
    return false;
  }
  forward(dump({{"jsonrpc", "2.0"}, {"method", "initialized"}, {"params", json::object()}}));
  for (const auto& [uri, doc] : store_.all())
    forward(dump({{"jsonrpc", "2.0"},
                  {"method", "textDocument/didOpen"},
                  {"params",
                   {{"textDocument",
                     {{"uri", uri},
                      {"languageId", doc.language_id},
                      {"version", doc.version},
                      {"text", doc.text}}}}}}));
  return true;
}

bool Hub::forward(std::string_view body) {
  Downstream* ds = nullptr;
  {
    std::lock_guard lock(mu_);
    if (ds_state_ != DownstreamState::Ready) return false;
    ds = downstream_.get();
  }
  return ds->send(std::string(body));
}

void Hub::on_downstream_message(std::string body) {
  json msg;
  try {
    msg = json::parse(body);
  } catch (const json::parse_error& e) {
    log("warning", std::string("dropping unparsable downstream message: ") + e.what());
    return;
  }
  if (!msg.is_object()) return;

  if (!msg.contains("method") && msg.contains("id")) {
    const json& id = msg["id"];
    {
      std::lock_guard lock(mu_);
      if (id == kInitId || id == kShutdownId) {
        internal_replies_.insert(id.get<std::string>());
        cv_.notify_all();
        return;
      }
      pending_.erase(dump(id));
    }
    send_raw(body);
    return;
  }

  if (msg["method"] == "textDocument/publishDiagnostics" && msg.contains("params") &&
      msg["params"].is_object() && msg["params"].value("uri", json()).is_string()) {
    json params = msg["params"];
    const std::string uri = params["uri"];
    std::lock_guard lock(mu_);
    ds_diags_[uri] = params.value("diagnostics", json::array());
    params["diagnostics"] = merged(dsl_diags_[uri], ds_diags_[uri]);
    send({{"jsonrpc", "2.0"}, {"method", "textDocument/publishDiagnostics"}, {"params", params}});
    return;
  }
  send_raw(body);
}

void Hub::on_downstream_exit() {
  std::set<std::string> orphans;
  std::vector<std::string> republish;
  bool expected = false;
  {
    std::lock_guard lock(mu_);
    expected = ds_stopping_;
    ds_state_ = DownstreamState::Dead;
    orphans.swap(pending_);
    for (const auto& [uri, diags] : ds_diags_)
      if (!diags.empty()) republish.push_back(uri);
    ds_diags_.clear();
    cv_.notify_all();
  }
  if (!expected) log("warning", "downstream server exited; continuing without it");
  for (const auto& key : orphans)
    reply_error(json::parse(key), error_code::kInternalError, "downstream language server exited");

  std::lock_guard lock(mu_);
  for (const auto& uri : republish) {
    json params = {{"uri", uri}, {"diagnostics", merged(dsl_diags_[uri], json::array())}};
    if (const auto v = versions_.find(uri); v != versions_.end()) params["version"] = v->second;
    send({{"jsonrpc", "2.0"}, {"method", "textDocument/publishDiagnostics"}, {"params", params}});
  }
}

void Hub::stop_downstream() {
  {
    std::lock_guard lock(mu_);
    if (!downstream_) return;
    ds_stopping_ = true;
  }
  downstream_->stop();
  std::lock_guard lock(mu_);
  ds_state_ = DownstreamState::Dead;
  downstream_.reset();
}

int serve(const config::HubConfig& config, ByteSource& in, int out_fd) {
  ::signal(SIGPIPE, SIG_IGN);
  Hub hub(config, [out_fd](const std::string& body) {
    if (!write_all(out_fd, frame(body))) log("error", "cannot write to the client");
  });
  try {
    while (auto body = read_message(in))
      if (!hub.handle(*body)) return hub.exit_code();
    log("error", "input ended without an exit notification");
  } catch (const FramingError& e) {
    log("error", std::string("protocol framing error: ") + e.what());
  }
  return 1;
}

}  // namespace tabledsl::lsp
