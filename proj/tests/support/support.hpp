#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabledsl/ast.hpp"
#include "tabledsl/lsp/downstream.hpp"

namespace support {

std::string source_path(const std::string& relative);
std::string read_text(const std::string& path);

/// Non-blank lines of a fixture file that do not start with '#'.
std::vector<std::string> load_statements(const std::string& relative);

/// The reference document (LaTeX source) flattened: commands and grouping braces
/// removed, escapes resolved, whitespace collapsed.
const std::string& reference_text();
std::string flatten_latex(const std::string& latex);

struct GoldenRow {
  tabledsl::ast::Target target;
  std::string dsl;
  std::string expected;
};

/// Rows of tests/golden/generated_code.txt.
std::vector<GoldenRow> load_generated_code_golden();

/// Cells of the reference generated-code table for type 'P', 'S' or 'D' (DSL).
std::vector<std::string> reference_code_cells(char type);

/// True when `code` equals one of the cells, reading "..." inside a cell as
/// elided text.
bool matches_reference_cell(const std::string& code, char type);

/// Random tree that validate() accepts.
tabledsl::ast::DslLine random_line(std::mt19937& rng);

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv with `input` on stdin; kills it after `timeout`.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input = "",
                          std::chrono::milliseconds timeout = std::chrono::seconds(20));

std::string temp_dir();

/// Replaces every "id" member of a response (not of nested objects) by null.
nlohmann::json without_id(nlohmann::json message);

/// Talks to a language server child process and collects what it sends.
class LspClient {
 public:
  explicit LspClient(const std::string& command);
  ~LspClient();
  void send(const nlohmann::json& message);
  /// Next message from the server, or nullopt after `timeout`.
  std::optional<nlohmann::json> receive(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  /// Messages until one satisfies `done` (inclusive).
  std::vector<nlohmann::json> receive_until(const std::function<bool(const nlohmann::json&)>& done,
                                            std::chrono::milliseconds timeout = std::chrono::seconds(10));
  bool exited() const;

 private:
  tabledsl::lsp::ProcessDownstream process_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<nlohmann::json> inbox_;
  bool closed_ = false;
};

}  // namespace support
