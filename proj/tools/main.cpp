#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tabledsl/completion.hpp"
#include "tabledsl/config.hpp"
#include "tabledsl/corpus.hpp"
#include "tabledsl/lsp/hub.hpp"
#include "tabledsl/parser.hpp"
#include "tabledsl/transpile.hpp"

namespace {

using namespace tabledsl;

constexpr int kExitOk = 0;
constexpr int kExitDslError = 1;
constexpr int kExitIo = 2;

struct IoError {
  std::string message;
};

Result<std::string, IoError> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return IoError{"cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return IoError{"error while reading " + path};
  return buf.str();
}

// Temp file in the same directory, then rename, so readers never see a
// half-written file.
std::optional<std::string> write_atomically(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::string tmpl = (target.parent_path() / ("." + target.filename().string() + ".XXXXXX")).string();
  if (target.parent_path().empty()) tmpl = "." + target.filename().string() + ".XXXXXX";
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) return "cannot create a temporary file next to " + path;

  struct stat st {};
  if (::stat(path.c_str(), &st) == 0) ::fchmod(fd, st.st_mode & 07777);
  const bool written = lsp::write_all(fd, data) && ::fsync(fd) == 0;
  ::close(fd);
  if (!written || ::rename(tmpl.c_str(), path.c_str()) != 0) {
    ::unlink(tmpl.c_str());
    return "cannot write " + path;
  }
  return std::nullopt;
}

void print_parse_error(const std::string& path, std::size_t line_no, std::size_t column,
                       const parser::ParseError& err) {
  std::cerr << path << ":" << line_no << ":" << column + 1 << ": " << err.describe() << "\n";
}

int run_transpile(const std::string& path, ast::Target target, bool in_place,
                  const std::string& prefix) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "tabledsl: " << text.error().message << "\n";
    return kExitIo;
  }
  const auto report = transpile::transpile_text(*text, {target, prefix});
  for (const auto& rec : report.records) {
    if (rec.error) print_parse_error(path, rec.line_no, rec.payload_offset + rec.error->position, *rec.error);
    for (const auto& w : rec.warnings)
      if (w.op != "target_code")
        std::cerr << path << ":" << rec.line_no << ": warning: " << w.message << "\n";
  }
  if (!report.ok()) return kExitDslError;

  if (!in_place) {
    std::cout << report.output;
    return kExitOk;
  }
  if (report.output == *text) return kExitOk;
  if (auto err = write_atomically(path, report.output)) {
    std::cerr << "tabledsl: " << *err << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_check(const std::string& path, const std::string& prefix) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "tabledsl: " << text.error().message << "\n";
    return kExitIo;
  }
  const auto lines = lsp::split_lines(*text);
  bool clean = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.ends_with('\r')) line.remove_suffix(1);
    const auto det = parser::detect_dsl_line(line, prefix);
    if (!det.is_dsl) continue;
    const auto parsed = parser::parse_line(line.substr(det.payload_offset));
    if (parsed) continue;
    clean = false;
    std::cout << path << ":" << i + 1 << ":" << det.payload_offset + parsed.error().position + 1
              << ": " << parsed.error().describe() << "\n";
  }
  return clean ? kExitOk : kExitDslError;
}

int run_complete(const std::string& path, std::size_t line_no, std::size_t col, ast::Target target,
                 const std::string& prefix) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "tabledsl: " << text.error().message << "\n";
    return kExitIo;
  }
  lsp::DocumentStore store;
  store.open("file", "python", 0, *text);
  const lsp::Document& doc = *store.find("file");
  if (line_no >= doc.lines.size()) {
    std::cerr << "tabledsl: line " << line_no << " is out of range (file has " << doc.lines.size()
              << " lines)\n";
    return kExitIo;
  }
  config::HubConfig cfg;
  cfg.dsl_prefix = prefix;
  cfg.default_target = target;

  std::string_view line = doc.lines[line_no];
  if (line.ends_with('\r')) line.remove_suffix(1);
  completion::CompletionOptions opts;
  opts.prefix = prefix;
  opts.known_identifiers = completion::collect_identifiers(doc.lines, prefix, line_no);
  codegen::GenContext ctx;
  ctx.target = lsp::target_state(store, "file", line_no, cfg);

  for (const auto& item : completion::complete(line, col, ctx, opts))
    std::cout << item.rank << "\t" << completion::to_string(item.kind) << "\t" << item.label << "\n";
  return kExitOk;
}

int run_corpus_report(const std::vector<std::string>& paths) {
  bool mismatch = false;
  for (const auto& path : paths) {
    const auto text = read_file(path);
    if (!text) {
      std::cerr << "tabledsl: " << text.error().message << "\n";
      return kExitIo;
    }
    const auto corpus = corpus::parse_corpus(*text);
    if (!corpus) {
      std::cerr << path << ":" << corpus.error().line << ": " << corpus.error().message << "\n";
      return kExitIo;
    }
    const auto report = corpus::classify(*corpus);
    std::cout << corpus::format_report(report, std::filesystem::path(path).filename().string());
    mismatch = mismatch || report.mismatch();
  }
  return mismatch ? kExitDslError : kExitOk;
}

int run_serve(const std::optional<std::string>& config_path) {
  const auto cfg = config::resolve_config(config_path);
  if (!cfg) {
    std::cerr << "tabledsl: " << cfg.error().message << "\n";
    return kExitIo;
  }
  lsp::FdSource in(STDIN_FILENO);
  return lsp::serve(*cfg, in, STDOUT_FILENO);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transpiler and language server for the tabledsl dataframe DSL"};
  app.require_subcommand(1);

  const std::map<std::string, ast::Target> targets{{"pandas", ast::Target::Pandas},
                                                    {"spark", ast::Target::Spark}};
  std::string file;
  std::string prefix = "##";
  ast::Target target = ast::Target::Pandas;
  bool in_place = false;
  std::size_t line_no = 0;
  std::size_t col = 0;
  std::vector<std::string> corpora;
  std::optional<std::string> config_path;

  auto* transpile_cmd = app.add_subcommand("transpile", "Insert generated code after each DSL line");
  transpile_cmd->add_option("file", file, "Script to transpile")->required();
  transpile_cmd->add_option("--target", target, "pandas or spark (target_code lines take precedence)")
      ->required()
      ->transform(CLI::CheckedTransformer(targets, CLI::ignore_case));
  transpile_cmd->add_flag("--in-place", in_place, "Rewrite the file instead of printing it");
  transpile_cmd->add_option("--prefix", prefix, "DSL comment prefix");

  auto* check_cmd = app.add_subcommand("check", "Report DSL syntax errors");
  check_cmd->add_option("file", file, "Script to check")->required();
  check_cmd->add_option("--prefix", prefix, "DSL comment prefix");

  auto* complete_cmd = app.add_subcommand("complete", "List completions at a position");
  complete_cmd->add_option("file", file, "Script")->required();
  complete_cmd->add_option("--line", line_no, "0-based line")->required();
  complete_cmd->add_option("--col", col, "0-based byte column")->required();
  complete_cmd->add_option("--target", target, "pandas or spark (target_code lines take precedence)")
      ->transform(CLI::CheckedTransformer(targets, CLI::ignore_case));
  complete_cmd->add_option("--prefix", prefix, "DSL comment prefix");

  auto* corpus_cmd = app.add_subcommand("corpus-report", "Classify a coverage corpus");
  corpus_cmd->add_option("corpus", corpora, "Corpus files")->required();

  auto* serve_cmd = app.add_subcommand("serve", "Run the language server on stdin/stdout");
  serve_cmd->add_option("--config", config_path, "key=value settings file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitIo;
  }
  if (prefix.empty()) {
    std::cerr << "tabledsl: --prefix must not be empty\n";
    return kExitIo;
  }

  if (*transpile_cmd) return run_transpile(file, target, in_place, prefix);
  if (*check_cmd) return run_check(file, prefix);
  if (*complete_cmd) return run_complete(file, line_no, col, target, prefix);
  if (*corpus_cmd) return run_corpus_report(corpora);
  if (*serve_cmd) return run_serve(config_path);
  return kExitIo;
}
