#include "support.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tabledsl/parser.hpp"

namespace support {

using namespace tabledsl;
using namespace tabledsl::ast;

std::string source_path(const std::string& relative) {
  return std::string(TABLEDSL_SOURCE_DIR) + "/" + relative;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> load_statements(const std::string& relative) {
  std::istringstream in(read_text(source_path(relative)));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

std::string flatten_latex(const std::string& latex) {
  std::string s = latex;
  auto replace_all = [&s](const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
      s.replace(pos, from.size(), to);
  };
  // Placeholders for characters that must survive brace removal.
  replace_all("{[}", "\x01");
  replace_all("{]}", "\x02");
  replace_all("\\{", "\x03");
  replace_all("\\}", "\x04");
  replace_all("\\_", "_");
  replace_all("\\&", "&");
  replace_all("\\%", "%");
  s = std::regex_replace(s, std::regex(R"(\\(textbf|textit|emph|uline|texttt|textcolor\{[a-z]+\})\{)"), "");
  std::string out;
  for (char c : s) {
    if (c == '{' || c == '}') continue;
    if (c == '\x01') c = '[';
    else if (c == '\x02') c = ']';
    else if (c == '\x03') c = '{';
    else if (c == '\x04') c = '}';
    out.push_back(c);
  }
  return std::regex_replace(out, std::regex(R"(\s+)"), " ");
}

const std::string& reference_text() {
  static const std::string text = flatten_latex(read_text(source_path("paper.md")));
  return text;
}

std::vector<GoldenRow> load_generated_code_golden() {
  std::vector<GoldenRow> rows;
  for (const auto& line : load_statements("tests/golden/generated_code.txt")) {
    const auto a = line.find(" | ");
    const auto b = line.find(" | ", a + 3);
    if (a == std::string::npos || b == std::string::npos)
      throw std::runtime_error("malformed golden row: " + line);
    const auto target = parse_target(line.substr(0, a));
    if (!target) throw std::runtime_error("bad target in: " + line);
    rows.push_back({*target, line.substr(a + 3, b - a - 3), line.substr(b + 3)});
  }
  return rows;
}

std::vector<std::string> reference_code_cells(char type) {
  const std::string& reference = reference_text();
  const auto begin = reference.find("Type & Code");
  const auto end = reference.find("\\end", begin);
  if (begin == std::string::npos || end == std::string::npos)
    throw std::runtime_error("generated-code table not found in the reference document");
  const std::string table = reference.substr(begin, end - begin);
  const std::string tag = type == 'D' ? "DSL" : std::string(1, type);
  static const std::regex row(R"(\\(?:tabularnewline|midrule) ?([A-Z]+) & (.*?) ?\\tabularnewline)");
  std::vector<std::string> cells;
  for (std::size_t pos = 0;;) {
    std::smatch m;
    const std::string rest = table.substr(pos);
    if (!std::regex_search(rest, m, row)) break;
    if (m[1] == tag) cells.push_back(m[2]);
    pos += static_cast<std::size_t>(m.position(0)) + m.length(0) - std::string("\\tabularnewline").size();
  }
  return cells;
}

bool matches_reference_cell(const std::string& code, char type) {
  for (const auto& cell : reference_code_cells(type)) {
    if (cell == code) return true;
    const auto dots = cell.find("...");
    if (dots == std::string::npos) continue;
    const std::string head = cell.substr(0, dots);
    const std::string tail = cell.substr(dots + 3);
    if (code.size() >= head.size() + tail.size() && code.starts_with(head) && code.ends_with(tail))
      return true;
  }
  return false;
}

//===----------------------------------------------------------------------===//
// Random trees
//===----------------------------------------------------------------------===//

namespace {

class TreeGen {
 public:
  explicit TreeGen(std::mt19937& rng) : rng_(rng) {}

  DslLine line() {
    DslLine l;
    switch (pick(10)) {
      case 0: {
        if (coin()) l.assignment = AssignTarget{ident()};
        op::Load load;
        if (coin()) load.format = coin() ? FileFormat::Csv : FileFormat::Json;
        load.path = coin() ? Literal::ident(ident()) : Literal::str(text());
        if (coin()) load.schema = ident();
        l.chain.push_back(load);
        return l;
      }
      case 1: {
        if (coin()) l.assignment = AssignTarget{ident()};
        op::SchemaDef s;
        for (int i = 0, n = 1 + pick(3); i < n; ++i)
          s.fields.emplace_back(ident(), static_cast<DslType>(pick(4)));
        l.chain.push_back(s);
        return l;
      }
      case 2:
        l.chain.push_back(op::StartSession{text()});
        return l;
      case 3:
        l.chain.push_back(op::StopSession{});
        return l;
      case 4:
        l.chain.push_back(op::TargetOption{coin() ? Target::Spark : Target::Pandas});
        return l;
      default:
        break;
    }
    if (coin()) l.assignment = AssignTarget{ident()};
    l.source = DataframeRef{ident()};
    const int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) {
      ChainOp o = chain_op();
      l.chain.push_back(o);
      if (is_terminal(o)) break;
    }
    return l;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  std::string ident() {
    static const std::vector<std::string> soft{"csv", "sum", "cols", "rows", "int", "spark", "unique"};
    if (pick(6) == 0) return soft[pick(static_cast<int>(soft.size()))];
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCXYZ_";
    static const std::string rest = "abcdefghijklmnopqrstuvwxyz0123456789_N";
    for (;;) {
      std::string s(1, first[pick(static_cast<int>(first.size()))]);
      for (int i = 0, n = pick(8); i < n; ++i) s += rest[pick(static_cast<int>(rest.size()))];
      if (!parser::is_keyword(s) || parser::is_soft_keyword(s)) return s;
    }
  }

  std::string text() {
    static const std::string chars = "abc XYZ_019.,:[]=<>'\\\"#-";
    std::string s;
    for (int i = 0, n = pick(10); i < n; ++i) s += chars[pick(static_cast<int>(chars.size()))];
    return s;
  }

  std::string number() {
    std::string s;
    if (pick(4) == 0) s += coin() ? "-" : "+";
    s += std::to_string(pick(1000));
    if (coin()) s += "." + std::to_string(pick(100));
    return s;
  }

  Literal scalar() {
    switch (pick(3)) {
      case 0: return Literal::ident(ident());
      case 1: return Literal::str(text());
      default: return Literal::num(number());
    }
  }

  Literal value() {
    if (pick(4) != 0) return scalar();
    std::vector<Literal> items;
    for (int i = 0, n = 1 + pick(3); i < n; ++i) items.push_back(scalar());
    return Literal::list(std::move(items));
  }

  std::vector<std::string> idents() {
    std::vector<std::string> v;
    for (int i = 0, n = 1 + pick(3); i < n; ++i) v.push_back(ident());
    return v;
  }

  CondExpr leaf() {
    if (coin()) return make_cmp(ident(), static_cast<CmpOp>(pick(6)), scalar());
    std::vector<Literal> values;
    for (int i = 0, n = 1 + pick(3); i < n; ++i) values.push_back(scalar());
    return make_member(ident(), coin(), std::move(values));
  }

  // Left-associative, `and` binding tighter than `or`: the only shapes
  // the grammar can express.
  CondExpr cond() {
    auto conj = [this] {
      CondExpr c = leaf();
      for (int i = 0, n = pick(3); i < n; ++i) c = make_bool(BoolKind::And, c, leaf());
      return c;
    };
    CondExpr c = conj();
    for (int i = 0, n = pick(3); i < n; ++i) c = make_bool(BoolKind::Or, c, conj());
    return c;
  }

  ChainOp chain_op() {
    switch (pick(18)) {
      case 0: return op::Save{coin() ? FileFormat::Csv : FileFormat::Json,
                              coin() ? Literal::ident(ident()) : Literal::str(text())};
      case 1: return op::SelectCols{idents()};
      case 2: return op::SelectRows{cond()};
      case 3: return op::DropCols{idents()};
      case 4: return op::DropRows{cond()};
      case 5: return op::GroupBy{idents(), static_cast<AggFn>(pick(6))};
      case 6: return op::FillMissing{value()};
      case 7: return op::DropMissing{};
      case 8: return op::Replace{value(), value()};
      case 9: return op::ApplyFun{ident(), coin() ? Axis::Cols : Axis::Rows};
      case 10: return op::AppendCol{ident()};
      case 11: return op::AppendRow{ident(), value()};
      case 12: return op::SortBy{ident()};
      case 13: return op::DropDuplicates{};
      case 14: {
        op::RenameCols r;
        std::set<std::string> seen;
        for (int i = 0, n = 1 + pick(3); i < n; ++i) {
          std::string from = ident();
          if (seen.insert(from).second) r.pairs.emplace_back(from, ident());
        }
        return r;
      }
      case 15: return op::Show{};
      case 16: return op::Describe{};
      default:
        if (coin()) return op::Count{};
        return op::ReturnTopN{static_cast<std::uint64_t>(1 + pick(100000))};
    }
  }

  std::mt19937& rng_;
};

}  // namespace

DslLine random_line(std::mt19937& rng) { return TreeGen(rng).line(); }

//===----------------------------------------------------------------------===//
// Processes
//===----------------------------------------------------------------------===//

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout) {
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) || ::pipe2(out_pipe, O_CLOEXEC) || ::pipe2(err_pipe, O_CLOEXEC))
    throw std::runtime_error("pipe failed");
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(err_pipe[1], 2);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::signal(SIGPIPE, SIG_IGN);

  ProcessResult result;
  std::size_t written = 0;
  int to_child = in_pipe[1];
  if (input.empty()) {
    ::close(to_child);
    to_child = -1;
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool out_open = true, err_open = true;
  while (out_open || err_open) {
    std::vector<pollfd> fds;
    if (out_open) fds.push_back({out_pipe[0], POLLIN, 0});
    if (err_open) fds.push_back({err_pipe[0], POLLIN, 0});
    if (to_child >= 0) fds.push_back({to_child, POLLOUT, 0});
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      ::kill(pid, SIGKILL);
      result.err += "\n[killed after timeout]";
      break;
    }
    if (::poll(fds.data(), fds.size(), static_cast<int>(left.count())) < 0 && errno != EINTR) break;
    for (const auto& p : fds) {
      if (!p.revents) continue;
      if (p.fd == to_child) {
        const ssize_t n = ::write(to_child, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 || written == input.size()) {
          ::close(to_child);
          to_child = -1;
        }
        continue;
      }
      char buf[4096];
      const ssize_t n = ::read(p.fd, buf, sizeof buf);
      if (n <= 0) {
        (p.fd == out_pipe[0] ? out_open : err_open) = false;
        continue;
      }
      (p.fd == out_pipe[0] ? result.out : result.err).append(buf, static_cast<std::size_t>(n));
    }
  }
  if (to_child >= 0) ::close(to_child);
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

namespace {

// Directories made by temp_dir(), removed when the test binary exits.
struct TempDirs {
  std::vector<std::string> paths;
  ~TempDirs() {
    std::error_code ec;
    for (const auto& p : paths) std::filesystem::remove_all(p, ec);
  }
};

}  // namespace

std::string temp_dir() {
  static TempDirs dirs;
  std::string tmpl = (std::filesystem::temp_directory_path() / "tabledsl-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  dirs.paths.push_back(tmpl);
  return tmpl;
}

nlohmann::json without_id(nlohmann::json message) {
  if (message.is_object() && message.contains("id")) message["id"] = nullptr;
  return message;
}

LspClient::LspClient(const std::string& command) : process_(command) {
  const bool started = process_.start(
      [this](std::string body) {
        std::lock_guard lock(mu_);
        inbox_.push_back(nlohmann::json::parse(body));
        cv_.notify_all();
      },
      [this] {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_.notify_all();
      });
  if (!started) throw std::runtime_error("cannot start " + command);
}

LspClient::~LspClient() { process_.stop(); }

void LspClient::send(const nlohmann::json& message) { process_.send(message.dump()); }

std::optional<nlohmann::json> LspClient::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || closed_; })) return std::nullopt;
  if (inbox_.empty()) return std::nullopt;
  nlohmann::json front = std::move(inbox_.front());
  inbox_.erase(inbox_.begin());
  return front;
}

std::vector<nlohmann::json> LspClient::receive_until(
    const std::function<bool(const nlohmann::json&)>& done, std::chrono::milliseconds timeout) {
  std::vector<nlohmann::json> out;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    auto msg = receive(std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now()));
    if (!msg) break;
    out.push_back(*msg);
    if (done(out.back())) break;
  }
  return out;
}

bool LspClient::exited() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace support
