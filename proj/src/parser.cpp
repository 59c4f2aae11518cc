#include <charconv>
#include <initializer_list>
#include <limits>

#include "tabledsl/parser.hpp"

namespace tabledsl::parser {
namespace {

using namespace ast;

/// Thrown when no alternative matches; the error is rebuilt from the
/// parser's furthest position and expected-set.
struct SyntaxFailure {};

/// Thrown for errors found after a token was accepted (duplicate rename
/// source, non-positive row count).
struct SemanticFailure {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  DslLine statement() {
    DslLine line;
    if (accept_kw("start_session")) {
      expect_kw("named");
      line.chain.emplace_back(op::StartSession{expect_string()});
    } else if (accept_kw("stop_session")) {
      line.chain.emplace_back(op::StopSession{});
    } else if (accept_kw("target_code")) {
      expect_punct("=");
      line.chain.emplace_back(op::TargetOption{choice({"pandas", "spark"}, parse_target)});
    } else {
      if (auto name = accept_ident()) {
        line.assignment = AssignTarget{*name};
        expect_punct("=");
      }
      body(line);
    }
    expect_end();
    return line;
  }

  CondExpr condition_only() {
    CondExpr cond = condition();
    expect_end();
    return cond;
  }

  ParseError error() const {
    const Token& at = toks_[furthest_];
    return ParseError{at.span.begin, at.text, expected_, {}};
  }

  /// Expected-set at the final token, when the parser got that far.
  std::set<std::string> tail_expectations() const {
    if (furthest_ + 1 != toks_.size()) return {};
    return expected_;
  }

 private:
  void body(DslLine& line) {
    if (accept_kw("load")) {
      line.chain.emplace_back(load());
    } else if (accept_kw("schema")) {
      line.chain.emplace_back(schema());
    } else if (accept_kw("on")) {
      line.source = DataframeRef{expect_ident()};
      expect_punct(":");
      for (;;) {
        line.chain.push_back(chain_op());
        if (is_terminal(line.chain.back()) || !accept_punct(":")) break;
      }
    } else {
      fail();
    }
  }

  op::Load load() {
    op::Load out;
    if (accept_kw("as")) out.format = choice({"csv", "json"}, parse_file_format);
    out.path = path();
    if (accept_kw("with_schema")) out.schema = expect_ident();
    return out;
  }

  op::SchemaDef schema() {
    op::SchemaDef out;
    do {
      std::string name = expect_ident();
      expect_kw("of");
      out.fields.emplace_back(std::move(name),
                              choice({"bool", "float", "int", "str"}, parse_dsl_type));
    } while (accept_punct(","));
    return out;
  }

  ChainOp chain_op() {
    if (accept_kw("select_cols")) return op::SelectCols{ident_list()};
    if (accept_kw("select_rows")) return op::SelectRows{condition()};
    if (accept_kw("drop_cols")) return op::DropCols{ident_list()};
    if (accept_kw("drop_rows")) return op::DropRows{condition()};
    if (accept_kw("group_by")) {
      auto cols = ident_list();
      expect_kw("apply");
      return op::GroupBy{std::move(cols),
                         choice({"count", "max", "mean", "min", "sum", "unique"}, parse_agg_fn)};
    }
    if (accept_kw("on_missing")) {
      if (accept_kw("fill_with")) return op::FillMissing{value()};
      expect_kw("drop_rows");
      return op::DropMissing{};
    }
    if (accept_kw("replace")) {
      Literal old_value = value();
      expect_kw("by");
      return op::Replace{std::move(old_value), value()};
    }
    if (accept_kw("apply_fun")) {
      std::string fn = expect_ident();
      expect_kw("on");
      return op::ApplyFun{std::move(fn), choice({"cols", "rows"}, parse_axis)};
    }
    if (accept_kw("append_col")) return op::AppendCol{expect_ident()};
    if (accept_kw("append_row")) {
      std::string name = expect_ident();
      expect_kw("default");
      return op::AppendRow{std::move(name), value()};
    }
    if (accept_kw("sort_by")) return op::SortBy{expect_ident()};
    if (accept_kw("drop_duplicates")) return op::DropDuplicates{};
    if (accept_kw("rename_cols")) return rename();
    if (accept_kw("show")) return op::Show{};
    if (accept_kw("describe")) return op::Describe{};
    if (accept_kw("return_top_N")) return op::ReturnTopN{positive_count()};
    if (accept_kw("count")) return op::Count{};
    if (accept_kw("save")) {
      expect_kw("as");
      auto format = choice({"csv", "json"}, parse_file_format);
      expect_kw("to");
      return op::Save{format, path()};
    }
    fail();
  }

  op::RenameCols rename() {
    op::RenameCols out;
    do {
      const Token& at = peek();
      std::string from = expect_ident();
      for (const auto& [seen, _] : out.pairs)
        if (seen == from)
          throw SemanticFailure{ParseError{at.span.begin, at.text, {std::string(kExpectIdentifier)},
                                           "column '" + from + "' is already renamed"}};
      expect_kw("to");
      out.pairs.emplace_back(std::move(from), expect_ident());
    } while (accept_punct(","));
    return out;
  }

  std::uint64_t positive_count() {
    note(kExpectNumber);
    const Token& at = peek();
    if (at.kind != TokenKind::Number) fail();
    std::uint64_t n = 0;
    const char* first = at.text.data();
    const char* last = first + at.text.size();
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last || n == 0)
      throw SemanticFailure{ParseError{at.span.begin, at.text, {"positive integer"},
                                       "return_top_N needs a positive whole number"}};
    ++pos_;
    return n;
  }

  CondExpr condition() {
    CondExpr lhs = and_term();
    while (accept_kw("or")) lhs = make_bool(BoolKind::Or, std::move(lhs), and_term());
    return lhs;
  }

  CondExpr and_term() {
    CondExpr lhs = leaf();
    while (accept_kw("and")) lhs = make_bool(BoolKind::And, std::move(lhs), leaf());
    return lhs;
  }

  CondExpr leaf() {
    std::string column = expect_ident();
    for (std::string_view sym : {"==", "!=", "<", "<=", ">", ">="}) {
      if (accept_punct(sym)) return make_cmp(std::move(column), *parse_cmp_op(sym), scalar());
    }
    if (accept_kw("in")) return make_member(std::move(column), false, bracketed());
    if (accept_kw("not")) {
      expect_kw("in");
      return make_member(std::move(column), true, bracketed());
    }
    fail();
  }

  Literal value() {
    if (at_punct("[")) return Literal::list(bracketed());
    return scalar();
  }

  std::vector<Literal> bracketed() {
    expect_punct("[");
    std::vector<Literal> items;
    do {
      items.push_back(scalar());
    } while (accept_punct(","));
    expect_punct("]");
    return items;
  }

  Literal scalar() {
    note(kExpectIdentifier);
    note(kExpectString);
    note(kExpectNumber);
    const Token& at = peek();
    switch (at.kind) {
      case TokenKind::Ident:
        ++pos_;
        return Literal::ident(at.text);
      case TokenKind::Keyword:
        if (!is_soft_keyword(at.text)) fail();
        ++pos_;
        return Literal::ident(at.text);
      case TokenKind::String:
        ++pos_;
        return Literal::str(at.value);
      case TokenKind::Number:
        ++pos_;
        return Literal::num(at.text);
      default:
        fail();
    }
  }

  Literal path() {
    note(kExpectIdentifier);
    note(kExpectString);
    const Token& at = peek();
    if (at.kind == TokenKind::String) {
      ++pos_;
      return Literal::str(at.value);
    }
    if (at.kind == TokenKind::Ident || (at.kind == TokenKind::Keyword && is_soft_keyword(at.text))) {
      ++pos_;
      return Literal::ident(at.text);
    }
    fail();
  }

  std::vector<std::string> ident_list() {
    std::vector<std::string> out;
    do {
      out.push_back(expect_ident());
    } while (accept_punct(","));
    return out;
  }

  template <typename Enum>
  Enum choice(std::initializer_list<std::string_view> words,
              std::optional<Enum> (*parse)(std::string_view)) {
    for (std::string_view w : words) note(w);
    const Token& at = peek();
    if (at.kind == TokenKind::Keyword) {
      for (std::string_view w : words) {
        if (at.text == w) {
          ++pos_;
          return *parse(w);
        }
      }
    }
    fail();
  }

  // Token primitives. Every probe records what it looked for, so a failure
  // can list all alternatives tried at the furthest position.

  const Token& peek() const { return toks_[pos_]; }

  void note(std::string_view what) {
    if (pos_ > furthest_) {
      furthest_ = pos_;
      expected_.clear();
    }
    if (pos_ == furthest_) expected_.emplace(what);
  }

  [[noreturn]] void fail() const { throw SyntaxFailure{}; }

  bool accept_kw(std::string_view kw) {
    note(kw);
    if (peek().kind == TokenKind::Keyword && peek().text == kw) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail();
  }

  bool at_punct(std::string_view p) {
    note(p);
    return peek().kind == TokenKind::Punct && peek().text == p;
  }

  bool accept_punct(std::string_view p) {
    if (!at_punct(p)) return false;
    ++pos_;
    return true;
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail();
  }

  std::optional<std::string> accept_ident() {
    note(kExpectIdentifier);
    const Token& at = peek();
    if (at.kind == TokenKind::Ident || (at.kind == TokenKind::Keyword && is_soft_keyword(at.text))) {
      ++pos_;
      return at.text;
    }
    return std::nullopt;
  }

  std::string expect_ident() {
    auto id = accept_ident();
    if (!id) fail();
    return *std::move(id);
  }

  std::string expect_string() {
    note(kExpectString);
    if (peek().kind != TokenKind::String) fail();
    return toks_[pos_++].value;
  }

  void expect_end() {
    note(kExpectEnd);
    if (peek().kind != TokenKind::Eol) fail();
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
  std::size_t furthest_ = 0;
  std::set<std::string> expected_;
};

std::vector<Token> with_eol(std::vector<Token> tokens, std::size_t end) {
  tokens.push_back(Token{TokenKind::Eol, "", "", Span{end, end}});
  return tokens;
}

/// Runs the statement parser, also reporting what could follow the last
/// token when the parse succeeds.
Analysis run_statement(std::span<const Token> tokens) {
  Parser p(tokens);
  try {
    DslLine line = p.statement();
    auto tail = p.tail_expectations();
    tail.erase(std::string(kExpectEnd));
    return Analysis{std::move(line), std::move(tail)};
  } catch (const SyntaxFailure&) {
    return Analysis{p.error(), {}};
  } catch (const SemanticFailure& f) {
    return Analysis{f.error, {}};
  }
}

}  // namespace

Analysis analyze(std::string_view payload) {
  auto lexed = tokenize(payload);
  if (lexed) return run_statement(with_eol(std::move(lexed).value(), payload.size()));

  // Report the lexical error with the grammar's expectations at that column,
  // unless the text before it is already invalid.
  const ParseError& lex_error = lexed.error();
  auto before = tokenize(payload.substr(0, lex_error.position));
  if (!before) return Analysis{before.error(), {}};
  const auto tokens = with_eol(std::move(before).value(), lex_error.position);

  Parser p(tokens);
  std::set<std::string> expected;
  try {
    p.statement();
    expected = p.tail_expectations();
  } catch (const SyntaxFailure&) {
    ParseError err = p.error();
    if (err.position < lex_error.position) return Analysis{std::move(err), {}};
    expected = std::move(err.expected);
  } catch (const SemanticFailure& f) {
    return Analysis{f.error, {}};
  }
  if (expected.empty()) expected = lex_error.expected;
  return Analysis{ParseError{lex_error.position, lex_error.found, std::move(expected),
                             lex_error.message},
                  {}};
}

Result<DslLine, ParseError> parse_line(std::string_view payload) {
  return analyze(payload).result;
}

Result<CondExpr, ParseError> parse_condition(std::span<const Token> tokens) {
  std::vector<Token> owned(tokens.begin(), tokens.end());
  if (owned.empty() || owned.back().kind != TokenKind::Eol) {
    const std::size_t end = owned.empty() ? 0 : owned.back().span.end;
    owned = with_eol(std::move(owned), end);
  }
  Parser p(owned);
  try {
    return p.condition_only();
  } catch (const SyntaxFailure&) {
    return p.error();
  } catch (const SemanticFailure& f) {
    return f.error;
  }
}

}  // namespace tabledsl::parser
