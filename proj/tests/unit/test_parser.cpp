#include <doctest.h>

#include <chrono>
#include <random>
#include <regex>
#include <set>

#include "support.hpp"
#include "tabledsl/parser.hpp"

using namespace tabledsl;
using namespace tabledsl::ast;
using parser::TokenKind;

namespace {

// What a token looks like in an expected-set.
std::set<std::string> descriptions(const parser::Token& t) {
  switch (t.kind) {
    case TokenKind::Ident: return {std::string(parser::kExpectIdentifier)};
    case TokenKind::String: return {std::string(parser::kExpectString)};
    case TokenKind::Number: return {std::string(parser::kExpectNumber)};
    case TokenKind::Keyword:
      if (parser::is_soft_keyword(t.text)) return {t.text, std::string(parser::kExpectIdentifier)};
      return {t.text};
    default: return {t.text};
  }
}

// Independent lexer for the token-count oracle.
std::size_t hand_lexed_count(const std::string& s) {
  static const std::regex token(R"([A-Za-z_]\w*|[+-]?\d+(\.\d+)?|'([^'\\]|\\.)*'|==|!=|<=|>=|[<>=:,\[\]])");
  return static_cast<std::size_t>(
      std::distance(std::sregex_iterator(s.begin(), s.end(), token), std::sregex_iterator()));
}

// Precedence oracle: split on " or " first, then " and ", folding left.
CondExpr fold_condition(const std::string& text) {
  auto split = [](const std::string& s, const std::string& sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + sep.size())
      parts.push_back(s.substr(start, pos - start));
    parts.push_back(s.substr(start));
    return parts;
  };
  auto leaf = [](const std::string& s) {
    auto toks = parser::tokenize(s);
    REQUIRE(toks.ok());
    auto c = parser::parse_condition(toks.value());
    REQUIRE(c.ok());
    REQUIRE(std::holds_alternative<BoolExpr>(c.value().node) == false);
    return c.value();
  };
  std::optional<CondExpr> disj;
  for (const auto& conj_text : split(text, " or ")) {
    std::optional<CondExpr> conj;
    for (const auto& leaf_text : split(conj_text, " and ")) {
      CondExpr l = leaf(leaf_text);
      conj = conj ? make_bool(BoolKind::And, *conj, l) : l;
    }
    disj = disj ? make_bool(BoolKind::Or, *disj, *conj) : *conj;
  }
  return *disj;
}

CondExpr condition_of(const std::string& text) {
  auto toks = parser::tokenize(text);
  REQUIRE(toks.ok());
  auto c = parser::parse_condition(toks.value());
  REQUIRE_MESSAGE(c.ok(), text << ": " << (c.ok() ? "" : c.error().describe()));
  return c.value();
}

std::set<std::string> chain_keywords_in_fixtures() {
  std::set<std::string> out;
  for (const auto& s : support::load_statements("tests/fixtures/statements.txt")) {
    std::size_t pos = 0;
    while ((pos = s.find(" : ", pos)) != std::string::npos) {
      pos += 3;
      out.insert(s.substr(pos, s.find(' ', pos) - pos));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("detect_dsl_line") {
  auto d = parser::detect_dsl_line("## x = load as csv 'p'", "##");
  CHECK(d.is_dsl);
  CHECK(d.payload_offset == 3);
  CHECK_FALSE(parser::detect_dsl_line("# normal comment", "##").is_dsl);
  d = parser::detect_dsl_line("   ## on df : show", "##");
  CHECK(d.is_dsl);
  CHECK(d.payload_offset == 6);
  d = parser::detect_dsl_line("##on df : show", "##");
  CHECK(d.is_dsl);
  CHECK(d.payload_offset == 2);
  d = parser::detect_dsl_line("\t%% on df : show", "%%");
  CHECK(d.is_dsl);
  CHECK(d.payload_offset == 4);
  CHECK_FALSE(parser::detect_dsl_line("x = 1  ## on df : show", "##").is_dsl);
}

TEST_CASE("keyword vocabulary") {
  const auto kws = parser::keywords();
  CHECK(kws.size() == 52);
  CHECK(std::is_sorted(kws.begin(), kws.end()));
  CHECK(parser::is_keyword("return_top_N"));
  CHECK_FALSE(parser::is_keyword("Show"));
  CHECK(parser::is_soft_keyword("sum"));
  CHECK_FALSE(parser::is_soft_keyword("select_cols"));
}

TEST_CASE("tokenize") {
  auto t = parser::tokenize("select_cols a, b");
  REQUIRE(t.ok());
  REQUIRE(t.value().size() == 4);
  CHECK(t.value()[0].kind == TokenKind::Keyword);
  CHECK(t.value()[1].kind == TokenKind::Ident);
  CHECK(t.value()[2].kind == TokenKind::Punct);
  CHECK(t.value()[2].text == ",");
  CHECK(t.value()[3].text == "b");

  auto bad = parser::tokenize("'unterminated");
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().position == 0);
  CHECK(bad.error().expected == std::set<std::string>{"closing quote"});

  const std::string row = "col3 in [v1, v2, v3]";
  auto toks = parser::tokenize(row);
  REQUIRE(toks.ok());
  CHECK(toks.value().size() == hand_lexed_count(row));
  CHECK(toks.value().back().kind == TokenKind::Punct);
  CHECK(toks.value().back().text == "]");

  auto esc = parser::tokenize(R"('it\'s \\ ok' -3.25 +7)");
  REQUIRE(esc.ok());
  CHECK(esc.value()[0].value == R"(it's \ ok)");
  CHECK(esc.value()[1].text == "-3.25");
  CHECK(esc.value()[2].text == "+7");

  auto illegal = parser::tokenize("on df : show $");
  REQUIRE_FALSE(illegal.ok());
  CHECK(illegal.error().position == 13);
}

TEST_CASE("token spans reproduce the input") {
  for (const auto& s : support::load_statements("tests/fixtures/statements.txt")) {
    auto toks = parser::tokenize(s);
    REQUIRE(toks.ok());
    std::size_t prev_end = 0;
    std::string rebuilt;
    for (const auto& t : toks.value()) {
      REQUIRE(t.span.begin >= prev_end);
      rebuilt += s.substr(prev_end, t.span.begin - prev_end);
      CHECK(s.substr(t.span.begin, t.span.end - t.span.begin) == t.text);
      rebuilt += t.text;
      prev_end = t.span.end;
    }
    rebuilt += s.substr(prev_end);
    CHECK(rebuilt == s);
  }
}

TEST_CASE("parse_line on the generated-code table statements") {
  auto r = parser::parse_line("x = on y : select_cols a, b, c : count");
  REQUIRE(r.ok());
  const DslLine& line = r.value();
  CHECK(line.assignment == AssignTarget{"x"});
  CHECK(line.source == DataframeRef{"y"});
  REQUIRE(line.chain.size() == 2);
  CHECK(std::get<op::SelectCols>(line.chain[0]).cols == std::vector<std::string>{"a", "b", "c"});
  CHECK(std::holds_alternative<op::Count>(line.chain[1]));

  r = parser::parse_line("x = on y : select_rows col1 == m and col3 in [v1, v2, v3]");
  REQUIRE(r.ok());
  const CondExpr expected =
      make_bool(BoolKind::And, make_cmp("col1", CmpOp::Eq, Literal::ident("m")),
                make_member("col3", false,
                            {Literal::ident("v1"), Literal::ident("v2"), Literal::ident("v3")}));
  CHECK(std::get<op::SelectRows>(r.value().chain[0]).cond == expected);

  r = parser::parse_line("result = load 'some_path.txt' with_schema s");
  REQUIRE(r.ok());
  const auto& load = std::get<op::Load>(r.value().chain[0]);
  CHECK_FALSE(load.format.has_value());
  CHECK(load.path == Literal::str("some_path.txt"));
  CHECK(load.schema == "s");
}

TEST_CASE("expected set after the pipe lists every chain operation") {
  auto r = parser::parse_line("x = on y : ");
  REQUIRE_FALSE(r.ok());
  const auto oracle = chain_keywords_in_fixtures();
  CHECK(oracle.size() == 18);
  CHECK(r.error().expected == oracle);
  CHECK(r.error().position == 11);
}

TEST_CASE("condition precedence") {
  CHECK(condition_of("a == 1 or b < 3") ==
        make_bool(BoolKind::Or, make_cmp("a", CmpOp::Eq, Literal::num("1")),
                  make_cmp("b", CmpOp::Lt, Literal::num("3"))));
  for (const std::string text :
       {"a > 0 and b in [1, 2] or c == 5", "a == 1 or b == 2 and c == 3",
        "a == 1 and b == 2 and c == 3 or d not in [x] or e >= 'q'"}) {
    CAPTURE(text);
    CHECK(condition_of(text) == fold_condition(text));
  }
  const auto top = condition_of("a > 0 and b in [1,2] or c == 5");
  REQUIRE(std::holds_alternative<BoolExpr>(top.node));
  CHECK(std::get<BoolExpr>(top.node).kind == BoolKind::Or);

  auto toks = parser::tokenize("a ==");
  REQUIRE(toks.ok());
  auto err = parser::parse_condition(toks.value());
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().expected ==
        std::set<std::string>{std::string(parser::kExpectIdentifier), std::string(parser::kExpectString), std::string(parser::kExpectNumber)});

  toks = parser::tokenize("a");
  err = parser::parse_condition(toks.value());
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().expected == std::set<std::string>{"!=", "<", "<=", "==", ">", ">=", "in", "not"});
}

TEST_CASE("structured errors") {
  struct Case {
    std::string text;
    std::size_t position;
    std::string must_expect;
  };
  for (const auto& c : std::vector<Case>{
           {"x = on y : bogus", 11, "select_cols"},
           {"on df : rename_cols a to b, a to c", 28, std::string(parser::kExpectIdentifier)},
           {"on df : return_top_N 0", 21, "positive integer"},
           {"on df : select_cols", 19, std::string(parser::kExpectIdentifier)},
           {"on df : show : count", 13, std::string(parser::kExpectEnd)},
           {"x = load as csv p : show", 18, std::string(parser::kExpectEnd)},
           {"df = convertColumn(df, columns, FloatType())", 5, "load"},
           {"df = rdd.apply(lambda x: x / 10).toDF()", 5, "load"},
           {"on df : select_rows col1 ~ 3", 25, "=="},
       }) {
    CAPTURE(c.text);
    auto r = parser::parse_line(c.text);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().position == c.position);
    CHECK(r.error().expected.count(c.must_expect) == 1);
    CHECK_FALSE(r.error().describe().empty());
  }
}

TEST_CASE("soft keywords work as names") {
  auto r = parser::parse_line("sum = on csv : group_by unique apply sum : show");
  REQUIRE(r.ok());
  CHECK(r.value().assignment->name == "sum");
  CHECK(r.value().source->name == "csv");
  CHECK(std::get<op::GroupBy>(r.value().chain[0]).cols == std::vector<std::string>{"unique"});
}

TEST_CASE("the next token of a fixture is always expected at each truncation point") {
  for (const auto& s : support::load_statements("tests/fixtures/statements.txt")) {
    auto toks = parser::tokenize(s);
    REQUIRE(toks.ok());
    for (const auto& t : toks.value()) {
      const std::string prefix = s.substr(0, t.span.begin);
      CAPTURE(prefix);
      const auto analysis = parser::analyze(prefix);
      std::set<std::string> expected;
      if (analysis.result.ok()) {
        expected = analysis.continuations;
      } else {
        CHECK(analysis.result.error().position == prefix.size());
        expected = analysis.result.error().expected;
      }
      bool found = false;
      for (const auto& d : descriptions(t)) found = found || expected.count(d);
      CHECK_MESSAGE(found, "next token '" << t.text << "' missing");
    }
  }
}

TEST_CASE("error position is at least the longest viable prefix") {
  std::mt19937 rng(7);
  const auto statements = support::load_statements("tests/fixtures/statements.txt");
  const std::string noise = "#$%&?@^`{}|~(); x0'";
  for (int i = 0; i < 2000; ++i) {
    std::string s = statements[rng() % statements.size()];
    s[rng() % s.size()] = noise[rng() % noise.size()];
    const auto r = parser::parse_line(s);
    if (r.ok()) continue;
    // Candidate prefixes end where the oracle lexer finishes a token, up to
    // the first character it cannot lex.
    static const std::regex token(R"(\s*([A-Za-z_]\w*|[+-]?\d+(\.\d+)?|'([^'\\]|\\.)*'|==|!=|<=|>=|[<>=:,\[\]]))");
    std::size_t viable = 0;
    std::size_t pos = 0;
    std::smatch m;
    while (pos < s.size() &&
           std::regex_search(s.cbegin() + static_cast<long>(pos), s.cend(), m, token,
                             std::regex_constants::match_continuous)) {
      pos += static_cast<std::size_t>(m.length(0));
      const auto a = parser::analyze(s.substr(0, pos));
      if (!a.result.ok() && a.result.error().position < pos) break;
      viable = pos;
    }
    CAPTURE(s);
    CHECK(r.error().position >= viable);
  }
}

TEST_CASE("fuzzing arbitrary bytes never crashes or hangs") {
  std::mt19937 rng(99);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 3000; ++i) {
    std::string s(rng() % 4097, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    const auto r = parser::parse_line(s);
    if (!r.ok()) {
      CHECK_FALSE(r.error().expected.empty());
      CHECK(r.error().position <= s.size());
    }
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(20));
}

TEST_CASE("determinism") {
  for (const auto& s : support::load_statements("tests/fixtures/statements.txt")) {
    const auto a = parser::parse_line(s);
    const auto b = parser::parse_line(s);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(structural_eq(a.value(), b.value()));
  }
}
