// Lexer and LL(1) recursive-descent parser for one DSL line.
//
// Besides the tree, the parser reports which tokens would have been
// accepted at the point where it stopped. That expected-set is exact
// because the grammar needs only one token of lookahead, and it is what
// the completion engine offers to the user.

#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabledsl/ast.hpp"
#include "tabledsl/result.hpp"

namespace tabledsl::parser {

/// Descriptions used in expected-sets for token classes. Keywords and
/// punctuation appear as their own spelling.
inline constexpr std::string_view kExpectIdentifier = "identifier";
inline constexpr std::string_view kExpectString = "string literal";
inline constexpr std::string_view kExpectNumber = "number";
inline constexpr std::string_view kExpectEnd = "end of line";

/// True for the class descriptions above, false for keywords and symbols.
bool is_token_class(std::string_view expectation);

enum class TokenKind { Keyword, Ident, String, Number, Punct, Eol };

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct Token {
  TokenKind kind = TokenKind::Eol;
  std::string text;   ///< Exact source slice (quotes included for strings).
  std::string value;  ///< Unescaped content for strings, otherwise == text.
  Span span;
};

struct ParseError {
  std::size_t position = 0;        ///< Column in the payload, 0-based.
  std::string found;               ///< Offending text; empty at end of line.
  std::set<std::string> expected;  ///< Never empty.
  std::string message;             ///< Extra detail for semantic errors.

  /// "expected {a, b, c}" plus what was found.
  std::string describe() const;
};

/// Every keyword of the language, sorted.
std::span<const std::string_view> keywords();
bool is_keyword(std::string_view word);

/// Enumeration values (`csv`, `sum`, `int`, `cols`, `spark`, ...). They lex
/// as keywords but are accepted wherever an identifier is expected, since no
/// such position also admits the enumeration.
bool is_soft_keyword(std::string_view word);

struct DslDetection {
  bool is_dsl = false;
  std::size_t payload_offset = 0;
};

/// A line is DSL when, after leading blanks, it starts with `prefix`. The
/// payload begins after the prefix and at most one following space.
DslDetection detect_dsl_line(std::string_view line_text, std::string_view prefix);

/// Full tokenization. The returned list holds no Eol token; the parser
/// appends one at the payload length.
Result<std::vector<Token>, ParseError> tokenize(std::string_view payload);

Result<ast::DslLine, ParseError> parse_line(std::string_view payload);

/// Parses `tokens` as one complete condition. A trailing Eol token is
/// optional.
Result<ast::CondExpr, ParseError> parse_condition(std::span<const Token> tokens);

/// parse_line plus the tokens that could extend a successful parse. On
/// failure `continuations` is empty and the error carries the expected-set.
struct Analysis {
  Result<ast::DslLine, ParseError> result;
  std::set<std::string> continuations;
};
Analysis analyze(std::string_view payload);

}  // namespace tabledsl::parser
