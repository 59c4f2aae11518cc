#include <algorithm>
#include <array>
#include <cstdio>

#include "tabledsl/parser.hpp"

namespace tabledsl::parser {
namespace {

constexpr std::array<std::string_view, 52> kKeywords{
    "and",         "append_col",   "append_row",   "apply",          "apply_fun",
    "as",          "bool",         "by",           "cols",           "count",
    "csv",         "default",      "describe",     "drop_cols",      "drop_duplicates",
    "drop_rows",   "fill_with",    "float",        "group_by",       "in",
    "int",         "json",         "load",         "max",            "mean",
    "min",         "named",        "not",          "of",             "on",
    "on_missing",  "or",           "pandas",       "rename_cols",    "replace",
    "return_top_N", "rows",        "save",         "schema",         "select_cols",
    "select_rows", "show",         "sort_by",      "spark",          "start_session",
    "stop_session", "str",         "sum",          "target_code",    "to",
    "unique",      "with_schema"};

constexpr std::array<std::string_view, 15> kSoftKeywords{
    "bool", "cols", "csv",  "float", "int",  "json", "max",  "mean",
    "min",  "pandas", "rows", "spark", "str", "sum",  "unique"};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string printable(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x20 && u < 0x7f) return std::string(1, c);
  char buf[8];
  std::snprintf(buf, sizeof buf, "\\x%02x", u);
  return buf;
}

}  // namespace

bool is_token_class(std::string_view e) {
  return e == kExpectIdentifier || e == kExpectString || e == kExpectNumber || e == kExpectEnd;
}

std::span<const std::string_view> keywords() { return kKeywords; }

bool is_keyword(std::string_view word) {
  return std::binary_search(kKeywords.begin(), kKeywords.end(), word);
}

bool is_soft_keyword(std::string_view word) {
  return std::find(kSoftKeywords.begin(), kSoftKeywords.end(), word) != kSoftKeywords.end();
}

std::string ParseError::describe() const {
  std::string out = "expected {";
  bool first = true;
  for (const auto& e : expected) {
    if (!first) out += ", ";
    first = false;
    out += e;
  }
  out += "}, found ";
  out += found.empty() ? std::string(kExpectEnd) : "'" + found + "'";
  if (!message.empty()) out += " (" + message + ")";
  return out;
}

DslDetection detect_dsl_line(std::string_view line, std::string_view prefix) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (prefix.empty() || line.substr(i, prefix.size()) != prefix) return {};
  i += prefix.size();
  if (i < line.size() && line[i] == ' ') ++i;
  return {true, i};
}

Result<std::vector<Token>, ParseError> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    std::string text(src.substr(begin, end - begin));
    tokens.push_back(Token{kind, text, text, Span{begin, end}});
  };

  while (i < src.size()) {
    const char c = src[i];
    if (is_blank(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;

    if (is_alpha(c)) {
      while (i < src.size() && (is_alpha(src[i]) || is_digit(src[i]))) ++i;
      const auto word = src.substr(start, i - start);
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident, start, i);
      continue;
    }

    const bool signed_number =
        (c == '+' || c == '-') && i + 1 < src.size() && is_digit(src[i + 1]);
    if (is_digit(c) || signed_number) {
      if (signed_number) ++i;
      while (i < src.size() && is_digit(src[i])) ++i;
      if (i + 1 < src.size() && src[i] == '.' && is_digit(src[i + 1])) {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      push(TokenKind::Number, start, i);
      continue;
    }

    if (c == '\'') {
      std::string content;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        const char s = src[i];
        if (s == '\\' && i + 1 < src.size() && (src[i + 1] == '\'' || src[i + 1] == '\\')) {
          content += src[i + 1];
          i += 2;
          continue;
        }
        if (s == '\'') {
          closed = true;
          ++i;
          break;
        }
        content += s;
        ++i;
      }
      if (!closed)
        return ParseError{start, std::string(src.substr(start)), {"closing quote"},
                          "unterminated string literal"};
      tokens.push_back(
          Token{TokenKind::String, std::string(src.substr(start, i - start)), content, {start, i}});
      continue;
    }

    const auto two = src.substr(i, 2);
    if (two == "==" || two == "!=" || two == "<=" || two == ">=") {
      i += 2;
      push(TokenKind::Punct, start, i);
      continue;
    }
    if (c == '<' || c == '>' || c == '=' || c == ':' || c == ',' || c == '[' || c == ']') {
      ++i;
      push(TokenKind::Punct, start, i);
      continue;
    }

    return ParseError{start,
                      printable(c),
                      {"identifier", "keyword", "number", "string literal", "symbol"},
                      "illegal character"};
  }

  return tokens;
}

}  // namespace tabledsl::parser
