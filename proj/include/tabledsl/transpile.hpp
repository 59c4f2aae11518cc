// Rewriting of scripts that carry DSL pseudo-comments.
//
// Each DSL line is followed by its generated code, tagged with a marker
// comment so that a later run replaces the line instead of adding another.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabledsl/ast.hpp"
#include "tabledsl/codegen.hpp"
#include "tabledsl/parser.hpp"

namespace tabledsl::transpile {

inline constexpr std::string_view kGeneratedMarker = "# <tabledsl>";

/// True when `line` is code emitted by an earlier run.
bool is_generated_line(std::string_view line, std::string_view prefix);
std::string generated_line(std::string_view indent, std::string_view code);
std::string_view leading_indent(std::string_view line);

enum class LineStatus { Generated, EmptyEmission, ParseError };
std::string_view to_string(LineStatus status);

struct LineRecord {
  std::size_t line_no = 0;  ///< 1-based, in the input.
  std::string dsl_text;     ///< Payload after the prefix.
  LineStatus status = LineStatus::Generated;
  std::string output;       ///< Generated code, empty unless Generated.
  std::optional<parser::ParseError> error;
  std::size_t payload_offset = 0;  ///< Column where the payload starts.
  std::vector<codegen::GenWarning> warnings;
};

struct TranspileReport {
  std::vector<LineRecord> records;
  std::string output;  ///< Rewritten text; meaningful only when ok().
  bool ok() const;
};

struct TranspileOptions {
  ast::Target target = ast::Target::Pandas;  ///< Until a target_code line says otherwise.
  std::string prefix = "##";
};

TranspileReport transpile_text(std::string_view text, const TranspileOptions& opts);

}  // namespace tabledsl::transpile
