// Ranked completion suggestions for a cursor inside a DSL line.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabledsl/codegen.hpp"

namespace tabledsl::completion {

enum class ItemKind {
  Keyword,     ///< Keyword or symbol from the grammar's expected-set.
  Preview,     ///< Generated code for the complete line.
  Identifier,  ///< Name seen earlier in the same document.
  Hint,        ///< Placeholder for a token class ("identifier", "number", ...).
};

std::string_view to_string(ItemKind kind);

struct CompletionItem {
  std::string label;
  std::string detail;       ///< One-line documentation.
  std::string insert_text;
  int rank = 0;             ///< 1 is the top entry; ranks are contiguous.
  ItemKind kind = ItemKind::Keyword;
};

struct KeywordDoc {
  std::string_view keyword;
  std::string_view summary;
  std::string_view example;
};

/// Documentation for every keyword and grammar symbol.
std::span<const KeywordDoc> keyword_docs();
const KeywordDoc* find_doc(std::string_view keyword);

struct CompletionOptions {
  std::string prefix = "##";
  std::vector<std::string> known_identifiers;
};

/// Suggestions for `cursor_col` (byte offset) in `line_text`. When the
/// payload up to the cursor parses, the first item previews the generated
/// code. The rest come from the parser's expected-set just before the word
/// under the cursor, filtered by that word and sorted by label.
std::vector<CompletionItem> complete(std::string_view line_text, std::size_t cursor_col,
                                     const codegen::GenContext& ctx,
                                     const CompletionOptions& opts = {});

/// Start column of the identifier-like word that ends at `cursor_col`.
std::size_t word_start(std::string_view line_text, std::size_t cursor_col);

/// Assignment names, dataframe names, columns and schema fields used by the
/// DSL lines in `lines[0, before_line)`, sorted and unique.
std::vector<std::string> collect_identifiers(std::span<const std::string> lines,
                                             std::string_view prefix, std::size_t before_line);

}  // namespace tabledsl::completion
