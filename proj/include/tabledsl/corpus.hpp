// Coverage classification of processing steps against the DSL.
//
// A corpus file starts with `target: pandas|spark`, then lists entries
// separated by `---` lines:
//
//     id: S05
//     description: show the first rows
//     category: CA
//     dsl: on df : return_top_N 10
//     expected:
//     df.show(10)
//
// `expected` runs until the next separator; `dsl` is absent for steps the
// language cannot express.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabledsl/ast.hpp"
#include "tabledsl/result.hpp"

namespace tabledsl::corpus {

enum class Category { FT, CA, CM, NS };
inline constexpr std::array<Category, 4> kCategories{Category::FT, Category::CA, Category::CM,
                                                     Category::NS};
std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

struct CorpusEntry {
  std::string id;
  std::string description;
  std::optional<std::string> dsl;
  std::string expected_code;
  std::optional<Category> category;  ///< Curated label; overrides the heuristic.
  std::size_t line_no = 0;           ///< Line of the entry's first field.
};

struct Corpus {
  ast::Target target = ast::Target::Pandas;
  std::vector<CorpusEntry> entries;
};

struct CorpusError {
  std::size_t line = 0;
  std::string message;
};

Result<Corpus, CorpusError> parse_corpus(std::string_view text);

/// Python-ish tokens: words, numbers, quoted strings, single symbols.
std::vector<std::string> code_tokens(std::string_view code);

/// True when every token of `part` occurs in `whole` in order and `whole`
/// has more tokens.
bool is_proper_token_subsequence(std::string_view part, std::string_view whole);

struct EntryResult {
  std::string id;
  std::optional<Category> computed;  ///< Empty when the DSL line failed to parse.
  Category counted = Category::NS;
  std::string generated;
  std::string note;   ///< Set when heuristic and label disagree.
  bool mismatch = false;
};

struct CorpusReport {
  ast::Target target = ast::Target::Pandas;
  std::vector<EntryResult> entries;
  std::array<std::size_t, 4> counts{};
  std::size_t total() const { return entries.size(); }
  std::size_t count(Category c) const { return counts[static_cast<std::size_t>(c)]; }
  bool mismatch() const;
};

CorpusReport classify(const Corpus& corpus);

/// Category table with `n/total (pct%)` cells, percentages truncated to
/// one decimal.
std::string format_report(const CorpusReport& report, std::string_view name);

}  // namespace tabledsl::corpus
