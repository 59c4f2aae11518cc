#include "tabledsl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "tabledsl/codegen.hpp"
#include "tabledsl/parser.hpp"

namespace tabledsl::corpus {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct EntryBuilder {
  CorpusEntry entry;
  bool has_id = false;
  bool in_expected = false;
  std::vector<std::string> expected_lines;
  bool empty() const { return !has_id && entry.line_no == 0; }
};

std::optional<CorpusError> finish(EntryBuilder& b, std::vector<CorpusEntry>& out) {
  if (b.empty()) return std::nullopt;
  auto& e = b.entry;
  while (!b.expected_lines.empty() && trim(b.expected_lines.back()).empty())
    b.expected_lines.pop_back();
  for (std::size_t i = 0; i < b.expected_lines.size(); ++i) {
    if (i) e.expected_code += '\n';
    e.expected_code += b.expected_lines[i];
  }
  if (!b.has_id) return CorpusError{e.line_no, "entry without id"};
  if (e.category == Category::NS && e.dsl)
    return CorpusError{e.line_no, "entry " + e.id + " is NS but has a dsl line"};
  if (e.category == Category::FT && !e.dsl)
    return CorpusError{e.line_no, "entry " + e.id + " is FT but has no dsl line"};
  out.push_back(std::move(e));
  b = EntryBuilder{};
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::FT: return "FT";
    case Category::CA: return "CA";
    case Category::CM: return "CM";
    case Category::NS: return "NS";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view text) {
  for (auto c : kCategories)
    if (to_string(c) == text) return c;
  return std::nullopt;
}

Result<Corpus, CorpusError> parse_corpus(std::string_view text) {
  Corpus corpus;
  bool has_target = false;
  EntryBuilder current;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto line = trim(raw);
    if (line == "---") {
      if (!has_target) return CorpusError{line_no, "missing 'target:' line before the first entry"};
      if (auto err = finish(current, corpus.entries)) return *err;
      continue;
    }
    if (current.in_expected) {
      current.expected_lines.push_back(raw);
      continue;
    }
    if (line.empty() || line.front() == '#') continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) return CorpusError{line_no, "expected 'field: value'"};
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));

    if (!has_target) {
      if (key != "target") return CorpusError{line_no, "corpus must start with 'target: pandas|spark'"};
      const auto target = ast::parse_target(value);
      if (!target) return CorpusError{line_no, "unknown target '" + std::string(value) + "'"};
      corpus.target = *target;
      has_target = true;
      continue;
    }
    if (current.entry.line_no == 0) current.entry.line_no = line_no;
    if (key == "id") {
      if (value.empty()) return CorpusError{line_no, "empty id"};
      current.entry.id = value;
      current.has_id = true;
    } else if (key == "description") {
      current.entry.description = value;
    } else if (key == "category") {
      const auto cat = parse_category(value);
      if (!cat) return CorpusError{line_no, "unknown category '" + std::string(value) + "'"};
      current.entry.category = cat;
    } else if (key == "dsl") {
      if (value.empty()) return CorpusError{line_no, "empty dsl field"};
      current.entry.dsl = std::string(value);
    } else if (key == "expected") {
      current.in_expected = true;
      if (!value.empty()) current.expected_lines.emplace_back(value);
    } else {
      return CorpusError{line_no, "unknown field '" + std::string(key) + "'"};
    }
  }
  if (!has_target) {
    if (trim(text).empty()) return corpus;
    return CorpusError{1, "missing 'target:' line"};
  }
  if (auto err = finish(current, corpus.entries)) return *err;
  return corpus;
}

std::vector<std::string> code_tokens(std::string_view code) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < code.size()) {
    const char c = code[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (is_word(c)) {
      std::size_t j = i;
      while (j < code.size() && is_word(code[j])) ++j;
      tokens.emplace_back(code.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      while (j < code.size() && code[j] != c) j += code[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, code.size());
      tokens.emplace_back(code.substr(i, j - i));
      i = j;
    } else {
      tokens.emplace_back(1, c);
      ++i;
    }
  }
  return tokens;
}

bool is_proper_token_subsequence(std::string_view part, std::string_view whole) {
  const auto p = code_tokens(part);
  const auto w = code_tokens(whole);
  if (p.size() >= w.size()) return false;
  std::size_t k = 0;
  for (const auto& tok : w)
    if (k < p.size() && tok == p[k]) ++k;
  return k == p.size();
}

bool CorpusReport::mismatch() const {
  return std::any_of(entries.begin(), entries.end(), [](const EntryResult& e) { return e.mismatch; });
}

CorpusReport classify(const Corpus& corpus) {
  CorpusReport report;
  report.target = corpus.target;
  codegen::GenContext ctx;
  ctx.target = corpus.target;

  for (const auto& entry : corpus.entries) {
    EntryResult r;
    r.id = entry.id;
    if (!entry.dsl) {
      r.computed = Category::NS;
    } else if (auto parsed = parser::parse_line(*entry.dsl)) {
      r.generated = codegen::generate(parsed.value(), ctx).code;
      if (!r.generated.empty() && r.generated == entry.expected_code)
        r.computed = Category::FT;
      else if (!r.generated.empty() && is_proper_token_subsequence(r.generated, entry.expected_code))
        r.computed = Category::CA;
      else
        r.computed = Category::CM;
    } else {
      r.mismatch = true;
      r.note = "dsl does not parse: " + parsed.error().describe();
    }

    r.counted = entry.category.value_or(r.computed.value_or(Category::CM));
    if (r.computed && r.computed != r.counted) {
      const bool ft_disagreement = *r.computed == Category::FT || r.counted == Category::FT;
      r.mismatch = r.mismatch || ft_disagreement;
      r.note = "labelled " + std::string(to_string(r.counted)) + ", heuristic says " +
               std::string(to_string(*r.computed));
    }
    ++report.counts[static_cast<std::size_t>(r.counted)];
    report.entries.push_back(std::move(r));
  }
  return report;
}

std::string format_report(const CorpusReport& report, std::string_view name) {
  static constexpr std::array<std::string_view, 4> kTitles{
      "Fully translated (FT)", "Code added (CA)", "Code modified (CM)", "DSL not suitable (NS)"};
  std::ostringstream out;
  out << name << " (" << ast::keyword(report.target) << ")\n";
  const std::size_t total = report.total();
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    const std::size_t n = report.counts[i];
    // Truncated, not rounded: 9/14 prints as 64.2%.
    const std::size_t tenths = total ? n * 1000 / total : 0;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%zu/%zu (%zu.%zu%%)", n, total, tenths / 10, tenths % 10);
    out << "  " << kTitles[i];
    for (std::size_t pad = kTitles[i].size(); pad < 24; ++pad) out << ' ';
    out << cell << "\n";
  }
  for (const auto& e : report.entries)
    if (!e.note.empty())
      out << "  " << (e.mismatch ? "mismatch" : "note") << " " << e.id << ": " << e.note << "\n";
  return out.str();
}

}  // namespace tabledsl::corpus
