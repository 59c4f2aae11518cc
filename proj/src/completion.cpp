#include "tabledsl/completion.hpp"

#include <algorithm>
#include <set>

#include "tabledsl/parser.hpp"

namespace tabledsl::completion {
namespace {

using namespace ast;

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_operator_char(char c) { return c == '<' || c == '>' || c == '=' || c == '!'; }

struct IdentifierCollector {
  std::set<std::string>& out;

  void literal(const Literal& lit) const {
    if (lit.kind == Literal::Kind::Ident) out.insert(lit.text);
    for (const auto& item : lit.items) literal(item);
  }

  void cond(const CondExpr& c) const {
    if (const auto* cmp = std::get_if<Comparison>(&c.node)) {
      out.insert(cmp->column);
      literal(cmp->rhs);
    } else if (const auto* mem = std::get_if<Membership>(&c.node)) {
      out.insert(mem->column);
      for (const auto& v : mem->values) literal(v);
    } else {
      const auto& b = std::get<BoolExpr>(c.node);
      cond(*b.lhs);
      cond(*b.rhs);
    }
  }

  void names(const std::vector<std::string>& cols) const { out.insert(cols.begin(), cols.end()); }

  void operator()(const op::Load& o) const {
    literal(o.path);
    if (o.schema) out.insert(*o.schema);
  }
  void operator()(const op::Save& o) const { literal(o.path); }
  void operator()(const op::SelectCols& o) const { names(o.cols); }
  void operator()(const op::SelectRows& o) const { cond(o.cond); }
  void operator()(const op::DropCols& o) const { names(o.cols); }
  void operator()(const op::DropRows& o) const { cond(o.cond); }
  void operator()(const op::GroupBy& o) const { names(o.cols); }
  void operator()(const op::FillMissing& o) const { literal(o.value); }
  void operator()(const op::Replace& o) const {
    literal(o.old_value);
    literal(o.new_value);
  }
  void operator()(const op::ApplyFun& o) const { out.insert(o.fn); }
  void operator()(const op::AppendCol& o) const { out.insert(o.name); }
  void operator()(const op::AppendRow& o) const {
    out.insert(o.name);
    literal(o.default_value);
  }
  void operator()(const op::SortBy& o) const { out.insert(o.col); }
  void operator()(const op::RenameCols& o) const {
    for (const auto& [from, to] : o.pairs) {
      out.insert(from);
      out.insert(to);
    }
  }
  void operator()(const op::SchemaDef& o) const {
    for (const auto& f : o.fields) out.insert(f.first);
  }
  template <typename Other>
  void operator()(const Other&) const {}
};

CompletionItem preview_item(const DslLine& line, const codegen::GenContext& ctx) {
  const auto gen = codegen::generate(line, ctx);
  CompletionItem item;
  item.kind = ItemKind::Preview;
  item.insert_text = gen.code;
  if (gen.code.empty()) {
    item.label = "⇒ (no code)";
    for (const auto& w : gen.warnings) {
      if (!item.detail.empty()) item.detail += "; ";
      item.detail += w.message;
    }
  } else {
    item.label = "⇒ " + gen.code;
    item.detail = "generated " + std::string(keyword(ctx.target)) + " code";
  }
  return item;
}

}  // namespace

std::string_view to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::Keyword: return "keyword";
    case ItemKind::Preview: return "preview";
    case ItemKind::Identifier: return "identifier";
    case ItemKind::Hint: return "hint";
  }
  return "?";
}

// A comparison operator being typed counts as a word too, so "<" narrows
// the list to "<" and "<=".
std::size_t word_start(std::string_view line, std::size_t cursor) {
  cursor = std::min(cursor, line.size());
  if (cursor > 0 && is_operator_char(line[cursor - 1])) {
    while (cursor > 0 && is_operator_char(line[cursor - 1])) --cursor;
    return cursor;
  }
  while (cursor > 0 && is_word_char(line[cursor - 1])) --cursor;
  return cursor;
}

std::vector<CompletionItem> complete(std::string_view line, std::size_t cursor,
                                     const codegen::GenContext& ctx,
                                     const CompletionOptions& opts) {
  const auto detection = parser::detect_dsl_line(line, opts.prefix);
  cursor = std::min(cursor, line.size());
  if (!detection.is_dsl || cursor < detection.payload_offset) return {};

  const std::size_t offset = detection.payload_offset;
  const std::size_t word_begin = std::max(word_start(line, cursor), offset);
  const std::string_view partial = line.substr(word_begin, cursor - word_begin);
  const std::string_view before = line.substr(offset, word_begin - offset);

  std::vector<CompletionItem> items;
  if (auto full = parser::parse_line(line.substr(offset, cursor - offset)))
    items.push_back(preview_item(full.value(), ctx));

  std::set<std::string> expected;
  const auto analysis = parser::analyze(before);
  if (analysis.result.ok())
    expected = analysis.continuations;
  else if (analysis.result.error().position == before.size())
    expected = analysis.result.error().expected;

  std::vector<CompletionItem> rest;
  // Punctuation may follow a finished word without a space, so a complete
  // word under the cursor also gets the symbols that can come after it.
  if (!partial.empty() && is_word_char(partial.front())) {
    const auto after = parser::analyze(line.substr(offset, cursor - offset));
    std::set<std::string> next;
    if (after.result.ok())
      next = after.continuations;
    else if (after.result.error().position == cursor - offset)
      next = after.result.error().expected;
    for (const auto& e : next) {
      if (e == parser::kExpectEnd || parser::is_token_class(e) || parser::is_keyword(e)) continue;
      const KeywordDoc* doc = find_doc(e);
      rest.push_back({e, doc ? std::string(doc->summary) : std::string(), std::string(partial) + e, 0,
                      ItemKind::Keyword});
    }
  }
  for (const auto& e : expected) {
    if (e == parser::kExpectEnd) continue;
    if (parser::is_token_class(e)) {
      if (e == parser::kExpectIdentifier) {
        for (const auto& id : opts.known_identifiers)
          if (id.starts_with(partial) && parser::is_keyword(id) == parser::is_soft_keyword(id))
            rest.push_back({id, "defined earlier in this document", id, 0, ItemKind::Identifier});
      }
      if (partial.empty()) rest.push_back({e, "any " + e + " fits here", "", 0, ItemKind::Hint});
      continue;
    }
    if (!std::string_view(e).starts_with(partial)) continue;
    const KeywordDoc* doc = find_doc(e);
    rest.push_back({e, doc ? std::string(doc->summary) : std::string(), e, 0, ItemKind::Keyword});
  }

  std::stable_sort(rest.begin(), rest.end(),
                   [](const CompletionItem& a, const CompletionItem& b) { return a.label < b.label; });
  rest.erase(std::unique(rest.begin(), rest.end(),
                         [](const CompletionItem& a, const CompletionItem& b) {
                           return a.label == b.label && a.kind == b.kind;
                         }),
             rest.end());
  items.insert(items.end(), std::make_move_iterator(rest.begin()),
               std::make_move_iterator(rest.end()));
  for (std::size_t i = 0; i < items.size(); ++i) items[i].rank = static_cast<int>(i + 1);
  return items;
}

std::vector<std::string> collect_identifiers(std::span<const std::string> lines,
                                             std::string_view prefix, std::size_t before_line) {
  std::set<std::string> names;
  const IdentifierCollector collect{names};
  for (std::size_t i = 0; i < std::min(before_line, lines.size()); ++i) {
    const auto det = parser::detect_dsl_line(lines[i], prefix);
    if (!det.is_dsl) continue;
    const auto parsed = parser::parse_line(std::string_view(lines[i]).substr(det.payload_offset));
    if (!parsed) continue;
    const DslLine& line = parsed.value();
    if (line.assignment) names.insert(line.assignment->name);
    if (line.source) names.insert(line.source->name);
    for (const auto& op : line.chain) std::visit(collect, op);
  }
  return {names.begin(), names.end()};
}

}  // namespace tabledsl::completion
