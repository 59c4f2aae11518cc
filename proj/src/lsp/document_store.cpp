#include "tabledsl/lsp/document_store.hpp"

#include <algorithm>

namespace tabledsl::lsp {
namespace {

std::size_t offset_of(const std::string& text, Position pos) {
  std::size_t offset = 0;
  for (std::size_t line = 0; line < pos.line; ++line) {
    const auto nl = text.find('\n', offset);
    if (nl == std::string::npos) return text.size();
    offset = nl + 1;
  }
  const auto nl = text.find('\n', offset);
  const std::size_t line_end = nl == std::string::npos ? text.size() : nl;
  return std::min(offset + pos.character, line_end);
}

}  // namespace

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  for (;;) {
    const auto nl = text.find('\n');
    lines.emplace_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

void DocumentStore::open(const std::string& uri, std::string language_id, std::int64_t version,
                         std::string text) {
  Document doc{std::move(language_id), version, std::move(text), {}};
  doc.lines = split_lines(doc.text);
  docs_[uri] = std::move(doc);
}

std::optional<std::string> DocumentStore::change(const std::string& uri, std::int64_t version,
                                                 std::span<const ContentChange> changes) {
  const auto it = docs_.find(uri);
  if (it == docs_.end()) return "document " + uri + " is not open";
  Document& doc = it->second;
  if (version <= doc.version)
    return "version " + std::to_string(version) + " of " + uri + " is not newer than " +
           std::to_string(doc.version);

  std::string text = doc.text;
  for (const auto& change : changes) {
    if (!change.range) {
      text = change.text;
      continue;
    }
    const std::size_t begin = offset_of(text, change.range->start);
    const std::size_t end = std::max(begin, offset_of(text, change.range->end));
    text.replace(begin, end - begin, change.text);
  }
  doc.version = version;
  doc.text = std::move(text);
  doc.lines = split_lines(doc.text);
  return std::nullopt;
}

void DocumentStore::close(const std::string& uri) { docs_.erase(uri); }

const Document* DocumentStore::find(const std::string& uri) const {
  const auto it = docs_.find(uri);
  return it == docs_.end() ? nullptr : &it->second;
}

}  // namespace tabledsl::lsp
