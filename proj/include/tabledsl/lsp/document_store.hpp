// Open documents as last seen by the server.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabledsl::lsp {

/// Columns are byte offsets into the line.
struct Position {
  std::size_t line = 0;
  std::size_t character = 0;
};

struct Range {
  Position start;
  Position end;
};

/// Without a range the text replaces the whole document.
struct ContentChange {
  std::optional<Range> range;
  std::string text;
};

struct Document {
  std::string language_id;
  std::int64_t version = 0;
  std::string text;
  std::vector<std::string> lines;
};

/// Splits on '\n'. A trailing newline yields a final empty line, so the
/// result always has at least one element.
std::vector<std::string> split_lines(std::string_view text);

class DocumentStore {
 public:
  void open(const std::string& uri, std::string language_id, std::int64_t version, std::string text);

  /// Applies the changes in order. Returns an error message and leaves the
  /// document as it was when the uri is unknown or `version` does not
  /// exceed the stored one.
  std::optional<std::string> change(const std::string& uri, std::int64_t version,
                                    std::span<const ContentChange> changes);

  void close(const std::string& uri);
  const Document* find(const std::string& uri) const;
  const std::map<std::string, Document>& all() const { return docs_; }

 private:
  std::map<std::string, Document> docs_;
};

}  // namespace tabledsl::lsp
