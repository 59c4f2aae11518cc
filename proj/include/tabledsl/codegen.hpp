// Translation of DSL statements into Pandas or PySpark source text.
//
// `Generator` walks the tree and threads the growing expression through
// the chain; a backend subclass only says how each operation is spelled in
// its framework. Output is one Python statement without imports: `pd`,
// `spark` and helpers such as `lit` are assumed to be in scope.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabledsl/ast.hpp"

namespace tabledsl::codegen {

struct GenContext {
  ast::Target target = ast::Target::Pandas;
  std::string session_var = "spark";
  std::string module_alias_pandas = "pd";
};

struct GenWarning {
  std::string op;       ///< Keyword of the skipped operation.
  std::string message;
  bool operator==(const GenWarning&) const = default;
};

/// Empty `code` means the statement has no rendering for this target; the
/// warnings then name the operation(s) responsible.
struct GenResult {
  std::string code;
  std::vector<GenWarning> warnings;
};

/// Operation-by-operation renderer. Each hook gets the expression built so
/// far and returns the extended expression, or nullopt when the operation
/// has no equivalent in the framework.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual ast::Target target() const = 0;
  const GenContext& context() const { return ctx_; }

  virtual std::optional<std::string> load(const ast::op::Load& op) const = 0;
  virtual std::string save(const std::string& df, const ast::op::Save& op) const = 0;
  virtual std::string select_cols(const std::string& df, const ast::op::SelectCols& op) const = 0;
  virtual std::string filter(const std::string& df, const std::string& cond) const = 0;
  virtual std::string drop_cols(const std::string& df, const ast::op::DropCols& op) const = 0;
  virtual std::string group_by(const std::string& df, const ast::op::GroupBy& op) const = 0;
  virtual std::string fill_missing(const std::string& df, const std::string& value) const = 0;
  virtual std::string drop_missing(const std::string& df) const = 0;
  virtual std::optional<std::string> apply_fun(const std::string& df,
                                               const ast::op::ApplyFun& op) const = 0;
  virtual std::string append_col(const std::string& df, const ast::op::AppendCol& op) const = 0;
  virtual std::optional<std::string> append_row(const std::string& df,
                                                const ast::op::AppendRow& op) const = 0;
  virtual std::string sort_by(const std::string& df, const ast::op::SortBy& op) const = 0;
  virtual std::string drop_duplicates(const std::string& df) const = 0;
  virtual std::string rename_cols(const std::string& df, const ast::op::RenameCols& op) const = 0;
  virtual std::string show(const std::string& df) const = 0;
  virtual std::string describe(const std::string& df) const = 0;
  virtual std::optional<std::string> start_session(const ast::op::StartSession& op) const = 0;
  virtual std::optional<std::string> stop_session() const = 0;
  virtual std::optional<std::string> schema(const ast::op::SchemaDef& op) const = 0;

  // Renderings shared by both frameworks.
  virtual std::string replace(const std::string& df, const std::string& old_value,
                              const std::string& new_value) const;
  virtual std::string head(const std::string& df, std::uint64_t n) const;
  virtual std::string count(const std::string& df) const;

  /// Why an operation was skipped, for the warning text.
  virtual std::string unsupported_reason(const ast::ChainOp& op) const;

 protected:
  explicit Backend(GenContext ctx) : ctx_(std::move(ctx)) {}
  GenContext ctx_;
};

class PandasBackend final : public Backend {
 public:
  explicit PandasBackend(GenContext ctx) : Backend(std::move(ctx)) {}

  ast::Target target() const override { return ast::Target::Pandas; }
  std::optional<std::string> load(const ast::op::Load& op) const override;
  std::string save(const std::string& df, const ast::op::Save& op) const override;
  std::string select_cols(const std::string& df, const ast::op::SelectCols& op) const override;
  std::string filter(const std::string& df, const std::string& cond) const override;
  std::string drop_cols(const std::string& df, const ast::op::DropCols& op) const override;
  std::string group_by(const std::string& df, const ast::op::GroupBy& op) const override;
  std::string fill_missing(const std::string& df, const std::string& value) const override;
  std::string drop_missing(const std::string& df) const override;
  std::optional<std::string> apply_fun(const std::string& df,
                                       const ast::op::ApplyFun& op) const override;
  std::string append_col(const std::string& df, const ast::op::AppendCol& op) const override;
  std::optional<std::string> append_row(const std::string& df,
                                        const ast::op::AppendRow& op) const override;
  std::string sort_by(const std::string& df, const ast::op::SortBy& op) const override;
  std::string drop_duplicates(const std::string& df) const override;
  std::string rename_cols(const std::string& df, const ast::op::RenameCols& op) const override;
  std::string show(const std::string& df) const override;
  std::string describe(const std::string& df) const override;
  std::optional<std::string> start_session(const ast::op::StartSession& op) const override;
  std::optional<std::string> stop_session() const override;
  std::optional<std::string> schema(const ast::op::SchemaDef& op) const override;
};

class SparkBackend final : public Backend {
 public:
  explicit SparkBackend(GenContext ctx) : Backend(std::move(ctx)) {}

  ast::Target target() const override { return ast::Target::Spark; }
  std::optional<std::string> load(const ast::op::Load& op) const override;
  std::string save(const std::string& df, const ast::op::Save& op) const override;
  std::string select_cols(const std::string& df, const ast::op::SelectCols& op) const override;
  std::string filter(const std::string& df, const std::string& cond) const override;
  std::string drop_cols(const std::string& df, const ast::op::DropCols& op) const override;
  std::string group_by(const std::string& df, const ast::op::GroupBy& op) const override;
  std::string fill_missing(const std::string& df, const std::string& value) const override;
  std::string drop_missing(const std::string& df) const override;
  std::optional<std::string> apply_fun(const std::string& df,
                                       const ast::op::ApplyFun& op) const override;
  std::string append_col(const std::string& df, const ast::op::AppendCol& op) const override;
  std::optional<std::string> append_row(const std::string& df,
                                        const ast::op::AppendRow& op) const override;
  std::string sort_by(const std::string& df, const ast::op::SortBy& op) const override;
  std::string drop_duplicates(const std::string& df) const override;
  std::string rename_cols(const std::string& df, const ast::op::RenameCols& op) const override;
  std::string show(const std::string& df) const override;
  std::string describe(const std::string& df) const override;
  std::optional<std::string> start_session(const ast::op::StartSession& op) const override;
  std::optional<std::string> stop_session() const override;
  std::optional<std::string> schema(const ast::op::SchemaDef& op) const override;
};

/// Framework-agnostic part of code generation.
class Generator {
 public:
  explicit Generator(const Backend& backend) : backend_(backend) {}

  GenResult generate(const ast::DslLine& line) const;

 private:
  const Backend& backend_;
};

std::unique_ptr<Backend> make_backend(const GenContext& ctx);

/// Entry point: picks the backend for ctx.target and runs the generator.
GenResult generate(const ast::DslLine& line, const GenContext& ctx);

/// Condition as a boolean Series/Column expression over `df`; every leaf and
/// every and/or node is parenthesized.
std::string render_condition(const ast::CondExpr& cond, const std::string& df,
                             const GenContext& ctx);

/// Condition without the outer parentheses of a top-level and/or node, as it
/// appears inside `df[...]` or `df.filter(...)`.
std::string render_filter_condition(const ast::CondExpr& cond, const std::string& df,
                                    const GenContext& ctx);

/// `StructType([...])` for a schema definition. Spark only.
std::string render_schema(const std::vector<std::pair<std::string, ast::DslType>>& fields,
                          const GenContext& ctx);

/// Python spelling of a literal: identifiers and numbers verbatim, strings in
/// single quotes, lists in brackets.
std::string render_literal(const ast::Literal& lit);

/// Single-quoted Python string literal.
std::string py_quote(std::string_view text);

}  // namespace tabledsl::codegen
