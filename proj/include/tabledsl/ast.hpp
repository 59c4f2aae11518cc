// Syntax tree for one DSL statement.
//
// A statement is an optional assignment, an optional source dataframe
// (`on df`) and a non-empty chain of operations joined by `:`:
//
//     x = on y : select_cols a, b, c : group_by b apply unique : show
//
// All node types are plain values. Condition trees share immutable
// children through shared_ptr<const>, so copies are cheap and safe to hand
// between threads.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tabledsl::ast {

//===----------------------------------------------------------------------===//
// Closed enumerations
//===----------------------------------------------------------------------===//

enum class Target { Pandas, Spark };
enum class FileFormat { Csv, Json };
enum class AggFn { Sum, Min, Max, Mean, Count, Unique };
enum class DslType { Int, Str, Float, Bool };
enum class Axis { Cols, Rows };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolKind { And, Or };

/// DSL spelling of each enumerator (`spark`, `csv`, `sum`, `==`, ...).
std::string_view keyword(Target t);
std::string_view keyword(FileFormat f);
std::string_view keyword(AggFn a);
std::string_view keyword(DslType t);
std::string_view keyword(Axis a);
std::string_view keyword(CmpOp op);
std::string_view keyword(BoolKind k);

std::optional<Target> parse_target(std::string_view word);
std::optional<FileFormat> parse_file_format(std::string_view word);
std::optional<AggFn> parse_agg_fn(std::string_view word);
std::optional<DslType> parse_dsl_type(std::string_view word);
std::optional<Axis> parse_axis(std::string_view word);
std::optional<CmpOp> parse_cmp_op(std::string_view symbol);

/// `[A-Za-z_][A-Za-z0-9_]*`
bool is_valid_identifier(std::string_view text);

//===----------------------------------------------------------------------===//
// Literals and conditions
//===----------------------------------------------------------------------===//

/// Value written in the DSL. Bare words stay identifiers and are emitted
/// verbatim so they can name host-language variables.
struct Literal {
  enum class Kind { Ident, Str, Num, List };

  Kind kind = Kind::Ident;
  std::string text;             ///< Ident name, unescaped Str content, or Num digits.
  std::vector<Literal> items;   ///< List elements; empty otherwise.

  static Literal ident(std::string name);
  static Literal str(std::string content);
  static Literal num(std::string digits);
  static Literal list(std::vector<Literal> elements);

  bool operator==(const Literal&) const = default;
};

struct CondExpr;
using CondPtr = std::shared_ptr<const CondExpr>;

struct Comparison {
  std::string column;
  CmpOp op = CmpOp::Eq;
  Literal rhs;

  bool operator==(const Comparison&) const = default;
};

struct Membership {
  std::string column;
  bool negated = false;
  std::vector<Literal> values;

  bool operator==(const Membership&) const = default;
};

struct BoolExpr {
  BoolKind kind = BoolKind::And;
  CondPtr lhs;
  CondPtr rhs;

  /// Deep comparison of both subtrees.
  bool operator==(const BoolExpr& other) const;
};

struct CondExpr {
  std::variant<Comparison, Membership, BoolExpr> node;

  bool operator==(const CondExpr&) const = default;
};

CondExpr make_cmp(std::string column, CmpOp op, Literal rhs);
CondExpr make_member(std::string column, bool negated, std::vector<Literal> values);
CondExpr make_bool(BoolKind kind, CondExpr lhs, CondExpr rhs);

//===----------------------------------------------------------------------===//
// Chain operations
//===----------------------------------------------------------------------===//

namespace op {

/// `load [as FMT] PATH [with_schema S]`. A missing format loads as csv.
struct Load {
  std::optional<FileFormat> format;
  Literal path;
  std::optional<std::string> schema;
  bool operator==(const Load&) const = default;
};
struct Save {
  FileFormat format = FileFormat::Csv;
  Literal path;
  bool operator==(const Save&) const = default;
};
struct SelectCols {
  std::vector<std::string> cols;
  bool operator==(const SelectCols&) const = default;
};
struct SelectRows {
  CondExpr cond;
  bool operator==(const SelectRows&) const = default;
};
struct DropCols {
  std::vector<std::string> cols;
  bool operator==(const DropCols&) const = default;
};
struct DropRows {
  CondExpr cond;
  bool operator==(const DropRows&) const = default;
};
struct GroupBy {
  std::vector<std::string> cols;
  AggFn agg = AggFn::Sum;
  bool operator==(const GroupBy&) const = default;
};
struct FillMissing {
  Literal value;
  bool operator==(const FillMissing&) const = default;
};
struct DropMissing {
  bool operator==(const DropMissing&) const = default;
};
struct Replace {
  Literal old_value;
  Literal new_value;
  bool operator==(const Replace&) const = default;
};
struct ApplyFun {
  std::string fn;
  Axis axis = Axis::Cols;
  bool operator==(const ApplyFun&) const = default;
};
struct AppendCol {
  std::string name;
  bool operator==(const AppendCol&) const = default;
};
struct AppendRow {
  std::string name;
  Literal default_value;
  bool operator==(const AppendRow&) const = default;
};
struct SortBy {
  std::string col;
  bool operator==(const SortBy&) const = default;
};
struct DropDuplicates {
  bool operator==(const DropDuplicates&) const = default;
};
struct RenameCols {
  std::vector<std::pair<std::string, std::string>> pairs;
  bool operator==(const RenameCols&) const = default;
};
struct Show {
  bool operator==(const Show&) const = default;
};
struct Describe {
  bool operator==(const Describe&) const = default;
};
struct ReturnTopN {
  std::uint64_t n = 1;
  bool operator==(const ReturnTopN&) const = default;
};
struct Count {
  bool operator==(const Count&) const = default;
};
struct StartSession {
  std::string name;
  bool operator==(const StartSession&) const = default;
};
struct StopSession {
  bool operator==(const StopSession&) const = default;
};
struct SchemaDef {
  std::vector<std::pair<std::string, DslType>> fields;
  bool operator==(const SchemaDef&) const = default;
};
struct TargetOption {
  Target target = Target::Pandas;
  bool operator==(const TargetOption&) const = default;
};

}  // namespace op

using ChainOp =
    std::variant<op::Load, op::Save, op::SelectCols, op::SelectRows, op::DropCols, op::DropRows,
                 op::GroupBy, op::FillMissing, op::DropMissing, op::Replace, op::ApplyFun,
                 op::AppendCol, op::AppendRow, op::SortBy, op::DropDuplicates, op::RenameCols,
                 op::Show, op::Describe, op::ReturnTopN, op::Count, op::StartSession,
                 op::StopSession, op::SchemaDef, op::TargetOption>;

/// Leading keyword of the operation (`select_cols`, `on_missing`, ...).
std::string_view op_keyword(const ChainOp& op);

/// show / describe / count / save: nothing may follow them in a chain.
bool is_terminal(const ChainOp& op);

/// target_code / start_session / stop_session / schema: a whole statement
/// on their own, never chained and never under `on df`.
bool is_standalone(const ChainOp& op);

//===----------------------------------------------------------------------===//
// Statement
//===----------------------------------------------------------------------===//

struct AssignTarget {
  std::string name;
  bool operator==(const AssignTarget&) const = default;
};

struct DataframeRef {
  std::string name;
  bool operator==(const DataframeRef&) const = default;
};

struct DslLine {
  std::optional<AssignTarget> assignment;
  std::optional<DataframeRef> source;
  std::vector<ChainOp> chain;

  bool operator==(const DslLine&) const = default;
};

/// Variant-by-variant, field-by-field equality.
bool structural_eq(const DslLine& a, const DslLine& b);

/// Returns a description of the first violated invariant, or nullopt when
/// the line is one the parser could have produced. Besides the per-type
/// invariants this requires condition trees in the grammar's normal form
/// (left-associative, `and` below `or`), since there are no parentheses to
/// express any other shape.
std::optional<std::string> validate(const DslLine& line);

/// Canonical text: single spaces, ` : ` between chain operations, `, `
/// between list items. Parsing the result gives back an equal tree.
std::string pretty_print(const DslLine& line);
std::string pretty_print(const CondExpr& cond);
std::string pretty_print(const Literal& lit);

}  // namespace tabledsl::ast
