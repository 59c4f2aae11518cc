#include "tabledsl/ast.hpp"

#include <array>
#include <set>

namespace tabledsl::ast {
namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view word) {
  for (const auto& [text, value] : table)
    if (text == word) return value;
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view spell(const std::array<std::pair<std::string_view, Enum>, N>& table, Enum value) {
  for (const auto& [text, v] : table)
    if (v == value) return text;
  return "?";
}

constexpr std::array<std::pair<std::string_view, Target>, 2> kTargets{{
    {"pandas", Target::Pandas},
    {"spark", Target::Spark},
}};
constexpr std::array<std::pair<std::string_view, FileFormat>, 2> kFormats{{
    {"csv", FileFormat::Csv},
    {"json", FileFormat::Json},
}};
constexpr std::array<std::pair<std::string_view, AggFn>, 6> kAggFns{{
    {"sum", AggFn::Sum},
    {"min", AggFn::Min},
    {"max", AggFn::Max},
    {"mean", AggFn::Mean},
    {"count", AggFn::Count},
    {"unique", AggFn::Unique},
}};
constexpr std::array<std::pair<std::string_view, DslType>, 4> kTypes{{
    {"int", DslType::Int},
    {"str", DslType::Str},
    {"float", DslType::Float},
    {"bool", DslType::Bool},
}};
constexpr std::array<std::pair<std::string_view, Axis>, 2> kAxes{{
    {"cols", Axis::Cols},
    {"rows", Axis::Rows},
}};
constexpr std::array<std::pair<std::string_view, CmpOp>, 6> kCmpOps{{
    {"==", CmpOp::Eq},
    {"!=", CmpOp::Ne},
    {"<", CmpOp::Lt},
    {"<=", CmpOp::Le},
    {">", CmpOp::Gt},
    {">=", CmpOp::Ge},
}};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_decimal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  const std::size_t int_start = i;
  while (i < text.size() && is_digit(text[i])) ++i;
  if (i == int_start) return false;
  if (i == text.size()) return true;
  if (text[i] != '.') return false;
  const std::size_t frac_start = ++i;
  while (i < text.size() && is_digit(text[i])) ++i;
  return i > frac_start && i == text.size();
}

std::optional<std::string> check_scalar(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::Ident:
      if (!is_valid_identifier(lit.text)) return "invalid identifier literal '" + lit.text + "'";
      break;
    case Literal::Kind::Num:
      if (!is_decimal(lit.text)) return "invalid number literal '" + lit.text + "'";
      break;
    case Literal::Kind::Str:
      break;
    case Literal::Kind::List:
      return std::string("list literal not allowed here");
  }
  if (!lit.items.empty()) return std::string("scalar literal with list items");
  return std::nullopt;
}

std::optional<std::string> check_value(const Literal& lit) {
  if (lit.kind != Literal::Kind::List) return check_scalar(lit);
  if (lit.items.empty()) return std::string("empty list literal");
  for (const auto& item : lit.items)
    if (auto err = check_scalar(item)) return err;
  return std::nullopt;
}

std::optional<std::string> check_path(const Literal& lit) {
  if (lit.kind != Literal::Kind::Ident && lit.kind != Literal::Kind::Str)
    return std::string("path must be an identifier or string literal");
  return check_scalar(lit);
}

std::optional<std::string> check_ident(std::string_view name) {
  if (!is_valid_identifier(name)) return "invalid identifier '" + std::string(name) + "'";
  return std::nullopt;
}

std::optional<std::string> check_columns(const std::vector<std::string>& cols) {
  if (cols.empty()) return std::string("empty column list");
  for (const auto& c : cols)
    if (auto err = check_ident(c)) return err;
  return std::nullopt;
}

bool is_leaf(const CondExpr& c) { return !std::holds_alternative<BoolExpr>(c.node); }

std::optional<std::string> check_leaf(const CondExpr& c) {
  if (const auto* cmp = std::get_if<Comparison>(&c.node)) {
    if (auto err = check_ident(cmp->column)) return err;
    return check_scalar(cmp->rhs);
  }
  const auto& mem = std::get<Membership>(c.node);
  if (auto err = check_ident(mem.column)) return err;
  if (mem.values.empty()) return std::string("empty membership list");
  for (const auto& v : mem.values)
    if (auto err = check_scalar(v)) return err;
  return std::nullopt;
}

std::optional<std::string> check_and_level(const CondExpr& c) {
  const auto* b = std::get_if<BoolExpr>(&c.node);
  if (!b) return check_leaf(c);
  if (b->kind != BoolKind::And) return std::string("'or' nested below 'and'");
  if (!b->lhs || !b->rhs) return std::string("boolean node with missing operand");
  if (!is_leaf(*b->rhs)) return std::string("right operand of 'and' must be a leaf");
  if (auto err = check_and_level(*b->lhs)) return err;
  return check_leaf(*b->rhs);
}

std::optional<std::string> check_or_level(const CondExpr& c) {
  const auto* b = std::get_if<BoolExpr>(&c.node);
  if (!b || b->kind == BoolKind::And) return check_and_level(c);
  if (!b->lhs || !b->rhs) return std::string("boolean node with missing operand");
  if (auto err = check_or_level(*b->lhs)) return err;
  return check_and_level(*b->rhs);
}

struct OpValidator {
  std::optional<std::string> operator()(const op::Load& o) const {
    if (auto err = check_path(o.path)) return err;
    if (o.schema) return check_ident(*o.schema);
    return std::nullopt;
  }
  std::optional<std::string> operator()(const op::Save& o) const { return check_path(o.path); }
  std::optional<std::string> operator()(const op::SelectCols& o) const { return check_columns(o.cols); }
  std::optional<std::string> operator()(const op::SelectRows& o) const { return check_or_level(o.cond); }
  std::optional<std::string> operator()(const op::DropCols& o) const { return check_columns(o.cols); }
  std::optional<std::string> operator()(const op::DropRows& o) const { return check_or_level(o.cond); }
  std::optional<std::string> operator()(const op::GroupBy& o) const { return check_columns(o.cols); }
  std::optional<std::string> operator()(const op::FillMissing& o) const { return check_value(o.value); }
  std::optional<std::string> operator()(const op::DropMissing&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::Replace& o) const {
    if (auto err = check_value(o.old_value)) return err;
    return check_value(o.new_value);
  }
  std::optional<std::string> operator()(const op::ApplyFun& o) const { return check_ident(o.fn); }
  std::optional<std::string> operator()(const op::AppendCol& o) const { return check_ident(o.name); }
  std::optional<std::string> operator()(const op::AppendRow& o) const {
    if (auto err = check_ident(o.name)) return err;
    return check_value(o.default_value);
  }
  std::optional<std::string> operator()(const op::SortBy& o) const { return check_ident(o.col); }
  std::optional<std::string> operator()(const op::DropDuplicates&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::RenameCols& o) const {
    if (o.pairs.empty()) return std::string("empty rename list");
    std::set<std::string> seen;
    for (const auto& [from, to] : o.pairs) {
      if (auto err = check_ident(from)) return err;
      if (auto err = check_ident(to)) return err;
      if (!seen.insert(from).second) return "duplicate rename source '" + from + "'";
    }
    return std::nullopt;
  }
  std::optional<std::string> operator()(const op::Show&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::Describe&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::ReturnTopN& o) const {
    if (o.n < 1) return std::string("return_top_N needs a positive count");
    return std::nullopt;
  }
  std::optional<std::string> operator()(const op::Count&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::StartSession&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::StopSession&) const { return std::nullopt; }
  std::optional<std::string> operator()(const op::SchemaDef& o) const {
    if (o.fields.empty()) return std::string("empty schema");
    for (const auto& [name, type] : o.fields)
      if (auto err = check_ident(name)) return err;
    return std::nullopt;
  }
  std::optional<std::string> operator()(const op::TargetOption&) const { return std::nullopt; }
};

std::string quote(std::string_view content) {
  std::string out = "'";
  for (char c : content) {
    if (c == '\\' || c == '\'') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

template <typename Range, typename Fn>
std::string join(const Range& items, Fn&& render, std::string_view sep = ", ") {
  std::string out;
  bool first = true;
  for (const auto& item : items) {
    if (!first) out += sep;
    first = false;
    out += render(item);
  }
  return out;
}

std::string same(const std::string& s) { return s; }

struct OpPrinter {
  std::string operator()(const op::Load& o) const {
    std::string out = "load";
    if (o.format) out += " as " + std::string(keyword(*o.format));
    out += " " + pretty_print(o.path);
    if (o.schema) out += " with_schema " + *o.schema;
    return out;
  }
  std::string operator()(const op::Save& o) const {
    return "save as " + std::string(keyword(o.format)) + " to " + pretty_print(o.path);
  }
  std::string operator()(const op::SelectCols& o) const { return "select_cols " + join(o.cols, same); }
  std::string operator()(const op::SelectRows& o) const { return "select_rows " + pretty_print(o.cond); }
  std::string operator()(const op::DropCols& o) const { return "drop_cols " + join(o.cols, same); }
  std::string operator()(const op::DropRows& o) const { return "drop_rows " + pretty_print(o.cond); }
  std::string operator()(const op::GroupBy& o) const {
    return "group_by " + join(o.cols, same) + " apply " + std::string(keyword(o.agg));
  }
  std::string operator()(const op::FillMissing& o) const {
    return "on_missing fill_with " + pretty_print(o.value);
  }
  std::string operator()(const op::DropMissing&) const { return "on_missing drop_rows"; }
  std::string operator()(const op::Replace& o) const {
    return "replace " + pretty_print(o.old_value) + " by " + pretty_print(o.new_value);
  }
  std::string operator()(const op::ApplyFun& o) const {
    return "apply_fun " + o.fn + " on " + std::string(keyword(o.axis));
  }
  std::string operator()(const op::AppendCol& o) const { return "append_col " + o.name; }
  std::string operator()(const op::AppendRow& o) const {
    return "append_row " + o.name + " default " + pretty_print(o.default_value);
  }
  std::string operator()(const op::SortBy& o) const { return "sort_by " + o.col; }
  std::string operator()(const op::DropDuplicates&) const { return "drop_duplicates"; }
  std::string operator()(const op::RenameCols& o) const {
    return "rename_cols " +
           join(o.pairs, [](const auto& p) { return p.first + " to " + p.second; });
  }
  std::string operator()(const op::Show&) const { return "show"; }
  std::string operator()(const op::Describe&) const { return "describe"; }
  std::string operator()(const op::ReturnTopN& o) const {
    return "return_top_N " + std::to_string(o.n);
  }
  std::string operator()(const op::Count&) const { return "count"; }
  std::string operator()(const op::StartSession& o) const {
    return "start_session named " + quote(o.name);
  }
  std::string operator()(const op::StopSession&) const { return "stop_session"; }
  std::string operator()(const op::SchemaDef& o) const {
    return "schema " + join(o.fields, [](const auto& f) {
             return f.first + " of " + std::string(keyword(f.second));
           });
  }
  std::string operator()(const op::TargetOption& o) const {
    return "target_code = " + std::string(keyword(o.target));
  }
};

}  // namespace

std::string_view keyword(Target t) { return spell(kTargets, t); }
std::string_view keyword(FileFormat f) { return spell(kFormats, f); }
std::string_view keyword(AggFn a) { return spell(kAggFns, a); }
std::string_view keyword(DslType t) { return spell(kTypes, t); }
std::string_view keyword(Axis a) { return spell(kAxes, a); }
std::string_view keyword(CmpOp op) { return spell(kCmpOps, op); }
std::string_view keyword(BoolKind k) { return k == BoolKind::And ? "and" : "or"; }

std::optional<Target> parse_target(std::string_view w) { return lookup(kTargets, w); }
std::optional<FileFormat> parse_file_format(std::string_view w) { return lookup(kFormats, w); }
std::optional<AggFn> parse_agg_fn(std::string_view w) { return lookup(kAggFns, w); }
std::optional<DslType> parse_dsl_type(std::string_view w) { return lookup(kTypes, w); }
std::optional<Axis> parse_axis(std::string_view w) { return lookup(kAxes, w); }
std::optional<CmpOp> parse_cmp_op(std::string_view s) { return lookup(kCmpOps, s); }

bool is_valid_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(text.front())) return false;
  for (char c : text)
    if (!alpha(c) && !is_digit(c)) return false;
  return true;
}

Literal Literal::ident(std::string name) { return Literal{Kind::Ident, std::move(name), {}}; }
Literal Literal::str(std::string content) { return Literal{Kind::Str, std::move(content), {}}; }
Literal Literal::num(std::string digits) { return Literal{Kind::Num, std::move(digits), {}}; }
Literal Literal::list(std::vector<Literal> elements) {
  return Literal{Kind::List, {}, std::move(elements)};
}

bool BoolExpr::operator==(const BoolExpr& other) const {
  auto same_child = [](const CondPtr& a, const CondPtr& b) {
    if (!a || !b) return a == b;
    return *a == *b;
  };
  return kind == other.kind && same_child(lhs, other.lhs) && same_child(rhs, other.rhs);
}

CondExpr make_cmp(std::string column, CmpOp op, Literal rhs) {
  return CondExpr{Comparison{std::move(column), op, std::move(rhs)}};
}

CondExpr make_member(std::string column, bool negated, std::vector<Literal> values) {
  return CondExpr{Membership{std::move(column), negated, std::move(values)}};
}

CondExpr make_bool(BoolKind kind, CondExpr lhs, CondExpr rhs) {
  return CondExpr{BoolExpr{kind, std::make_shared<const CondExpr>(std::move(lhs)),
                           std::make_shared<const CondExpr>(std::move(rhs))}};
}

std::string_view op_keyword(const ChainOp& op) {
  static constexpr std::array<std::string_view, std::variant_size_v<ChainOp>> kNames{
      "load",        "save",         "select_cols",     "select_rows",   "drop_cols",
      "drop_rows",   "group_by",     "on_missing",      "on_missing",    "replace",
      "apply_fun",   "append_col",   "append_row",      "sort_by",       "drop_duplicates",
      "rename_cols", "show",         "describe",        "return_top_N",  "count",
      "start_session", "stop_session", "schema",        "target_code"};
  return kNames[op.index()];
}

bool is_terminal(const ChainOp& op) {
  return std::holds_alternative<op::Show>(op) || std::holds_alternative<op::Describe>(op) ||
         std::holds_alternative<op::Count>(op) || std::holds_alternative<op::Save>(op);
}

bool is_standalone(const ChainOp& op) {
  return std::holds_alternative<op::TargetOption>(op) ||
         std::holds_alternative<op::StartSession>(op) ||
         std::holds_alternative<op::StopSession>(op) || std::holds_alternative<op::SchemaDef>(op);
}

bool structural_eq(const DslLine& a, const DslLine& b) { return a == b; }

std::optional<std::string> validate(const DslLine& line) {
  if (line.chain.empty()) return std::string("empty operation chain");
  if (line.assignment)
    if (auto err = check_ident(line.assignment->name)) return err;
  if (line.source)
    if (auto err = check_ident(line.source->name)) return err;

  const ChainOp& first = line.chain.front();
  const bool starts_alone = is_standalone(first) || std::holds_alternative<op::Load>(first);
  if (starts_alone) {
    if (line.chain.size() != 1)
      return std::string(op_keyword(first)) + " must be the only operation of its statement";
    if (line.source) return std::string(op_keyword(first)) + " cannot follow 'on'";
    const bool assignable = std::holds_alternative<op::Load>(first) ||
                            std::holds_alternative<op::SchemaDef>(first);
    if (line.assignment && !assignable)
      return std::string(op_keyword(first)) + " cannot be assigned";
  } else if (!line.source) {
    return std::string("dataframe operations need 'on <dataframe>'");
  }

  for (std::size_t i = 0; i < line.chain.size(); ++i) {
    const ChainOp& op = line.chain[i];
    if (!starts_alone && (is_standalone(op) || std::holds_alternative<op::Load>(op)))
      return std::string(op_keyword(op)) + " cannot appear inside a chain";
    if (is_terminal(op) && i + 1 != line.chain.size())
      return std::string(op_keyword(op)) + " must be the last operation";
    if (auto err = std::visit(OpValidator{}, op)) return err;
  }
  return std::nullopt;
}

std::string pretty_print(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::Ident:
    case Literal::Kind::Num:
      return lit.text;
    case Literal::Kind::Str:
      return quote(lit.text);
    case Literal::Kind::List:
      return "[" + join(lit.items, [](const Literal& l) { return pretty_print(l); }) + "]";
  }
  return {};
}

std::string pretty_print(const CondExpr& cond) {
  if (const auto* cmp = std::get_if<Comparison>(&cond.node))
    return cmp->column + " " + std::string(keyword(cmp->op)) + " " + pretty_print(cmp->rhs);
  if (const auto* mem = std::get_if<Membership>(&cond.node))
    return mem->column + (mem->negated ? " not in [" : " in [") +
           join(mem->values, [](const Literal& l) { return pretty_print(l); }) + "]";
  const auto& b = std::get<BoolExpr>(cond.node);
  return pretty_print(*b.lhs) + " " + std::string(keyword(b.kind)) + " " + pretty_print(*b.rhs);
}

std::string pretty_print(const DslLine& line) {
  std::string out;
  if (line.assignment) out += line.assignment->name + " = ";
  if (line.source) out += "on " + line.source->name + " : ";
  out += join(line.chain, [](const ChainOp& op) { return std::visit(OpPrinter{}, op); }, " : ");
  return out;
}

}  // namespace tabledsl::ast
