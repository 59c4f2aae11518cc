#include "tabledsl/codegen.hpp"

namespace tabledsl::codegen {
namespace {

using namespace ast;

std::string render_leaf(const CondExpr& cond, const std::string& df) {
  if (const auto* cmp = std::get_if<Comparison>(&cond.node))
    return "(" + df + "." + cmp->column + " " + std::string(keyword(cmp->op)) + " " +
           render_literal(cmp->rhs) + ")";
  const auto& mem = std::get<Membership>(cond.node);
  return std::string(mem.negated ? "(~" : "(") + df + "." + mem.column + ".isin(" +
         render_literal(Literal::list(mem.values)) + "))";
}

std::string render_unwrapped(const CondExpr& cond, const std::string& df) {
  const auto* b = std::get_if<BoolExpr>(&cond.node);
  if (!b) return render_leaf(cond, df);
  const char* sym = b->kind == BoolKind::And ? " & " : " | ";
  auto side = [&](const CondExpr& c) {
    return std::holds_alternative<BoolExpr>(c.node) ? "(" + render_unwrapped(c, df) + ")"
                                                    : render_leaf(c, df);
  };
  return side(*b->lhs) + sym + side(*b->rhs);
}

/// Threads the expression through the chain, one backend hook per op.
struct ChainWalker {
  const Backend& backend;
  const GenContext& ctx;
  const std::string& source;  // dataframe conditions refer to

  std::optional<std::string> operator()(const std::string&, const op::Load& o) const {
    return backend.load(o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::Save& o) const {
    return backend.save(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::SelectCols& o) const {
    return backend.select_cols(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::SelectRows& o) const {
    return backend.filter(df, render_filter_condition(o.cond, source, ctx));
  }
  std::optional<std::string> operator()(const std::string& df, const op::DropCols& o) const {
    return backend.drop_cols(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::DropRows& o) const {
    return backend.filter(df, "~" + render_condition(o.cond, source, ctx));
  }
  std::optional<std::string> operator()(const std::string& df, const op::GroupBy& o) const {
    return backend.group_by(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::FillMissing& o) const {
    return backend.fill_missing(df, render_literal(o.value));
  }
  std::optional<std::string> operator()(const std::string& df, const op::DropMissing&) const {
    return backend.drop_missing(df);
  }
  std::optional<std::string> operator()(const std::string& df, const op::Replace& o) const {
    return backend.replace(df, render_literal(o.old_value), render_literal(o.new_value));
  }
  std::optional<std::string> operator()(const std::string& df, const op::ApplyFun& o) const {
    return backend.apply_fun(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::AppendCol& o) const {
    return backend.append_col(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::AppendRow& o) const {
    return backend.append_row(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::SortBy& o) const {
    return backend.sort_by(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::DropDuplicates&) const {
    return backend.drop_duplicates(df);
  }
  std::optional<std::string> operator()(const std::string& df, const op::RenameCols& o) const {
    return backend.rename_cols(df, o);
  }
  std::optional<std::string> operator()(const std::string& df, const op::Show&) const {
    return backend.show(df);
  }
  std::optional<std::string> operator()(const std::string& df, const op::Describe&) const {
    return backend.describe(df);
  }
  std::optional<std::string> operator()(const std::string& df, const op::ReturnTopN& o) const {
    return backend.head(df, o.n);
  }
  std::optional<std::string> operator()(const std::string& df, const op::Count&) const {
    return backend.count(df);
  }
  std::optional<std::string> operator()(const std::string&, const op::StartSession& o) const {
    return backend.start_session(o);
  }
  std::optional<std::string> operator()(const std::string&, const op::StopSession&) const {
    return backend.stop_session();
  }
  std::optional<std::string> operator()(const std::string&, const op::SchemaDef& o) const {
    return backend.schema(o);
  }
  std::optional<std::string> operator()(const std::string&, const op::TargetOption&) const {
    return std::nullopt;
  }
};

}  // namespace

std::string py_quote(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

std::string render_literal(const Literal& lit) {
  switch (lit.kind) {
    case Literal::Kind::Ident:
    case Literal::Kind::Num:
      return lit.text;
    case Literal::Kind::Str:
      return py_quote(lit.text);
    case Literal::Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < lit.items.size(); ++i) {
        if (i) out += ", ";
        out += render_literal(lit.items[i]);
      }
      return out + "]";
    }
  }
  return {};
}

std::string render_condition(const CondExpr& cond, const std::string& df, const GenContext&) {
  if (std::holds_alternative<BoolExpr>(cond.node)) return "(" + render_unwrapped(cond, df) + ")";
  return render_leaf(cond, df);
}

std::string render_filter_condition(const CondExpr& cond, const std::string& df,
                                    const GenContext&) {
  return render_unwrapped(cond, df);
}

std::string render_schema(const std::vector<std::pair<std::string, DslType>>& fields,
                          const GenContext&) {
  auto spark_type = [](DslType t) -> std::string_view {
    switch (t) {
      case DslType::Int: return "IntegerType()";
      case DslType::Str: return "StringType()";
      case DslType::Float: return "FloatType()";
      case DslType::Bool: return "BooleanType()";
    }
    return "StringType()";
  };
  std::string out = "StructType([";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ", ";
    out += "StructField(" + py_quote(fields[i].first) + ", " +
           std::string(spark_type(fields[i].second)) + ", True)";
  }
  return out + "])";
}

std::string Backend::replace(const std::string& df, const std::string& old_value,
                             const std::string& new_value) const {
  return df + ".replace(" + old_value + ", " + new_value + ")";
}

std::string Backend::head(const std::string& df, std::uint64_t n) const {
  return df + ".head(" + std::to_string(n) + ")";
}

std::string Backend::count(const std::string& df) const { return df + ".count()"; }

std::string Backend::unsupported_reason(const ChainOp& op) const {
  const std::string kw(op_keyword(op));
  if (std::holds_alternative<op::TargetOption>(op))
    return "target_code only switches the generation target";
  if (std::holds_alternative<op::ApplyFun>(op) && target() == Target::Spark)
    return "apply_fun requires a UDF; write it directly";
  if (const auto* load = std::get_if<op::Load>(&op); load && load->schema)
    return "load with_schema is Spark-only; no Pandas code emitted";
  if (target() == Target::Pandas) return kw + " is Spark-only; no Pandas code emitted";
  return kw + " is Pandas-only; no Spark code emitted";
}

GenResult Generator::generate(const DslLine& line) const {
  const std::string source = line.source ? line.source->name : std::string();
  const ChainWalker walker{backend_, backend_.context(), source};
  GenResult result;
  std::string expr = source;
  for (const ChainOp& op : line.chain) {
    auto next = std::visit([&](const auto& o) { return walker(expr, o); }, op);
    if (!next) {
      result.warnings.push_back({std::string(op_keyword(op)), backend_.unsupported_reason(op)});
      continue;
    }
    expr = *std::move(next);
  }
  if (!result.warnings.empty()) return result;
  result.code = line.assignment ? line.assignment->name + " = " + expr : expr;
  return result;
}

std::unique_ptr<Backend> make_backend(const GenContext& ctx) {
  if (ctx.target == Target::Spark) return std::make_unique<SparkBackend>(ctx);
  return std::make_unique<PandasBackend>(ctx);
}

GenResult generate(const DslLine& line, const GenContext& ctx) {
  const auto backend = make_backend(ctx);
  return Generator(*backend).generate(line);
}

}  // namespace tabledsl::codegen
