#include "tabledsl/codegen.hpp"

namespace tabledsl::codegen {
namespace {

std::string quoted_args(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += py_quote(names[i]);
  }
  return out;
}

}  // namespace

std::optional<std::string> SparkBackend::load(const ast::op::Load& op) const {
  const auto format = op.format.value_or(ast::FileFormat::Csv);
  std::string out = ctx_.session_var + ".read." + std::string(ast::keyword(format)) + "(" +
                    render_literal(op.path);
  if (op.schema) out += ", schema=" + *op.schema;
  return out + ")";
}

std::string SparkBackend::save(const std::string& df, const ast::op::Save& op) const {
  return df + ".write." + std::string(ast::keyword(op.format)) + "(" + render_literal(op.path) +
         ")";
}

std::string SparkBackend::select_cols(const std::string& df, const ast::op::SelectCols& op) const {
  return df + ".select(" + quoted_args(op.cols) + ")";
}

std::string SparkBackend::filter(const std::string& df, const std::string& cond) const {
  return df + ".filter(" + cond + ")";
}

std::string SparkBackend::drop_cols(const std::string& df, const ast::op::DropCols& op) const {
  return df + ".drop(" + quoted_args(op.cols) + ")";
}

// FIXME: collect_set needs a concrete column; '*' is a placeholder the user
// has to replace until the DSL can name the aggregated column.
std::string SparkBackend::group_by(const std::string& df, const ast::op::GroupBy& op) const {
  std::string out = df + ".groupBy(" + quoted_args(op.cols) + ")";
  if (op.agg == ast::AggFn::Unique) return out + ".agg(collect_set('*'))";
  return out + "." + std::string(ast::keyword(op.agg)) + "()";
}

std::string SparkBackend::fill_missing(const std::string& df, const std::string& value) const {
  return df + ".na.fill(" + value + ")";
}

std::string SparkBackend::drop_missing(const std::string& df) const { return df + ".na.drop()"; }

std::optional<std::string> SparkBackend::apply_fun(const std::string&,
                                                   const ast::op::ApplyFun&) const {
  return std::nullopt;
}

std::string SparkBackend::append_col(const std::string& df, const ast::op::AppendCol& op) const {
  return df + ".withColumn(" + py_quote(op.name) + ", lit(None))";
}

std::optional<std::string> SparkBackend::append_row(const std::string&,
                                                    const ast::op::AppendRow&) const {
  return std::nullopt;
}

std::string SparkBackend::sort_by(const std::string& df, const ast::op::SortBy& op) const {
  return df + ".sort(" + py_quote(op.col) + ")";
}

std::string SparkBackend::drop_duplicates(const std::string& df) const {
  return df + ".dropDuplicates()";
}

std::string SparkBackend::rename_cols(const std::string& df, const ast::op::RenameCols& op) const {
  std::string out = df;
  for (const auto& [from, to] : op.pairs)
    out += ".withColumnRenamed(" + py_quote(from) + ", " + py_quote(to) + ")";
  return out;
}

std::string SparkBackend::show(const std::string& df) const { return df + ".show()"; }

std::string SparkBackend::describe(const std::string& df) const {
  return df + ".describe().show()";
}

std::optional<std::string> SparkBackend::start_session(const ast::op::StartSession& op) const {
  return ctx_.session_var + " = SparkSession.builder.appName(" + py_quote(op.name) +
         ").getOrCreate()";
}

std::optional<std::string> SparkBackend::stop_session() const {
  return ctx_.session_var + ".stop()";
}

std::optional<std::string> SparkBackend::schema(const ast::op::SchemaDef& op) const {
  return render_schema(op.fields, ctx_);
}

}  // namespace tabledsl::codegen
