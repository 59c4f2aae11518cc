#include "tabledsl/codegen.hpp"

namespace tabledsl::codegen {
namespace {

std::string quoted_list(const std::vector<std::string>& names) {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += py_quote(names[i]);
  }
  return out + "]";
}

}  // namespace

std::optional<std::string> PandasBackend::load(const ast::op::Load& op) const {
  if (op.schema) return std::nullopt;
  const auto format = op.format.value_or(ast::FileFormat::Csv);
  return ctx_.module_alias_pandas + ".read_" + std::string(ast::keyword(format)) + "(" +
         render_literal(op.path) + ")";
}

std::string PandasBackend::save(const std::string& df, const ast::op::Save& op) const {
  return df + ".to_" + std::string(ast::keyword(op.format)) + "(" + render_literal(op.path) + ")";
}

std::string PandasBackend::select_cols(const std::string& df, const ast::op::SelectCols& op) const {
  return df + "[" + quoted_list(op.cols) + "]";
}

std::string PandasBackend::filter(const std::string& df, const std::string& cond) const {
  return df + "[" + cond + "]";
}

std::string PandasBackend::drop_cols(const std::string& df, const ast::op::DropCols& op) const {
  return df + ".drop(columns=" + quoted_list(op.cols) + ")";
}

std::string PandasBackend::group_by(const std::string& df, const ast::op::GroupBy& op) const {
  std::string out = df + ".groupby(" + quoted_list(op.cols) + ")";
  if (op.agg == ast::AggFn::Unique) return out + ".agg(['unique'])";
  return out + "." + std::string(ast::keyword(op.agg)) + "()";
}

std::string PandasBackend::fill_missing(const std::string& df, const std::string& value) const {
  return df + ".fillna(" + value + ")";
}

std::string PandasBackend::drop_missing(const std::string& df) const { return df + ".dropna()"; }

std::optional<std::string> PandasBackend::apply_fun(const std::string& df,
                                                    const ast::op::ApplyFun& op) const {
  return df + ".apply(" + op.fn + ", axis=" + (op.axis == ast::Axis::Cols ? "0" : "1") + ")";
}

std::string PandasBackend::append_col(const std::string& df, const ast::op::AppendCol& op) const {
  return df + ".assign(" + op.name + "=None)";
}

std::optional<std::string> PandasBackend::append_row(const std::string& df,
                                                     const ast::op::AppendRow& op) const {
  return df + ".append({" + py_quote(op.name) + ": " + render_literal(op.default_value) +
         "}, ignore_index=True)";
}

std::string PandasBackend::sort_by(const std::string& df, const ast::op::SortBy& op) const {
  return df + ".sort_values(" + py_quote(op.col) + ")";
}

std::string PandasBackend::drop_duplicates(const std::string& df) const {
  return df + ".drop_duplicates()";
}

std::string PandasBackend::rename_cols(const std::string& df, const ast::op::RenameCols& op) const {
  std::string out = df + ".rename(columns={";
  for (std::size_t i = 0; i < op.pairs.size(); ++i) {
    if (i) out += ", ";
    out += py_quote(op.pairs[i].first) + ": " + py_quote(op.pairs[i].second);
  }
  return out + "})";
}

std::string PandasBackend::show(const std::string& df) const { return "print(" + df + ")"; }

std::string PandasBackend::describe(const std::string& df) const { return df + ".describe()"; }

std::optional<std::string> PandasBackend::start_session(const ast::op::StartSession&) const {
  return std::nullopt;
}

std::optional<std::string> PandasBackend::stop_session() const { return std::nullopt; }

std::optional<std::string> PandasBackend::schema(const ast::op::SchemaDef&) const {
  return std::nullopt;
}

}  // namespace tabledsl::codegen
