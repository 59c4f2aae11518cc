#include <algorithm>
#include <array>

#include "tabledsl/completion.hpp"

namespace tabledsl::completion {
namespace {

// Sorted by keyword (byte order) for binary search.
constexpr std::array<KeywordDoc, 63> kDocs{{
    {"!=", "column differs from a value", "select_rows col1 != 0"},
    {",", "add another item to the list", "select_cols a, b"},
    {":", "pipe the result into another operation", "on df : select_cols a : count"},
    {"<", "column is less than a value", "select_rows col2 < 3"},
    {"<=", "column is at most a value", "select_rows col2 <= 3"},
    {"=", "assign the result to a variable", "result = on df : show"},
    {"==", "column equals a value", "select_rows col1 == m"},
    {">", "column is greater than a value", "select_rows col1 > 0"},
    {">=", "column is at least a value", "select_rows col1 >= 0"},
    {"[", "start a list of values", "col3 in [v1, v2]"},
    {"]", "close the list of values", "col3 in [v1, v2]"},
    {"and", "both conditions must hold", "select_rows col1 > 0 and col2 < 3"},
    {"append_col", "add a new, empty column", "on df : append_col col_name"},
    {"append_row", "add a row with a default value (Pandas only)",
     "on df : append_row col_name default 0"},
    {"apply", "aggregation applied to each group", "group_by col1 apply sum"},
    {"apply_fun", "apply a function over columns or rows", "on df : apply_fun f on cols"},
    {"as", "file format of the data", "load as csv 'data.csv'"},
    {"bool", "boolean column type", "schema flag of bool"},
    {"by", "replacement value", "replace old_value by new_value"},
    {"cols", "apply the function to each column", "apply_fun f on cols"},
    {"count", "count rows (or rows per group)", "on df : select_rows col1 == m : count"},
    {"csv", "comma-separated values file", "load as csv 'data.csv'"},
    {"default", "value used for the new row", "append_row col_name default 0"},
    {"describe", "summary statistics of the dataframe", "on df : describe"},
    {"drop_cols", "remove columns", "on df : drop_cols x, y"},
    {"drop_duplicates", "remove duplicated rows", "on df : drop_duplicates"},
    {"drop_rows", "remove rows matching a condition", "on df : drop_rows col1 > 0"},
    {"fill_with", "replace missing values by a value", "on_missing fill_with 0"},
    {"float", "floating point column type", "schema price of float"},
    {"group_by", "group rows and aggregate", "on df : group_by col1 apply sum"},
    {"in", "column value is one of a list", "select_rows col3 in [v1, v2]"},
    {"int", "integer column type", "schema age of int"},
    {"json", "JSON file", "load as json 'data.json'"},
    {"load", "read a dataframe from a file", "df = load as csv 'data.csv'"},
    {"max", "largest value per group", "group_by col1 apply max"},
    {"mean", "average value per group", "group_by col1 apply mean"},
    {"min", "smallest value per group", "group_by col1 apply min"},
    {"named", "application name of the session", "start_session named 'app'"},
    {"not", "negate a membership test", "select_rows col2 not in [v1, v2]"},
    {"of", "type of the schema field", "schema col1 of int"},
    {"on", "dataframe the operations run on", "result = on df : show"},
    {"on_missing", "handle missing values", "on df : on_missing drop_rows"},
    {"or", "either condition may hold", "select_rows col1 == m or col2 < 3"},
    {"pandas", "generate Pandas code", "target_code = pandas"},
    {"rename_cols", "rename columns", "on df : rename_cols c1 to p, c2 to q"},
    {"replace", "replace a value everywhere", "on df : replace old_value by new_value"},
    {"return_top_N", "first N rows", "on df : return_top_N 10"},
    {"rows", "apply the function to each row", "apply_fun f on rows"},
    {"save", "write the dataframe to a file", "on df : save as csv to 'out.csv'"},
    {"schema", "declare column names and types (Spark only)", "s = schema col1 of int"},
    {"select_cols", "keep only some columns", "on df : select_cols a, b, c"},
    {"select_rows", "keep rows matching a condition", "on df : select_rows col1 == m"},
    {"show", "print the dataframe", "on df : show"},
    {"sort_by", "sort rows by a column, ascending", "on df : sort_by col"},
    {"spark", "generate PySpark code", "target_code = spark"},
    {"start_session", "create a Spark session (Spark only)", "start_session named 'app'"},
    {"stop_session", "stop the Spark session (Spark only)", "stop_session"},
    {"str", "string column type", "schema name of str"},
    {"sum", "sum per group", "group_by col1 apply sum"},
    {"target_code", "choose the framework for generated code", "target_code = spark"},
    {"to", "destination or new name", "rename_cols c1 to p"},
    {"unique", "distinct values per group", "group_by col1 apply unique"},
    {"with_schema", "load using a declared schema (Spark only)",
     "df = load 'data.txt' with_schema s"},
}};

}  // namespace

std::span<const KeywordDoc> keyword_docs() { return kDocs; }

const KeywordDoc* find_doc(std::string_view keyword) {
  auto it = std::lower_bound(kDocs.begin(), kDocs.end(), keyword,
                             [](const KeywordDoc& d, std::string_view k) { return d.keyword < k; });
  if (it == kDocs.end() || it->keyword != keyword) return nullptr;
  return &*it;
}

}  // namespace tabledsl::completion
