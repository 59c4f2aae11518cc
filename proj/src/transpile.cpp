#include "tabledsl/transpile.hpp"

#include <algorithm>

namespace tabledsl::transpile {
namespace {

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> lines;
  for (;;) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace

std::string_view leading_indent(std::string_view line) {
  return line.substr(0, std::min(line.find_first_not_of(" \t"), line.size()));
}

bool is_generated_line(std::string_view line, std::string_view prefix) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
    line.remove_suffix(1);
  return line.ends_with(kGeneratedMarker) && !parser::detect_dsl_line(line, prefix).is_dsl;
}

std::string generated_line(std::string_view indent, std::string_view code) {
  std::string out(indent);
  out += code;
  out += "  ";
  out += kGeneratedMarker;
  return out;
}

std::string_view to_string(LineStatus status) {
  switch (status) {
    case LineStatus::Generated: return "generated";
    case LineStatus::EmptyEmission: return "empty-emission";
    case LineStatus::ParseError: return "parse-error";
  }
  return "?";
}

bool TranspileReport::ok() const {
  return std::none_of(records.begin(), records.end(),
                      [](const LineRecord& r) { return r.status == LineStatus::ParseError; });
}

TranspileReport transpile_text(std::string_view text, const TranspileOptions& opts) {
  const auto lines = split(text);
  TranspileReport report;
  std::vector<std::string> out;
  codegen::GenContext ctx;
  ctx.target = opts.target;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    out.emplace_back(line);
    const auto det = parser::detect_dsl_line(line, opts.prefix);
    if (!det.is_dsl) continue;

    std::string_view payload = line.substr(det.payload_offset);
    const bool crlf = payload.ends_with('\r');
    if (crlf) payload.remove_suffix(1);

    LineRecord rec;
    rec.line_no = i + 1;
    rec.dsl_text = payload;
    rec.payload_offset = det.payload_offset;

    auto parsed = parser::parse_line(payload);
    if (!parsed) {
      rec.status = LineStatus::ParseError;
      rec.error = parsed.error();
      report.records.push_back(std::move(rec));
      continue;
    }
    const ast::DslLine& dsl = parsed.value();
    if (dsl.chain.size() == 1)
      if (const auto* opt = std::get_if<ast::op::TargetOption>(&dsl.chain.front()))
        ctx.target = opt->target;

    const auto gen = codegen::generate(dsl, ctx);
    rec.warnings = gen.warnings;
    rec.output = gen.code;
    rec.status = gen.code.empty() ? LineStatus::EmptyEmission : LineStatus::Generated;

    const bool has_previous = i + 1 < lines.size() && is_generated_line(lines[i + 1], opts.prefix);
    if (has_previous) ++i;
    if (!gen.code.empty()) {
      out.push_back(generated_line(leading_indent(line), gen.code));
      if (crlf) out.back() += '\r';
    }
    report.records.push_back(std::move(rec));
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) report.output += '\n';
    report.output += out[i];
  }
  return report;
}

}  // namespace tabledsl::transpile
