#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "tabledsl/codegen.hpp"
#include "tabledsl/parser.hpp"
#include "tabledsl/transpile.hpp"

using namespace tabledsl;
using transpile::LineStatus;
using transpile::transpile_text;

namespace {

transpile::TranspileOptions opts(ast::Target t) { return {t, "##"}; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Straightforward reference: drop every marked line, then put each DSL
// line's code right after it, following target_code switches.
std::string reference_transpile(const std::string& text, ast::Target target) {
  std::string out;
  for (const auto& line : lines_of(text)) {
    if (line.find("# <tabledsl>") != std::string::npos && line.find("##") == std::string::npos) continue;
    out += line + "\n";
    const auto pos = line.find("## ");
    if (pos == std::string::npos || line.find_first_not_of(" \t") != pos) continue;
    const std::string payload = line.substr(pos + 3);
    if (payload.rfind("target_code = ", 0) == 0) {
      target = payload.substr(14) == "spark" ? ast::Target::Spark : ast::Target::Pandas;
      continue;
    }
    codegen::GenContext ctx;
    ctx.target = target;
    const auto code = codegen::generate(parser::parse_line(payload).value(), ctx).code;
    if (!code.empty()) out += line.substr(0, pos) + code + "  # <tabledsl>\n";
  }
  return out;
}

}  // namespace

TEST_CASE("generated line helpers") {
  CHECK(transpile::generated_line("    ", "df.show()") == "    df.show()  # <tabledsl>");
  CHECK(transpile::is_generated_line("x = 1  # <tabledsl>", "##"));
  CHECK(transpile::is_generated_line("x = 1  # <tabledsl>\r", "##"));
  CHECK_FALSE(transpile::is_generated_line("## on df : show  # <tabledsl>", "##"));
  CHECK_FALSE(transpile::is_generated_line("x = 1", "##"));
  CHECK(transpile::leading_indent("\t  x") == "\t  ");
  CHECK(transpile::leading_indent("   ") == "   ");
}

TEST_CASE("inserts code after DSL lines, keeping indentation") {
  const auto r = transpile_text("a = 1\n    ## on df : show\nb = 2\n", opts(ast::Target::Spark));
  REQUIRE(r.ok());
  CHECK(r.output == "a = 1\n    ## on df : show\n    df.show()  # <tabledsl>\nb = 2\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].line_no == 2);
  CHECK(r.records[0].status == LineStatus::Generated);
  CHECK(r.records[0].output == "df.show()");
  CHECK(r.records[0].payload_offset == 7);
}

TEST_CASE("replaces stale output and removes it when nothing is emitted") {
  const std::string text = "## on df : show\nold()  # <tabledsl>\n## stop_session\nold2()  # <tabledsl>\n";
  const auto r = transpile_text(text, opts(ast::Target::Pandas));
  REQUIRE(r.ok());
  CHECK(r.output == "## on df : show\nprint(df)  # <tabledsl>\n## stop_session\n");
  CHECK(r.records[1].status == LineStatus::EmptyEmission);
  CHECK(r.records[1].warnings.size() == 1);
}

TEST_CASE("target_code switches the target for the following lines") {
  const auto r =
      transpile_text("## on df : show\n## target_code = spark\n## on df : show\n", opts(ast::Target::Pandas));
  REQUIRE(r.ok());
  CHECK(r.output ==
        "## on df : show\nprint(df)  # <tabledsl>\n## target_code = spark\n## on df : show\ndf.show()  # <tabledsl>\n");
}

TEST_CASE("CRLF input keeps CRLF") {
  const auto r = transpile_text("## on df : show\r\nx = 1\r\n", opts(ast::Target::Spark));
  REQUIRE(r.ok());
  CHECK(r.output == "## on df : show\r\ndf.show()  # <tabledsl>\r\nx = 1\r\n");
  CHECK(transpile_text(r.output, opts(ast::Target::Spark)).output == r.output);
}

TEST_CASE("parse errors are reported with their position") {
  const auto r = transpile_text("x = 1\n  ## on df : bogus\n", opts(ast::Target::Pandas));
  CHECK_FALSE(r.ok());
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].status == LineStatus::ParseError);
  REQUIRE(r.records[0].error);
  CHECK(r.records[0].error->position == 8);
  CHECK(r.records[0].payload_offset == 5);
}

TEST_CASE("no trailing newline is preserved") {
  const auto r = transpile_text("## on df : count", opts(ast::Target::Pandas));
  CHECK(r.output == "## on df : count\ndf.count()  # <tabledsl>");
  CHECK(transpile_text("", opts(ast::Target::Pandas)).output.empty());
}

TEST_CASE("the mixed script") {
  const std::string text = support::read_text(support::source_path("tests/fixtures/mixed_script.py"));
  CHECK(lines_of(text).size() == 50);
  for (auto target : {ast::Target::Pandas, ast::Target::Spark}) {
    const auto once = transpile_text(text, opts(target));
    REQUIRE(once.ok());
    CHECK(once.output == reference_transpile(text, target));
    const auto twice = transpile_text(once.output, opts(target));
    REQUIRE(twice.ok());
    CHECK(twice.output == once.output);
    CHECK(once.output.find("stale = 1") == std::string::npos);
    CHECK(once.output.find("# ## not DSL") != std::string::npos);
  }
}

TEST_CASE("idempotence over random statements") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string text;
    for (int k = 0; k < 5; ++k) {
      text += std::string(rng() % 3 * 2, ' ') + "## " + ast::pretty_print(support::random_line(rng)) + "\n";
      if (rng() % 2) text += "y = 2\n";
    }
    for (auto target : {ast::Target::Pandas, ast::Target::Spark}) {
      const auto once = transpile_text(text, opts(target));
      REQUIRE(once.ok());
      CHECK(transpile_text(once.output, opts(target)).output == once.output);
    }
  }
}
