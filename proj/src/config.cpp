#include "tabledsl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tabledsl::config {
namespace {

std::string_view trim(std::string_view s) {
  const auto blank = " \t\r";
  const auto b = s.find_first_not_of(blank);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(blank) - b + 1);
}

}  // namespace

Result<HubConfig, ConfigError> parse_config(std::string_view text) {
  HubConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) return ConfigError{line_no, "expected key = value"};
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "dsl_prefix") {
      if (value.empty()) return ConfigError{line_no, "dsl_prefix must not be empty"};
      cfg.dsl_prefix = value;
    } else if (key == "default_target") {
      const auto target = ast::parse_target(value);
      if (!target)
        return ConfigError{line_no, "default_target must be pandas or spark, got '" +
                                        std::string(value) + "'"};
      cfg.default_target = *target;
    } else if (key == "downstream_cmd") {
      if (value.empty())
        cfg.downstream_cmd.reset();
      else
        cfg.downstream_cmd = std::string(value);
    } else {
      return ConfigError{line_no, "unknown key '" + std::string(key) + "'"};
    }
  }
  return cfg;
}

Result<HubConfig, ConfigError> load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ConfigError{0, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  auto parsed = parse_config(buf.str());
  if (!parsed) {
    auto err = parsed.error();
    err.message = path + ":" + std::to_string(err.line) + ": " + err.message;
    return err;
  }
  return parsed;
}

Result<HubConfig, ConfigError> resolve_config(const std::optional<std::string>& cli_path) {
  if (cli_path) return load_config_file(*cli_path);
  if (const char* env = std::getenv("TABLEDSL_CONFIG"); env && *env)
    return load_config_file(env);
  return HubConfig{};
}

}  // namespace tabledsl::config
