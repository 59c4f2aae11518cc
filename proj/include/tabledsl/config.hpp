// Language server settings read from a key=value file.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "tabledsl/ast.hpp"
#include "tabledsl/result.hpp"

namespace tabledsl::config {

struct HubConfig {
  std::string dsl_prefix = "##";
  ast::Target default_target = ast::Target::Pandas;
  std::optional<std::string> downstream_cmd;  ///< Shell command line of a child server.
};

struct ConfigError {
  std::size_t line = 0;  ///< 1-based; 0 when the file itself could not be read.
  std::string message;
};

/// Lines are `key = value`; blank lines and lines starting with '#' are
/// skipped. Known keys: dsl_prefix, default_target, downstream_cmd.
Result<HubConfig, ConfigError> parse_config(std::string_view text);
Result<HubConfig, ConfigError> load_config_file(const std::string& path);

/// Uses `cli_path` when given, else $TABLEDSL_CONFIG, else the defaults.
Result<HubConfig, ConfigError> resolve_config(const std::optional<std::string>& cli_path);

}  // namespace tabledsl::config
