#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gala/harness.hpp"

namespace gala {

// Raw `key = value` entries. Later assignments win.
using ConfigEntries = std::map<std::string, std::string>;

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

// Every recognized key with its default.
const std::vector<ConfigKey>& config_keys();

// '#' starts a comment; blank lines are skipped. Unknown keys and malformed
// lines raise BAD_CONFIG naming the key or line.
ConfigEntries parse_config(std::string_view text);
ConfigEntries read_config(const std::filesystem::path& path);

// Later maps override earlier ones.
ConfigEntries merge_config(ConfigEntries base, const ConfigEntries& overrides);

// Builds a spec from entries on top of the defaults. When `active_epochs` is
// not given it is spread evenly over the second half of training.
ExperimentSpec build_spec(const ConfigEntries& entries);

// Default config file text, one documented key per line.
std::string default_config_text();

}  // namespace gala
