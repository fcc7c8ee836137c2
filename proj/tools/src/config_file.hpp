#pragma once

#include <string>
#include <vector>

namespace jca::cli {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// "key = value" lines; '#' starts a comment. Keys are normalized to
/// kebab-case, surrounding quotes are stripped from values.
std::vector<ConfigEntry> parse_config(const std::string& text, const std::string& source);
std::vector<ConfigEntry> read_config(const std::string& path);

std::string format_config(const std::vector<ConfigEntry>& entries);

}  // namespace jca::cli
