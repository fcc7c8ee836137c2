#include "config_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "jca/errors.hpp"

namespace jca::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

std::vector<ConfigEntry> parse_config(const std::string& text, const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError(FormatError::Kind::Malformed,
                        source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    std::replace(e.key.begin(), e.key.end(), '_', '-');
    if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
      e.value = e.value.substr(1, e.value.size() - 2);
    }
    if (!seen.insert(e.key).second) {
      throw FormatError(FormatError::Kind::Malformed,
                        source + ":" + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string format_config(const std::vector<ConfigEntry>& entries) {
  std::string out;
  for (const auto& e : entries) out += e.key + " = " + e.value + "\n";
  return out;
}

}  // namespace jca::cli
