#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jca/data.hpp"
#include "jca/errors.hpp"

namespace jca {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<FrameLabel> parse_labels(const std::string& text, const std::string& source) {
  std::vector<FrameLabel> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(trim(field));
    FrameLabel label;
    if (fields.size() != 3 || !parse_number(fields[0], label.frame) ||
        !parse_number(fields[1], label.valence) || !parse_number(fields[2], label.arousal)) {
      throw FormatError(FormatError::Kind::Malformed,
                        source + ":" + std::to_string(line_no) +
                            ": expected 'frame_index,valence,arousal', got '" + line + "'");
    }
    if (label.valence == kUnannotatedLabel || label.arousal == kUnannotatedLabel) continue;
    for (double v : {label.valence, label.arousal}) {
      if (!(v >= -1.0 && v <= 1.0)) {
        throw FormatError(FormatError::Kind::OutOfRange,
                          source + ":" + std::to_string(line_no) + ": label " + fields[1] + "," +
                              fields[2] + " outside [-1, 1]");
      }
    }
    out.push_back(label);
  }
  return out;
}

std::vector<FrameLabel> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str(), path);
}

void write_labels(const std::string& path, const std::vector<FrameLabel>& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char buf[96];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", l.frame, l.valence, l.arousal);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace jca
