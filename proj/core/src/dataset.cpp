#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "jca/data.hpp"
#include "jca/errors.hpp"

namespace fs = std::filesystem;

namespace jca {

SegmentResult segment(const std::string& id, const Matrix& audio, const Matrix& visual,
                      const std::vector<FrameLabel>& labels, std::size_t clip_len,
                      std::size_t clips_per_subsequence) {
  if (clip_len < 1 || clips_per_subsequence < 1) {
    throw ConfigError("clip length and clips per sub-sequence must be positive");
  }
  const std::size_t frames = audio.rows();
  if (visual.rows() != frames || labels.size() != frames) {
    throw ShapeError(id + ": frame counts differ (audio " + std::to_string(frames) +
                     ", visual " + std::to_string(visual.rows()) + ", labels " +
                     std::to_string(labels.size()) + ")");
  }
  SegmentResult result;
  const std::size_t span = clip_len * clips_per_subsequence;
  const std::size_t count = frames / span;
  result.dropped_frames = frames - count * span;
  if (count == 0) {
    result.warnings.push_back(id + ": " + std::to_string(frames) +
                              " frames is fewer than one sub-sequence (" + std::to_string(span) +
                              " frames); skipped");
    return result;
  }
  const double inv = 1.0 / static_cast<double>(clip_len);
  for (std::size_t s = 0; s < count; ++s) {
    Matrix a(clips_per_subsequence, audio.cols());
    Matrix v(clips_per_subsequence, visual.cols());
    std::vector<double> val(clips_per_subsequence, 0.0);
    std::vector<double> aro(clips_per_subsequence, 0.0);
    for (std::size_t c = 0; c < clips_per_subsequence; ++c) {
      const std::size_t first = s * span + c * clip_len;
      for (std::size_t f = first; f < first + clip_len; ++f) {
        for (std::size_t j = 0; j < audio.cols(); ++j) a(c, j) += audio(f, j);
        for (std::size_t j = 0; j < visual.cols(); ++j) v(c, j) += visual(f, j);
        val[c] += labels[f].valence;
        aro[c] += labels[f].arousal;
      }
      for (std::size_t j = 0; j < a.cols(); ++j) a(c, j) *= inv;
      for (std::size_t j = 0; j < v.cols(); ++j) v(c, j) *= inv;
      val[c] *= inv;
      aro[c] *= inv;
    }
    result.subsequences.emplace_back(id + "/" + std::to_string(s),
                                     ModalityFeatures(std::move(a), Modality::Audio),
                                     ModalityFeatures(std::move(v), Modality::Visual),
                                     std::move(val), std::move(aro));
  }
  return result;
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "jca-manifest";
  j["version"] = 1;
  j["split"] = m.split;
  j["audio_dim"] = m.audio_dim;
  j["visual_dim"] = m.visual_dim;
  j["clip_len"] = m.clip_len;
  j["clips_per_subsequence"] = m.clips_per_subsequence;
  j["sequences"] = nlohmann::ordered_json::array();
  for (const auto& r : m.sequences) {
    j["sequences"].push_back({{"id", r.id},
                              {"audio", r.audio_path},
                              {"visual", r.visual_path},
                              {"labels", r.label_path},
                              {"frames", r.frames}});
  }
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text, const std::string& source) {
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "jca-manifest") {
      throw FormatError(FormatError::Kind::BadMagic, source + ": not a jca manifest");
    }
    if (j.at("version").get<int>() != 1) {
      throw FormatError(FormatError::Kind::VersionMismatch,
                        source + ": unsupported manifest version");
    }
    m.split = j.at("split").get<std::string>();
    m.audio_dim = j.at("audio_dim").get<std::size_t>();
    m.visual_dim = j.at("visual_dim").get<std::size_t>();
    m.clip_len = j.at("clip_len").get<std::size_t>();
    m.clips_per_subsequence = j.at("clips_per_subsequence").get<std::size_t>();
    for (const auto& r : j.at("sequences")) {
      m.sequences.push_back({r.at("id").get<std::string>(), r.at("audio").get<std::string>(),
                             r.at("visual").get<std::string>(), r.at("labels").get<std::string>(),
                             r.at("frames").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatError::Kind::Malformed, source + ": " + e.what());
  }
  if (m.split != "train" && m.split != "val" && m.split != "test") {
    throw FormatError(FormatError::Kind::Malformed, source + ": unknown split '" + m.split + "'");
  }
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  const std::string text = manifest_to_json(m);
  detail::write_file(path, std::vector<char>(text.begin(), text.end()));
}

DatasetManifest read_manifest(const std::string& path) {
  if (!fs::exists(path)) throw IoError("manifest '" + path + "' does not exist");
  const auto bytes = detail::read_file(path);
  return manifest_from_json(std::string(bytes.begin(), bytes.end()), path);
}

namespace {

/// Reads only the AVF1 header: (rows, cols).
std::pair<std::size_t, std::size_t> feature_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<char> head(16);
  in.read(head.data(), 16);
  head.resize(static_cast<std::size_t>(in.gcount()));
  detail::ByteReader r(head, path);
  if (r.bytes(4) != "AVF1") throw FormatError(FormatError::Kind::BadMagic, path + ": bad magic");
  if (r.u32() != kFeatureFormatVersion) {
    throw FormatError(FormatError::Kind::VersionMismatch, path + ": feature version mismatch");
  }
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  return {rows, cols};
}

}  // namespace

void validate_manifest(const DatasetManifest& m, const std::string& base_dir) {
  std::set<std::string> ids;
  for (const auto& r : m.sequences) {
    if (!ids.insert(r.id).second) throw ConfigError("duplicate sequence id '" + r.id + "'");
    for (const auto* p : {&r.audio_path, &r.visual_path, &r.label_path}) {
      if (!fs::exists(fs::path(base_dir) / *p)) {
        throw IoError("sequence " + r.id + ": missing file '" + *p + "'");
      }
    }
    const auto [ar, ac] = feature_header((fs::path(base_dir) / r.audio_path).string());
    const auto [vr, vc] = feature_header((fs::path(base_dir) / r.visual_path).string());
    if (ac != m.audio_dim || vc != m.visual_dim) {
      throw ShapeError("sequence " + r.id + ": feature dims audio " + std::to_string(ac) +
                       ", visual " + std::to_string(vc) + " differ from manifest " +
                       std::to_string(m.audio_dim) + ", " + std::to_string(m.visual_dim));
    }
    if (ar != r.frames || vr != r.frames) {
      throw ShapeError("sequence " + r.id + ": feature files hold " + std::to_string(ar) + " / " +
                       std::to_string(vr) + " frames, manifest says " + std::to_string(r.frames));
    }
  }
}

void check_disjoint(const std::vector<DatasetManifest>& splits) {
  std::set<std::string> seen;
  for (const auto& m : splits) {
    for (const auto& r : m.sequences) {
      if (!seen.insert(r.id).second) {
        throw ConfigError("sequence id '" + r.id + "' appears in more than one split");
      }
    }
  }
}

Dataset load_split(const std::string& manifest_path) {
  const DatasetManifest m = read_manifest(manifest_path);
  const std::string base = fs::path(manifest_path).parent_path().string();
  validate_manifest(m, base);
  Dataset out;
  for (const auto& r : m.sequences) {
    const Matrix audio = read_features((fs::path(base) / r.audio_path).string());
    const Matrix visual = read_features((fs::path(base) / r.visual_path).string());
    const auto labels = read_labels((fs::path(base) / r.label_path).string());
    // keep only annotated frames
    Matrix a(labels.size(), audio.cols());
    Matrix v(labels.size(), visual.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::size_t f = labels[i].frame;
      if (f >= audio.rows()) {
        throw FormatError(FormatError::Kind::OutOfRange,
                          r.label_path + ": frame index " + std::to_string(f) + " beyond " +
                              std::to_string(audio.rows()) + " feature rows");
      }
      std::copy(audio.row_span(f).begin(), audio.row_span(f).end(), a.row_span(i).begin());
      std::copy(visual.row_span(f).begin(), visual.row_span(f).end(), v.row_span(i).begin());
    }
    auto seg = segment(r.id, a, v, labels, m.clip_len, m.clips_per_subsequence);
    for (auto& s : seg.subsequences) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace jca
