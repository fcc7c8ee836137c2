#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jca/matrix.hpp"
#include "jca/subsequence.hpp"

namespace jca {

// ---------------------------------------------------------------------------
// AVF1 feature files: "AVF1", u32 version (1), u32 rows, u32 cols, then
// rows*cols little-endian doubles in row-major order.

inline constexpr std::uint32_t kFeatureFormatVersion = 1;

std::vector<char> encode_features(const Matrix& m);
Matrix decode_features(const std::vector<char>& bytes, const std::string& source = "<memory>");
void write_features(const std::string& path, const Matrix& m);
Matrix read_features(const std::string& path);

// ---------------------------------------------------------------------------
// Label CSV: one "frame_index,valence,arousal" line per frame. Frames whose
// valence or arousal equals the sentinel are unannotated and dropped.

inline constexpr double kUnannotatedLabel = -5.0;

struct FrameLabel {
  std::size_t frame = 0;
  double valence = 0.0;
  double arousal = 0.0;
};

std::vector<FrameLabel> parse_labels(const std::string& text, const std::string& source = "<memory>");
std::vector<FrameLabel> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<FrameLabel>& labels);

// ---------------------------------------------------------------------------
// Segmentation of per-frame streams into sub-sequences.

struct SegmentResult {
  std::vector<SubSequence> subsequences;
  std::size_t dropped_frames = 0;
  std::vector<std::string> warnings;
};

/// Groups frames into non-overlapping clips of `clip_len` (clip value = mean
/// of its frames) and clips into sub-sequences of `clips_per_subsequence`.
/// Trailing frames that do not fill a whole sub-sequence are dropped.
SegmentResult segment(const std::string& id, const Matrix& audio, const Matrix& visual,
                      const std::vector<FrameLabel>& labels, std::size_t clip_len,
                      std::size_t clips_per_subsequence);

// ---------------------------------------------------------------------------
// Manifests: JSON documents listing the sequences of one split. Paths are
// relative to the manifest's directory.

struct SequenceRecord {
  std::string id;
  std::string audio_path;
  std::string visual_path;
  std::string label_path;
  std::size_t frames = 0;
};

struct DatasetManifest {
  std::string split;  ///< train | val | test
  std::size_t audio_dim = 0;
  std::size_t visual_dim = 0;
  std::size_t clip_len = 1;
  std::size_t clips_per_subsequence = 8;
  std::vector<SequenceRecord> sequences;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text, const std::string& source = "<memory>");
void write_manifest(const std::string& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::string& path);

/// Checks that every referenced file exists and declares the manifest dims.
void validate_manifest(const DatasetManifest& m, const std::string& base_dir);

/// Throws ConfigError if a sequence id appears in more than one manifest.
void check_disjoint(const std::vector<DatasetManifest>& splits);

/// Reads a manifest and every referenced file, aligns features to annotated
/// frames and segments them.
Dataset load_split(const std::string& manifest_path);

}  // namespace jca
