#include <gtest/gtest.h>

#include <fstream>
#include <numeric>

#include "fixtures.hpp"
#include "jca/data.hpp"
#include "jca/errors.hpp"

namespace jca {
namespace {

using testing::random_matrix;
using testing::TempDir;

std::vector<FrameLabel> ramp_labels(std::size_t n) {
  std::vector<FrameLabel> out;
  for (std::size_t f = 0; f < n; ++f)
    out.push_back({f, -1.0 + 2.0 * static_cast<double>(f) / static_cast<double>(n), 0.5 - 0.01 * static_cast<double>(f)});
  return out;
}

FormatError::Kind kind_of_error(auto&& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a format error";
  return FormatError::Kind::Malformed;
}

TEST(Features, RoundTripBitwise) {
  TempDir dir("avf");
  Rng rng(1);
  const Matrix m = random_matrix(7, 3, rng);
  write_features(dir.file("x.avf"), m);
  EXPECT_TRUE(bitwise_equal(read_features(dir.file("x.avf")), m));
}

TEST(Features, HeaderIsExact) {
  const auto bytes = encode_features(Matrix(2, 3, 1.0));
  ASSERT_EQ(bytes.size(), 16u + 6 * 8);
  EXPECT_EQ(std::string(bytes.data(), 4), "AVF1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12], 3);
}

TEST(Features, DistinctErrors) {
  const auto good = encode_features(Matrix(2, 2, 0.5));
  auto magic = good;
  magic[0] = 'X';
  try {
    decode_features(magic);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::BadMagic);
    EXPECT_NE(std::string(e.what()).find("XVF1"), std::string::npos);
  }
  auto version = good;
  version[4] = 2;
  EXPECT_EQ(kind_of_error([&] { decode_features(version); }), FormatError::Kind::VersionMismatch);
  EXPECT_EQ(kind_of_error([&] { decode_features({good.begin(), good.end() - 1}); }), FormatError::Kind::Truncated);
  EXPECT_THROW(read_features("/nonexistent/x.avf"), IoError);
}

TEST(Labels, ParsesAndDropsSentinel) {
  const auto labels = parse_labels("0,0.5,-0.25\n3,-5,-5\n4,1,-1\n");
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[0].frame, 0u);
  EXPECT_EQ(labels[0].valence, 0.5);
  EXPECT_EQ(labels[0].arousal, -0.25);
  EXPECT_EQ(labels[1].frame, 4u);
}

TEST(Labels, ErrorsCarryLineNumbers) {
  try {
    parse_labels("0,0.1,0.1\n4,1.2,0\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::OutOfRange);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  try {
    parse_labels("0,0.1\n", "lab.csv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::Malformed);
    EXPECT_NE(std::string(e.what()).find("lab.csv:1:"), std::string::npos);
  }
  EXPECT_THROW(parse_labels("x,0,0\n"), FormatError);
}

TEST(Labels, WriteReadRoundTrip) {
  TempDir dir("labels");
  const auto labels = ramp_labels(9);
  write_labels(dir.file("l.csv"), labels);
  const auto back = read_labels(dir.file("l.csv"));
  ASSERT_EQ(back.size(), labels.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].valence, labels[i].valence);
    EXPECT_EQ(back[i].arousal, labels[i].arousal);
  }
}

TEST(Segment, TwoFullSubSequences) {
  Rng rng(2);
  const std::size_t clip_len = 3, L = 4, T = 2 * clip_len * L;
  const auto r = segment("s", random_matrix(T, 2, rng), random_matrix(T, 3, rng), ramp_labels(T), clip_len, L);
  EXPECT_EQ(r.subsequences.size(), 2u);
  EXPECT_EQ(r.dropped_frames, 0u);
  EXPECT_EQ(r.subsequences[1].id, "s/1");
}

TEST(Segment, TrailingFrameDropped) {
  Rng rng(3);
  const std::size_t T = 2 * 4 + 1;
  const auto r = segment("s", random_matrix(T, 2, rng), random_matrix(T, 2, rng), ramp_labels(T), 2, 4);
  EXPECT_EQ(r.subsequences.size(), 1u);
  EXPECT_EQ(r.dropped_frames, 1u);
}

TEST(Segment, TooShortWarns) {
  Rng rng(4);
  const auto r = segment("s", random_matrix(3, 2, rng), random_matrix(3, 2, rng), ramp_labels(3), 1, 4);
  EXPECT_TRUE(r.subsequences.empty());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_THROW(segment("s", Matrix(4, 1), Matrix(5, 1), ramp_labels(4), 1, 2), ShapeError);
}

TEST(Segment, ConstantStreamsStayConstant) {
  const std::size_t T = 12;
  std::vector<FrameLabel> labels(T);
  for (std::size_t f = 0; f < T; ++f) labels[f] = {f, 0.25, -0.5};
  const auto r = segment("c", Matrix(T, 2, 0.75), Matrix(T, 1, -0.125), labels, 3, 2);
  for (const auto& s : r.subsequences) {
    for (double v : s.audio.block().data()) EXPECT_EQ(v, 0.75);
    for (double v : s.visual.block().data()) EXPECT_EQ(v, -0.125);
    for (double v : s.valence) EXPECT_EQ(v, 0.25);
  }
}

TEST(Segment, ConservesLabelMass) {
  Rng rng(5);
  const std::size_t T = 48;
  const auto labels = ramp_labels(T);
  const auto r = segment("m", random_matrix(T, 1, rng), random_matrix(T, 1, rng), labels, 3, 4);
  double clip_sum = 0.0, frame_sum = 0.0;
  std::size_t clips = 0;
  for (const auto& s : r.subsequences)
    for (double v : s.valence) {
      clip_sum += v;
      ++clips;
    }
  for (const auto& l : labels) frame_sum += l.valence;
  EXPECT_NEAR(clip_sum / static_cast<double>(clips), frame_sum / static_cast<double>(T), 1e-12);
}

DatasetManifest write_sequence(const TempDir& dir, const std::string& id, std::size_t frames, Rng& rng) {
  DatasetManifest m;
  m.split = "train";
  m.audio_dim = 2;
  m.visual_dim = 3;
  m.clip_len = 1;
  m.clips_per_subsequence = 4;
  write_features(dir.file(id + ".a.avf"), random_matrix(frames, 2, rng));
  write_features(dir.file(id + ".v.avf"), random_matrix(frames, 3, rng));
  write_labels(dir.file(id + ".csv"), ramp_labels(frames));
  m.sequences.push_back({id, id + ".a.avf", id + ".v.avf", id + ".csv", frames});
  return m;
}

TEST(Manifest, JsonRoundTrip) {
  DatasetManifest m;
  m.split = "val";
  m.audio_dim = 5;
  m.visual_dim = 7;
  m.sequences.push_back({"a", "a.avf", "b.avf", "c.csv", 10});
  const DatasetManifest back = manifest_from_json(manifest_to_json(m));
  EXPECT_EQ(back.split, "val");
  EXPECT_EQ(back.visual_dim, 7u);
  ASSERT_EQ(back.sequences.size(), 1u);
  EXPECT_EQ(back.sequences[0].label_path, "c.csv");
  EXPECT_EQ(back.sequences[0].frames, 10u);
  EXPECT_THROW(manifest_from_json("{}"), FormatError);
  EXPECT_THROW(manifest_from_json("not json"), FormatError);
}

TEST(Manifest, LoadSplitRelativeToManifest) {
  TempDir dir("manifest");
  Rng rng(6);
  const auto m = write_sequence(dir, "seq", 9, rng);
  write_manifest(dir.file("train.manifest.json"), m);
  const Dataset d = load_split(dir.file("train.manifest.json"));
  ASSERT_EQ(d.size(), 2u);
  const Matrix a = read_features(dir.file("seq.a.avf"));
  EXPECT_EQ(d[1].audio.block()(0, 1), a(4, 1));
}

TEST(Manifest, UnannotatedFramesAreSkipped) {
  TempDir dir("sentinel");
  Rng rng(7);
  auto m = write_sequence(dir, "seq", 5, rng);
  std::ofstream(dir.file("seq.csv")) << "0,0.1,0.1\n1,-5,-5\n2,0.2,0.2\n3,0.3,0.3\n4,0.4,0.4\n";
  write_manifest(dir.file("m.json"), m);
  const Dataset d = load_split(dir.file("m.json"));
  ASSERT_EQ(d.size(), 1u);
  const Matrix a = read_features(dir.file("seq.a.avf"));
  EXPECT_EQ(d[0].audio.block()(1, 0), a(2, 0));
  EXPECT_EQ(d[0].valence[3], 0.4);
}

TEST(Manifest, ValidationErrors) {
  TempDir dir("invalid");
  Rng rng(8);
  auto m = write_sequence(dir, "seq", 8, rng);
  m.audio_dim = 4;
  EXPECT_THROW(validate_manifest(m, dir.path().string()), ShapeError);
  m.audio_dim = 2;
  m.sequences[0].frames = 9;
  EXPECT_THROW(validate_manifest(m, dir.path().string()), ShapeError);
  m.sequences[0].frames = 8;
  m.sequences[0].visual_path = "missing.avf";
  EXPECT_THROW(validate_manifest(m, dir.path().string()), IoError);
  EXPECT_THROW(read_manifest(dir.file("nope.json")), IoError);
}

TEST(Manifest, SplitsMustBeDisjoint) {
  DatasetManifest a, b;
  a.sequences.push_back({"x", "", "", "", 1});
  b.sequences.push_back({"y", "", "", "", 1});
  EXPECT_NO_THROW(check_disjoint({a, b}));
  b.sequences.push_back({"x", "", "", "", 1});
  EXPECT_THROW(check_disjoint({a, b}), ConfigError);
}

}  // namespace
}  // namespace jca
