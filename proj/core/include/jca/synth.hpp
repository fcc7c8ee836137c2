#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jca/data.hpp"
#include "jca/subsequence.hpp"

namespace jca {

/// Synthetic complementary-modality benchmark.
///
/// Each sequence carries two independent AR(1) latents (valence, arousal);
/// the targets are their tanh. Audio and visual clip features are fixed
/// random linear projections of the two targets plus Gaussian noise. A clip
/// may have its audio or its visual features zeroed, never both.
struct SynthConfig {
  std::size_t train_sequences = 200;
  std::size_t val_sequences = 50;
  std::size_t test_sequences = 50;
  std::size_t subsequences_per_sequence = 10;
  std::size_t clips = 8;
  std::size_t audio_dim = 16;
  std::size_t visual_dim = 16;
  double ar_coef = 0.9;
  double noise_sigma = 1.0;
  /// Probability of masking audio on a clip; visual uses the same
  /// probability on the complementary event.
  double mask_prob = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One generated sequence, clip-level (clip_len = 1).
struct SynthSequence {
  std::string id;
  Matrix audio;   ///< T x d_a
  Matrix visual;  ///< T x d_v
  std::vector<double> valence;
  std::vector<double> arousal;
  std::vector<bool> audio_masked;
  std::vector<bool> visual_masked;
};

struct SynthSplits {
  std::vector<SynthSequence> train, val, test;
};

SynthSplits synth_sequences(const SynthConfig& config);

/// Segments generated sequences into sub-sequences.
Dataset to_dataset(const std::vector<SynthSequence>& sequences, std::size_t clips);

struct SynthDatasets {
  Dataset train, val, test;
};

/// In-memory generation; equals what load_split returns for written files.
SynthDatasets synth_datasets(const SynthConfig& config);

/// CCC of a least-squares linear probe (with intercept) fitted and evaluated
/// on `data` for one target, using audio, visual or both feature blocks.
struct ProbeResult {
  double audio = 0.0;
  double visual = 0.0;
  double combined = 0.0;
};

ProbeResult linear_probe(const Dataset& data, Target target);

/// Writes train/val/test manifests, AVF1 features and label CSVs under
/// `out_dir`, plus generation_report.json. Returns the manifest paths.
std::vector<std::string> synth_generate(const SynthConfig& config, const std::string& out_dir);

}  // namespace jca
