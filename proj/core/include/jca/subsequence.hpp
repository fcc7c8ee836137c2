#pragma once

#include <string>
#include <vector>

#include "jca/fusion.hpp"

namespace jca {

/// Which label(s) a model is trained on. Both requires a 2-output head
/// (column 0 valence, column 1 arousal).
enum class Target { Valence, Arousal, Both };

const char* to_string(Target t);
/// Parses "valence" | "arousal" | "both"; throws ConfigError otherwise.
Target parse_target(const std::string& s);

/// L paired audio/visual clips with per-clip labels in [-1, 1].
struct SubSequence {
  std::string id;
  ModalityFeatures audio;
  ModalityFeatures visual;
  std::vector<double> valence;
  std::vector<double> arousal;

  SubSequence(std::string id, ModalityFeatures audio, ModalityFeatures visual,
              std::vector<double> valence, std::vector<double> arousal);

  std::size_t clips() const noexcept { return audio.clips(); }
};

/// Per-clip targets as an L x outputs matrix, in head output column order.
Matrix target_matrix(const SubSequence& s, Target target);

using Dataset = std::vector<SubSequence>;

}  // namespace jca
