#include "jca/subsequence.hpp"

#include "jca/errors.hpp"

namespace jca {

const char* to_string(Target t) {
  switch (t) {
    case Target::Valence: return "valence";
    case Target::Arousal: return "arousal";
    case Target::Both: return "both";
  }
  return "?";
}

Target parse_target(const std::string& s) {
  if (s == "valence") return Target::Valence;
  if (s == "arousal") return Target::Arousal;
  if (s == "both") return Target::Both;
  throw ConfigError("unknown target '" + s + "' (expected valence|arousal|both)");
}

SubSequence::SubSequence(std::string id_, ModalityFeatures audio_, ModalityFeatures visual_,
                         std::vector<double> valence_, std::vector<double> arousal_)
    : id(std::move(id_)),
      audio(std::move(audio_)),
      visual(std::move(visual_)),
      valence(std::move(valence_)),
      arousal(std::move(arousal_)) {
  const std::size_t L = audio.clips();
  if (visual.clips() != L || valence.size() != L || arousal.size() != L) {
    throw ShapeError("sub-sequence " + id + ": clip counts differ (audio " +
                     std::to_string(L) + ", visual " + std::to_string(visual.clips()) +
                     ", valence " + std::to_string(valence.size()) + ", arousal " +
                     std::to_string(arousal.size()) + ")");
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (!(valence[i] >= -1.0 && valence[i] <= 1.0) || !(arousal[i] >= -1.0 && arousal[i] <= 1.0)) {
      throw ConfigError("sub-sequence " + id + ": label outside [-1, 1] at clip " +
                        std::to_string(i));
    }
  }
}

Matrix target_matrix(const SubSequence& s, Target target) {
  switch (target) {
    case Target::Valence: return Matrix::column(s.valence);
    case Target::Arousal: return Matrix::column(s.arousal);
    case Target::Both: return concat_cols(Matrix::column(s.valence), Matrix::column(s.arousal));
  }
  return {};
}

}  // namespace jca
