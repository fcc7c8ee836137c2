#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "jca/audio.hpp"
#include "jca/synth.hpp"
#include "jca/training.hpp"

namespace jca::cli {

struct SynthOptions {
  SynthConfig synth;
  std::string out_dir;
};

struct TrainOptions {
  std::string model = "jca";
  std::string target = "valence";
  std::string optimizer = "adam";
  std::string train_manifest;
  std::string val_manifest;
  std::size_t attn_dim = 8;
  std::size_t head_hidden = 0;
  bool epoch_checkpoints = true;
  TrainConfig train;
  std::string out_dir;
};

struct EvalOptions {
  std::string checkpoint;
  std::string manifest;
  std::string target;  ///< empty: valence, or both for a two-output checkpoint
  std::string out_dir;
};

struct GradcheckOptions {
  std::string model = "jca";
  std::string target = "valence";
  JcaDims dims{3, 3, 3, 2};
  std::size_t batch = 2;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  double step = 1e-6;
  std::string format = "table";
  std::string inject_fault;
  std::string out_dir;
};

struct SpectrogramOptions {
  std::string input;
  std::string output;  ///< empty: <out_dir>/<input stem>.spec.avf
  SpectrogramConfig spec;
  std::string out_dir;
};

/// Each returns the exit status; `resolved_config` is written next to the outputs.
int cmd_synth(const SynthOptions& o, const std::string& resolved_config, std::ostream& out);
int cmd_train(const TrainOptions& o, const std::string& resolved_config, std::ostream& out);
int cmd_eval(const EvalOptions& o, const std::string& resolved_config, std::ostream& out);
int cmd_gradcheck(const GradcheckOptions& o, const std::string& resolved_config, std::ostream& out);
int cmd_spectrogram(const SpectrogramOptions& o, const std::string& resolved_config,
                    std::ostream& out);

}  // namespace jca::cli
