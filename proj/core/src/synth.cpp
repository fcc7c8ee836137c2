#include "jca/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "jca/errors.hpp"
#include "jca/metrics.hpp"
#include "jca/rng.hpp"

namespace fs = std::filesystem;

namespace jca {

void SynthConfig::validate() const {
  if (!(mask_prob >= 0.0 && mask_prob <= 0.5)) {
    throw ConfigError("mask probability must lie in [0, 0.5], got " + std::to_string(mask_prob));
  }
  if (!(ar_coef > -1.0 && ar_coef < 1.0)) {
    throw ConfigError("AR coefficient must lie in (-1, 1), got " + std::to_string(ar_coef));
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  if (clips == 0 || audio_dim == 0 || visual_dim == 0 || subsequences_per_sequence == 0) {
    throw ConfigError("synthetic dims must be positive");
  }
  if (train_sequences == 0 || val_sequences == 0 || test_sequences == 0) {
    throw ConfigError("every split needs at least one sequence");
  }
}

namespace {

enum SeedTag : std::uint64_t { kProjection = 100, kTrain = 200, kVal = 300, kTest = 400 };

Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

SynthSequence make_sequence(const std::string& id, const SynthConfig& cfg, const Matrix& proj_a,
                            const Matrix& proj_v, Rng& rng) {
  const std::size_t T = cfg.subsequences_per_sequence * cfg.clips;
  SynthSequence s;
  s.id = id;
  s.audio = Matrix(T, cfg.audio_dim);
  s.visual = Matrix(T, cfg.visual_dim);
  s.valence.resize(T);
  s.arousal.resize(T);
  s.audio_masked.resize(T);
  s.visual_masked.resize(T);

  const double innovation = std::sqrt(1.0 - cfg.ar_coef * cfg.ar_coef);
  double z_val = rng.normal();
  double z_aro = rng.normal();
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) {
      z_val = cfg.ar_coef * z_val + innovation * rng.normal();
      z_aro = cfg.ar_coef * z_aro + innovation * rng.normal();
    }
    s.valence[t] = std::tanh(z_val);
    s.arousal[t] = std::tanh(z_aro);
    const double u = rng.uniform();
    s.audio_masked[t] = u < cfg.mask_prob;
    s.visual_masked[t] = !s.audio_masked[t] && u < 2.0 * cfg.mask_prob;
    for (std::size_t j = 0; j < cfg.audio_dim; ++j) {
      const double clean = proj_a(j, 0) * s.valence[t] + proj_a(j, 1) * s.arousal[t];
      const double noisy = clean + cfg.noise_sigma * rng.normal();
      s.audio(t, j) = s.audio_masked[t] ? 0.0 : noisy;
    }
    for (std::size_t j = 0; j < cfg.visual_dim; ++j) {
      const double clean = proj_v(j, 0) * s.valence[t] + proj_v(j, 1) * s.arousal[t];
      const double noisy = clean + cfg.noise_sigma * rng.normal();
      s.visual(t, j) = s.visual_masked[t] ? 0.0 : noisy;
    }
  }
  return s;
}

std::vector<SynthSequence> make_split(const std::string& name, std::size_t count,
                                      std::uint64_t tag, const SynthConfig& cfg,
                                      const Matrix& proj_a, const Matrix& proj_v) {
  Rng rng(Rng::derive(cfg.seed, tag));
  std::vector<SynthSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char id[48];
    std::snprintf(id, sizeof id, "%s%04zu", name.c_str(), i);
    out.push_back(make_sequence(id, cfg, proj_a, proj_v, rng));
  }
  return out;
}

}  // namespace

SynthSplits synth_sequences(const SynthConfig& config) {
  config.validate();
  // one pair of projections for the whole dataset so every split shares it
  Rng proj_rng(Rng::derive(config.seed, kProjection));
  const Matrix proj_a = gaussian(config.audio_dim, 2, proj_rng);
  const Matrix proj_v = gaussian(config.visual_dim, 2, proj_rng);
  SynthSplits splits;
  splits.train = make_split("train", config.train_sequences, kTrain, config, proj_a, proj_v);
  splits.val = make_split("val", config.val_sequences, kVal, config, proj_a, proj_v);
  splits.test = make_split("test", config.test_sequences, kTest, config, proj_a, proj_v);
  return splits;
}

namespace {

std::vector<FrameLabel> frame_labels(const SynthSequence& s) {
  std::vector<FrameLabel> labels(s.valence.size());
  for (std::size_t t = 0; t < labels.size(); ++t) labels[t] = {t, s.valence[t], s.arousal[t]};
  return labels;
}

}  // namespace

Dataset to_dataset(const std::vector<SynthSequence>& sequences, std::size_t clips) {
  Dataset out;
  for (const auto& s : sequences) {
    auto seg = segment(s.id, s.audio, s.visual, frame_labels(s), 1, clips);
    for (auto& sub : seg.subsequences) out.push_back(std::move(sub));
  }
  return out;
}

SynthDatasets synth_datasets(const SynthConfig& config) {
  const SynthSplits s = synth_sequences(config);
  return {to_dataset(s.train, config.clips), to_dataset(s.val, config.clips),
          to_dataset(s.test, config.clips)};
}

namespace {

double probe_ccc(const Dataset& data, Target target, bool use_audio, bool use_visual) {
  const std::size_t da = use_audio ? data.front().audio.dim() : 0;
  const std::size_t dv = use_visual ? data.front().visual.dim() : 0;
  const std::size_t p = da + dv + 1;
  Matrix gram(p, p);
  Matrix rhs(p, 1);
  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  for (const auto& s : data) {
    const auto& labels = target == Target::Arousal ? s.arousal : s.valence;
    for (std::size_t c = 0; c < s.clips(); ++c) {
      std::vector<double> x;
      x.reserve(p);
      if (use_audio) x.insert(x.end(), s.audio.block().row_span(c).begin(), s.audio.block().row_span(c).end());
      if (use_visual) x.insert(x.end(), s.visual.block().row_span(c).begin(), s.visual.block().row_span(c).end());
      x.push_back(1.0);
      for (std::size_t i = 0; i < p; ++i) {
        rhs(i, 0) += x[i] * labels[c];
        for (std::size_t j = 0; j < p; ++j) gram(i, j) += x[i] * x[j];
      }
      rows.push_back(std::move(x));
      ys.push_back(labels[c]);
    }
  }
  // a tiny ridge keeps rank-deficient (noise-free) designs solvable
  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) trace += gram(i, i);
  const double ridge = 1e-12 * trace / static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) gram(i, i) += ridge;
  const Matrix w = solve_spd(gram, rhs);
  std::vector<double> pred(ys.size());
  for (std::size_t n = 0; n < rows.size(); ++n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p; ++i) acc += rows[n][i] * w(i, 0);
    pred[n] = acc;
  }
  return ccc(pred, ys).rho_c;
}

}  // namespace

ProbeResult linear_probe(const Dataset& data, Target target) {
  if (data.empty()) throw ConfigError("linear_probe: empty dataset");
  if (target == Target::Both) throw ConfigError("linear_probe: choose valence or arousal");
  return {probe_ccc(data, target, true, false), probe_ccc(data, target, false, true),
          probe_ccc(data, target, true, true)};
}

std::vector<std::string> synth_generate(const SynthConfig& config, const std::string& out_dir) {
  const SynthSplits splits = synth_sequences(config);
  fs::create_directories(out_dir);
  std::vector<std::string> manifests;
  nlohmann::ordered_json report;
  report["config"] = {{"train_sequences", config.train_sequences},
                      {"val_sequences", config.val_sequences},
                      {"test_sequences", config.test_sequences},
                      {"subsequences_per_sequence", config.subsequences_per_sequence},
                      {"clips", config.clips},
                      {"audio_dim", config.audio_dim},
                      {"visual_dim", config.visual_dim},
                      {"ar_coef", config.ar_coef},
                      {"noise_sigma", config.noise_sigma},
                      {"mask_prob", config.mask_prob},
                      {"seed", config.seed}};

  const std::pair<const char*, const std::vector<SynthSequence>*> named[] = {
      {"train", &splits.train}, {"val", &splits.val}, {"test", &splits.test}};
  for (const auto& [name, seqs] : named) {
    fs::create_directories(fs::path(out_dir) / name);
    DatasetManifest m;
    m.split = name;
    m.audio_dim = config.audio_dim;
    m.visual_dim = config.visual_dim;
    m.clip_len = 1;
    m.clips_per_subsequence = config.clips;
    std::size_t masked_a = 0, masked_v = 0, frames = 0;
    for (const auto& s : *seqs) {
      SequenceRecord r;
      r.id = s.id;
      r.audio_path = std::string(name) + "/" + s.id + ".audio.avf";
      r.visual_path = std::string(name) + "/" + s.id + ".visual.avf";
      r.label_path = std::string(name) + "/" + s.id + ".labels.csv";
      r.frames = s.audio.rows();
      write_features((fs::path(out_dir) / r.audio_path).string(), s.audio);
      write_features((fs::path(out_dir) / r.visual_path).string(), s.visual);
      write_labels((fs::path(out_dir) / r.label_path).string(), frame_labels(s));
      for (std::size_t t = 0; t < r.frames; ++t) {
        masked_a += s.audio_masked[t];
        masked_v += s.visual_masked[t];
      }
      frames += r.frames;
      m.sequences.push_back(std::move(r));
    }
    const std::string path = (fs::path(out_dir) / (std::string(name) + ".manifest.json")).string();
    write_manifest(path, m);
    manifests.push_back(path);

    const Dataset data = to_dataset(*seqs, config.clips);
    nlohmann::ordered_json entry = {{"sequences", seqs->size()},
                                    {"subsequences", data.size()},
                                    {"clips", frames},
                                    {"audio_masked_clips", masked_a},
                                    {"visual_masked_clips", masked_v}};
    if (std::string(name) == "train") {
      for (Target t : {Target::Valence, Target::Arousal}) {
        const ProbeResult probe = linear_probe(data, t);
        entry["linear_probe"][to_string(t)] = {{"audio", probe.audio},
                                               {"visual", probe.visual},
                                               {"combined", probe.combined},
                                               {"combined_not_worse",
                                                probe.combined >= std::max(probe.audio, probe.visual)}};
      }
    }
    report["splits"][name] = entry;
  }
  std::ofstream out(fs::path(out_dir) / "generation_report.json", std::ios::trunc);
  if (!out) throw IoError("cannot write generation report in '" + out_dir + "'");
  out << report.dump(2) << '\n';
  return manifests;
}

}  // namespace jca
