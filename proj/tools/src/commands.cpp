#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "jca/data.hpp"
#include "jca/errors.hpp"
#include "jca/param_io.hpp"

namespace fs = std::filesystem;

namespace jca::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fs::path prepare_dir(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

JcaDims data_dims(const Dataset& d, std::size_t attn_dim, std::size_t head_hidden, Target target) {
  const SubSequence& s = d.front();
  return {s.clips(), s.audio.dim(), s.visual.dim(), attn_dim, head_hidden,
          target == Target::Both ? std::size_t{2} : std::size_t{1}};
}

std::vector<Target> targets_of(Target t) {
  if (t == Target::Both) return {Target::Valence, Target::Arousal};
  return {t};
}

}  // namespace

int cmd_synth(const SynthOptions& o, const std::string& resolved_config, std::ostream& out) {
  o.synth.validate();
  const fs::path dir = prepare_dir(o.out_dir);
  const auto manifests = synth_generate(o.synth, dir.string());
  write_text(dir / "synth.config", resolved_config);
  for (const auto& m : manifests) out << "wrote " << m << '\n';
  return 0;
}

int cmd_train(const TrainOptions& o, const std::string& resolved_config, std::ostream& out) {
  if (o.train_manifest.empty() || o.val_manifest.empty()) {
    throw ConfigError("train needs both --train-manifest and --val-manifest");
  }
  TrainConfig cfg = o.train;
  cfg.optimizer = parse_optimizer(o.optimizer);
  cfg.target = parse_target(o.target);
  cfg.validate();
  const ModelKind kind = parse_model_kind(o.model);

  const Dataset train_set = load_split(o.train_manifest);
  const Dataset val_set = load_split(o.val_manifest);
  if (train_set.empty()) throw ConfigError(o.train_manifest + " yields no sub-sequences");
  if (val_set.empty()) throw ConfigError(o.val_manifest + " yields no sub-sequences");
  const JcaDims dims = data_dims(train_set, o.attn_dim, o.head_hidden, cfg.target);
  dims.validate();

  const fs::path dir = prepare_dir(o.out_dir);
  const fs::path ckpt_dir = dir / "checkpoints";
  if (o.epoch_checkpoints) fs::create_directories(ckpt_dir);
  write_text(dir / "train.config", resolved_config);

  out << "model=" << to_string(kind) << " dims=" << dims.to_string()
      << " params=" << param_count(init_model(kind, dims, 0)) << " train=" << train_set.size()
      << " val=" << val_set.size() << '\n';

  std::ofstream log(dir / "history.log", std::ios::binary);
  if (!log) throw IoError("cannot write history log in '" + dir.string() + "'");
  log.precision(17);
  const TrainResult result = train(
      kind, dims, train_set, val_set, cfg,
      [&](const EpochRecord& rec, const ModelParams& params, bool is_best) {
        log << "epoch=" << rec.epoch << " train_loss=" << rec.train_loss
            << " train_ccc=" << rec.train_ccc << " val_ccc=" << rec.val_ccc << '\n';
        log.flush();
        out << "epoch " << std::setw(3) << rec.epoch << std::fixed << std::setprecision(5)
            << "  loss " << rec.train_loss << "  train_ccc " << rec.train_ccc << "  val_ccc "
            << rec.val_ccc << (is_best ? "  *" : "") << std::defaultfloat << '\n';
        if (o.epoch_checkpoints) {
          char name[32];
          std::snprintf(name, sizeof name, "epoch_%03zu.params", rec.epoch);
          save_params((ckpt_dir / name).string(), params);
        }
        if (is_best) save_params((dir / "best.params").string(), params);
      });

  const CccReport best_val = evaluate_split(result.params, val_set, cfg.target);
  nlohmann::ordered_json summary;
  summary["model"] = to_string(kind);
  summary["target"] = to_string(cfg.target);
  summary["dims"] = {{"clips", dims.clips},          {"audio_dim", dims.audio_dim},
                     {"visual_dim", dims.visual_dim}, {"attn_dim", dims.attn_dim},
                     {"head_hidden", dims.head_hidden}, {"outputs", dims.outputs}};
  summary["param_count"] = param_count(result.params);
  summary["epochs_run"] = result.history.epochs.size();
  summary["best_epoch"] = result.history.best_epoch;
  summary["best_val_ccc"] = result.history.best_val_ccc;
  for (const auto& e : best_val.entries) summary["best_val_ccc_per_target"][to_string(e.target)] = e.rho_c;
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  out << "best epoch " << result.history.best_epoch << " val_ccc " << fmt(result.history.best_val_ccc)
      << '\n';
  return 0;
}

int cmd_eval(const EvalOptions& o, const std::string& resolved_config, std::ostream& out) {
  if (o.checkpoint.empty() || o.manifest.empty()) {
    throw ConfigError("eval needs --checkpoint and --manifest");
  }
  const ModelParams model = load_params(o.checkpoint);
  const JcaDims& dims = dims_of(model);
  const Dataset data = load_split(o.manifest);
  if (data.empty()) throw ConfigError(o.manifest + " yields no sub-sequences");
  const SubSequence& first = data.front();
  if (first.clips() != dims.clips || first.audio.dim() != dims.audio_dim ||
      first.visual.dim() != dims.visual_dim) {
    throw ShapeError("checkpoint expects L=" + std::to_string(dims.clips) +
                     " d_a=" + std::to_string(dims.audio_dim) +
                     " d_v=" + std::to_string(dims.visual_dim) + " but data has L=" +
                     std::to_string(first.clips()) + " d_a=" + std::to_string(first.audio.dim()) +
                     " d_v=" + std::to_string(first.visual.dim()));
  }
  const Target target = !o.target.empty() ? parse_target(o.target)
                        : dims.outputs == 2 ? Target::Both
                                            : Target::Valence;

  const CccReport report = evaluate_split(model, data, target);
  const auto preds = split_predictions(model, data);
  const fs::path dir = prepare_dir(o.out_dir);
  write_text(dir / "eval.config", resolved_config);
  write_text(dir / "eval_report.json", report.to_json() + "\n");

  std::string csv = "subsequence,clip";
  const auto ts = targets_of(target);
  for (Target t : ts) csv += std::string(",") + to_string(t) + "_pred," + to_string(t) + "_true";
  csv += '\n';
  std::size_t at = 0;
  for (const auto& s : data) {
    for (std::size_t c = 0; c < s.clips(); ++c, ++at) {
      csv += s.id + "," + std::to_string(c);
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double truth = ts[k] == Target::Arousal ? s.arousal[c] : s.valence[c];
        csv += "," + fmt(preds[k][at]) + "," + fmt(truth);
      }
      csv += '\n';
    }
  }
  write_text(dir / "predictions.csv", csv);
  out << report.to_text();
  return 0;
}

int cmd_gradcheck(const GradcheckOptions& o, const std::string& resolved_config,
                  std::ostream& out) {
  if (o.format != "table" && o.format != "json") {
    throw ConfigError("unknown report format '" + o.format + "' (expected table|json)");
  }
  if (o.batch < 1) throw ConfigError("gradcheck batch must hold at least one sub-sequence");
  const ModelKind kind = parse_model_kind(o.model);
  const Target target = parse_target(o.target);
  JcaDims dims = o.dims;
  dims.outputs = target == Target::Both ? 2 : 1;
  dims.validate();

  // resample until no ReLU input sits within 1e-3 of its kink
  Rng rng(Rng::derive(o.seed, 7));
  ModelParams params = init_model(kind, dims, rng.next_u64());
  Dataset batch;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    params = init_model(kind, dims, rng.next_u64());
    batch.clear();
    for (std::size_t b = 0; b < o.batch; ++b) {
      Matrix a(dims.clips, dims.audio_dim), v(dims.clips, dims.visual_dim);
      for (double& x : a.data()) x = rng.uniform(-1.0, 1.0);
      for (double& x : v.data()) x = rng.uniform(-1.0, 1.0);
      std::vector<double> val(dims.clips), aro(dims.clips);
      for (double& x : val) x = rng.uniform(-0.9, 0.9);
      for (double& x : aro) x = rng.uniform(-0.9, 0.9);
      batch.emplace_back("g" + std::to_string(b), ModalityFeatures(std::move(a), Modality::Audio),
                         ModalityFeatures(std::move(v), Modality::Visual), std::move(val),
                         std::move(aro));
    }
    if (min_relu_margin(params, batch) >= 1e-3) break;
  }

  GradCheckOptions opts;
  opts.tol = o.tol;
  opts.step = o.step;
  if (!o.inject_fault.empty()) opts.inject_fault = o.inject_fault;
  const GradCheckReport report = grad_check(params, batch, target, {}, opts);

  const fs::path dir = prepare_dir(o.out_dir);
  write_text(dir / "gradcheck.config", resolved_config);
  write_text(dir / "gradcheck.json", report.to_json() + "\n");
  out << (o.format == "json" ? report.to_json() + "\n" : report.to_table());
  return report.passed() ? 0 : 1;
}

int cmd_spectrogram(const SpectrogramOptions& o, const std::string& resolved_config,
                    std::ostream& out) {
  if (o.input.empty()) throw ConfigError("spectrogram needs an input audio file");
  o.spec.validate();
  const AudioClip clip = read_wav(o.input);
  const std::vector<double> samples = resample(clip.samples, clip.sample_rate, o.spec.sample_rate);
  const Matrix spec = spectrogram(samples, o.spec);

  const fs::path dir = prepare_dir(o.out_dir);
  const fs::path target =
      o.output.empty() ? dir / (fs::path(o.input).stem().string() + ".spec.avf") : fs::path(o.output);
  write_features(target.string(), spec);
  write_text(dir / "spectrogram.config", resolved_config);
  out << spec.rows() << " x " << spec.cols() << '\n';
  return 0;
}

}  // namespace jca::cli
