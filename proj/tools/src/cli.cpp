#include "jca_cli/cli.hpp"

#include <algorithm>
#include <cstdlib>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config_file.hpp"
#include "jca/errors.hpp"

namespace jca::cli {

namespace {

constexpr const char* kDefaultOutDir = "jca-output";

/// Options of one subcommand plus the function that runs it.
struct Command {
  CLI::App* app = nullptr;
  std::function<int(const std::string&, std::ostream&)> run;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_out(CLI::App* sub, std::string& out_dir) {
  out_dir = kDefaultOutDir;
  sub->add_option("--out", out_dir, "Output directory")->envname(kOutputDirEnv);
}

void add_train_config(CLI::App* sub, TrainConfig& c) {
  sub->add_option("--lr", c.learning_rate, "Learning rate");
  sub->add_option("--beta1", c.beta1, "Adam first-moment decay");
  sub->add_option("--beta2", c.beta2, "Adam second-moment decay");
  sub->add_option("--epsilon", c.epsilon, "Adam epsilon");
  sub->add_option("--momentum", c.momentum, "SGD momentum");
  sub->add_option("--weight-decay", c.weight_decay, "Decoupled weight decay (biases exempt)");
  sub->add_option("--batch-size", c.batch_size, "Sub-sequences per batch");
  sub->add_option("--dropout", c.dropout, "Dropout probability on the fused features");
  sub->add_option("--max-epochs", c.max_epochs, "Epoch limit");
  sub->add_option("--patience", c.patience, "Epochs without validation improvement before stopping");
  sub->add_option("--seed", c.seed, "Seed for initialization, shuffling and dropout");
}

/// First token that is not an option: the subcommand name.
std::string find_subcommand(const std::vector<std::string>& args) {
  for (const auto& a : args)
    if (!a.empty() && a[0] != '-') return a;
  return {};
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

bool echo_option(const CLI::Option* opt) {
  const std::string name = opt->get_single_name();
  return !opt->get_group().empty() && name != "config" && name != "out" && name != "help" &&
         !opt->get_lnames().empty();
}

void apply_config(CLI::App* sub, const std::vector<ConfigEntry>& entries, const std::string& path) {
  for (const auto& e : entries) {
    CLI::Option* opt = sub->get_option_no_throw("--" + e.key);
    if (!opt || !echo_option(opt)) {
      throw UsageError(path + ":" + std::to_string(e.line) + ": unknown key '" + e.key +
                       "' for '" + sub->get_name() + "'");
    }
    try {
      opt->default_val(e.value);
    } catch (const CLI::Error& err) {
      throw UsageError(path + ":" + std::to_string(e.line) + ": bad value for '" + e.key +
                       "': " + err.what());
    }
  }
}

/// Every echoable option as key = value, in declaration order.
std::string resolved_config(const CLI::App* sub) {
  std::vector<ConfigEntry> entries;
  for (const CLI::Option* opt : sub->get_options()) {
    if (!echo_option(opt)) continue;
    std::string value = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
    if (opt->get_type_size() == 0 && opt->count() > 0) value = "true";
    entries.push_back({opt->get_single_name(), value, 0});
  }
  return format_config(entries);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audio-visual fusion models for continuous emotion recognition", "jca"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SynthOptions synth;
  TrainOptions train;
  EvalOptions eval;
  GradcheckOptions grad;
  SpectrogramOptions spec;
  std::string config_path;
  std::vector<Command> commands;

  {
    auto* s = app.add_subcommand("synth", "Generate the synthetic complementary-modality benchmark");
    auto& c = synth.synth;
    s->add_option("--seed", c.seed, "Generator seed");
    s->add_option("--train-sequences", c.train_sequences, "Sequences in the train split");
    s->add_option("--val-sequences", c.val_sequences, "Sequences in the validation split");
    s->add_option("--test-sequences", c.test_sequences, "Sequences in the test split");
    s->add_option("--subsequences", c.subsequences_per_sequence, "Sub-sequences per sequence");
    s->add_option("--clips", c.clips, "Clips per sub-sequence (L)");
    s->add_option("--audio-dim", c.audio_dim, "Audio feature width");
    s->add_option("--visual-dim", c.visual_dim, "Visual feature width");
    s->add_option("--ar-coef", c.ar_coef, "AR(1) coefficient of the latents");
    s->add_option("--noise-sigma", c.noise_sigma, "Observation noise standard deviation");
    s->add_option("--mask-prob", c.mask_prob, "Per-clip masking probability of each modality");
    add_out(s, synth.out_dir);
    commands.push_back({s, [&](const std::string& cfg, std::ostream& o) { return cmd_synth(synth, cfg, o); }});
  }
  {
    auto* s = app.add_subcommand("train", "Train a fusion model on manifest splits");
    s->add_option("--model", train.model, "jca | concat | vanilla-ca");
    s->add_option("--target", train.target, "valence | arousal | both");
    s->add_option("--train-manifest", train.train_manifest, "Train split manifest");
    s->add_option("--val-manifest", train.val_manifest, "Validation split manifest");
    s->add_option("--attn-dim", train.attn_dim, "Attention width k");
    s->add_option("--head-hidden", train.head_hidden, "Hidden units of the regression head (0: linear)");
    s->add_option("--optimizer", train.optimizer, "adam | sgd");
    add_train_config(s, train.train);
    s->add_option("--epoch-checkpoints", train.epoch_checkpoints, "Save parameters after every epoch");
    add_out(s, train.out_dir);
    commands.push_back({s, [&](const std::string& cfg, std::ostream& o) { return cmd_train(train, cfg, o); }});
  }
  {
    auto* s = app.add_subcommand("eval", "Evaluate a checkpoint on a manifest split");
    s->add_option("--checkpoint", eval.checkpoint, "Parameter file");
    s->add_option("--manifest", eval.manifest, "Split manifest");
    s->add_option("--target", eval.target, "valence | arousal | both (default from the head)");
    add_out(s, eval.out_dir);
    commands.push_back({s, [&](const std::string& cfg, std::ostream& o) { return cmd_eval(eval, cfg, o); }});
  }
  {
    auto* s = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    s->add_option("--model", grad.model, "jca | concat | vanilla-ca");
    s->add_option("--target", grad.target, "valence | arousal | both");
    s->add_option("--clips", grad.dims.clips, "Clips per sub-sequence (L)");
    s->add_option("--audio-dim", grad.dims.audio_dim, "Audio feature width");
    s->add_option("--visual-dim", grad.dims.visual_dim, "Visual feature width");
    s->add_option("--attn-dim", grad.dims.attn_dim, "Attention width k");
    s->add_option("--head-hidden", grad.dims.head_hidden, "Hidden units of the regression head");
    s->add_option("--batch", grad.batch, "Sub-sequences in the checked batch");
    s->add_option("--seed", grad.seed, "Instance seed");
    s->add_option("--tol", grad.tol, "Maximum relative error");
    s->add_option("--step", grad.step, "Central-difference step");
    s->add_option("--format", grad.format, "table | json");
    s->add_option("--inject-fault", grad.inject_fault)->group("");
    add_out(s, grad.out_dir);
    commands.push_back({s, [&](const std::string& cfg, std::ostream& o) { return cmd_gradcheck(grad, cfg, o); }});
  }
  {
    auto* s = app.add_subcommand("spectrogram", "Log-power band spectrogram of a WAVE file");
    s->add_option("input", spec.input, "Input WAVE file")->group("");
    s->add_option("--output", spec.output, "Output AVF1 file");
    s->add_option("--bands", spec.spec.bands, "Frequency bands");
    s->add_option("--dft-length", spec.spec.dft_length, "DFT length");
    s->add_option("--window-ms", spec.spec.window_ms, "Window length in milliseconds");
    s->add_option("--hop-ms", spec.spec.hop_ms, "Hop length in milliseconds");
    s->add_option("--pad-end", spec.spec.pad_end, "Zero-pad the tail so every full hop starts a frame");
    add_out(s, spec.out_dir);
    commands.push_back({s, [&](const std::string& cfg, std::ostream& o) { return cmd_spectrogram(spec, cfg, o); }});
  }
  for (auto& c : commands) c.app->add_option("--config", config_path, "key = value file; flags take precedence");

  try {
    const std::string name = find_subcommand(args);
    if (const std::string path = find_config_path(args); !path.empty()) {
      const auto it = std::find_if(commands.begin(), commands.end(),
                                   [&](const Command& c) { return c.app->get_name() == name; });
      if (it == commands.end()) throw UsageError("--config needs a subcommand");
      apply_config(it->app, read_config(path), path);
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      return c.run(resolved_config(c.app), out);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitFailure;
    }
  }
  return kExitUsage;
}

}  // namespace jca::cli
