#include "jca/training.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "jca/errors.hpp"

namespace jca {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max epochs must be at least 1");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
}

bool EarlyStopping::update(std::size_t epoch, double metric) {
  improved_last_ = metric > best_;
  if (improved_last_) {
    best_ = metric;
    best_epoch_ = epoch;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return since_best_ >= patience_;
}

std::string TrainHistory::to_log() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& e : epochs) {
    os << "epoch=" << e.epoch << " train_loss=" << e.train_loss << " train_ccc=" << e.train_ccc
       << " val_ccc=" << e.val_ccc << '\n';
  }
  return os.str();
}

double mean_ccc(const CccReport& report) {
  double sum = 0.0;
  for (const auto& e : report.entries) sum += e.rho_c;
  return report.entries.empty() ? 0.0 : sum / static_cast<double>(report.entries.size());
}

namespace {

void check_dataset(const Dataset& data, const JcaDims& dims, const char* which) {
  if (data.empty()) throw ConfigError(std::string(which) + " split is empty");
  for (const auto& s : data) {
    if (s.clips() != dims.clips || s.audio.dim() != dims.audio_dim ||
        s.visual.dim() != dims.visual_dim) {
      throw ShapeError(std::string(which) + " sub-sequence " + s.id + " has audio " +
                       s.audio.block().shape_string() + " / visual " +
                       s.visual.block().shape_string() + ", model expects " + dims.to_string());
    }
  }
}

}  // namespace

TrainResult train(ModelKind kind, const JcaDims& dims, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  return train_from(init_model(kind, dims, Rng::derive(config.seed, 0)), train_set, val_set,
                    config, on_epoch);
}

TrainResult train_from(ModelParams initial, const Dataset& train_set, const Dataset& val_set,
                       const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const JcaDims dims = dims_of(initial);
  check_dataset(train_set, dims, "train");
  check_dataset(val_set, dims, "validation");
  if ((config.target == Target::Both) != (dims.outputs == 2)) {
    throw ConfigError(std::string("target '") + to_string(config.target) + "' needs " +
                      (config.target == Target::Both ? "2" : "1") + " head outputs");
  }

  Rng shuffle_rng(Rng::derive(config.seed, 1));
  Rng dropout_rng(Rng::derive(config.seed, 2));
  ModelParams params = std::move(initial);
  TrainResult result{params, {}};
  OptimizerState state;
  EarlyStopping stopper(config.patience);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t width = dropout_width(params);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<SubSequence> batch;
      std::vector<Matrix> masks;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
        if (config.dropout > 0.0)
          masks.push_back(make_dropout_mask(dims.clips, width, config.dropout, dropout_rng));
      }
      GradientSet grads;
      try {
        grads = loss_and_grads(params, batch, config.target, masks);
      } catch (const DegenerateError& e) {
        throw DegenerateError("epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batches + 1) + ": " + e.what());
      }
      if (!std::isfinite(grads.loss)) {
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batches + 1));
      }
      optimizer_step(params, grads, state, config);
      loss_sum += grads.loss;
      ++batches;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    rec.train_ccc = mean_ccc(evaluate_split(params, train_set, config.target));
    rec.val_ccc = mean_ccc(evaluate_split(params, val_set, config.target));
    result.history.epochs.push_back(rec);

    const bool stop = stopper.update(epoch, rec.val_ccc);
    if (stopper.improved_last()) {
      result.params = params;
      result.history.best_epoch = epoch;
      result.history.best_val_ccc = rec.val_ccc;
    }
    if (on_epoch) on_epoch(rec, params, stopper.improved_last());
    if (stop) break;
  }
  return result;
}

}  // namespace jca
