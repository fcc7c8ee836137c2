#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "jca/gradients.hpp"
#include "jca/metrics.hpp"
#include "jca/model.hpp"
#include "jca/subsequence.hpp"

namespace jca {

enum class OptimizerKind { Adam, Sgd };

const char* to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);

struct TrainConfig {
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.8;
  /// Decoupled: theta <- theta - lr * wd * theta before the update; biases exempt.
  double weight_decay = 5e-4;
  std::size_t batch_size = 64;
  double dropout = 0.5;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  Target target = Target::Valence;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Moment buffers of the optimizer, shaped like the model.
struct OptimizerState {
  std::uint64_t step = 0;
  std::optional<ModelParams> first;   ///< Adam m, or SGD velocity
  std::optional<ModelParams> second;  ///< Adam v
};

void adam_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
               const TrainConfig& config);
void sgd_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
              const TrainConfig& config);
/// Dispatches on config.optimizer.
void optimizer_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
                    const TrainConfig& config);

/// Stops after `patience` consecutive epochs without a strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records the metric of `epoch`; returns true when training should stop.
  bool update(std::size_t epoch, double metric);

  bool improved_last() const noexcept { return improved_last_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_metric() const noexcept { return best_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
  bool improved_last_ = false;
};

struct EpochRecord {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double train_ccc = 0.0;
  double val_ccc = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_ccc = -std::numeric_limits<double>::infinity();

  /// "epoch=3 train_loss=... train_ccc=... val_ccc=..." per line.
  std::string to_log() const;
};

struct TrainResult {
  ModelParams params;  ///< parameters of the best validation epoch
  TrainHistory history;
};

/// Called after each epoch with the record and the current parameters.
using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&, bool is_best)>;

/// Mean CCC over the report's targets.
double mean_ccc(const CccReport& report);

/// Trains a freshly initialized model. Batches are reshuffled every epoch from
/// the seed; dropout masks are drawn fresh per batch.
TrainResult train(ModelKind kind, const JcaDims& dims, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Same loop starting from given parameters.
TrainResult train_from(ModelParams initial, const Dataset& train_set, const Dataset& val_set,
                       const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace jca
