#include <gtest/gtest.h>

#include <algorithm>

#include "jca/errors.hpp"
#include "jca/synth.hpp"
#include "jca/training.hpp"

namespace jca {
namespace {

SynthDatasets small_synth(std::uint64_t seed) {
  SynthConfig c;
  c.train_sequences = 12;
  c.val_sequences = 4;
  c.test_sequences = 1;
  c.subsequences_per_sequence = 4;
  c.clips = 4;
  c.audio_dim = 6;
  c.visual_dim = 6;
  c.seed = seed;
  return synth_datasets(c);
}

const JcaDims kDims{4, 6, 6, 4};

TrainConfig quick_config(std::uint64_t seed, std::size_t epochs) {
  TrainConfig c;
  c.seed = seed;
  c.max_epochs = epochs;
  c.batch_size = 8;
  c.learning_rate = 3e-3;
  return c;
}

TEST(Train, IdenticalSeedGivesBitwiseIdenticalHistory) {
  const auto data = small_synth(1);
  const TrainConfig c = quick_config(5, 4);
  const TrainResult a = train(ModelKind::Jca, kDims, data.train, data.val, c);
  const TrainResult b = train(ModelKind::Jca, kDims, data.train, data.val, c);
  EXPECT_EQ(a.history.to_log(), b.history.to_log());
  EXPECT_TRUE(bitwise_equal(a.params, b.params));
  ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
  for (std::size_t i = 0; i < a.history.epochs.size(); ++i) {
    EXPECT_EQ(a.history.epochs[i].train_loss, b.history.epochs[i].train_loss);
    EXPECT_EQ(a.history.epochs[i].val_ccc, b.history.epochs[i].val_ccc);
  }
}

TEST(Train, BestValidationIsMaximumAndParamsMatch) {
  const auto data = small_synth(2);
  TrainConfig c = quick_config(1, 12);
  c.patience = 3;
  ModelParams best_seen;
  const TrainResult r = train(ModelKind::VanillaCa, kDims, data.train, data.val, c,
                              [&](const EpochRecord&, const ModelParams& p, bool is_best) {
                                if (is_best) best_seen = p;
                              });
  double best = -2.0;
  for (const auto& e : r.history.epochs) best = std::max(best, e.val_ccc);
  EXPECT_EQ(r.history.best_val_ccc, best);
  EXPECT_TRUE(bitwise_equal(r.params, best_seen));
  EXPECT_EQ(mean_ccc(evaluate_split(r.params, data.val, Target::Valence)), r.history.best_val_ccc);
}

TEST(Train, EarlyStopHonoursPatience) {
  const auto data = small_synth(3);
  TrainConfig c = quick_config(2, 200);
  c.patience = 2;
  const TrainResult r = train(ModelKind::Concat, kDims, data.train, data.val, c);
  const auto& h = r.history;
  ASSERT_LT(h.epochs.size(), 200u);
  EXPECT_EQ(h.epochs.size(), h.best_epoch + 2);
}

TEST(Train, LossTrendsDownOverTenEpochs) {
  int decreasing = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto data = small_synth(seed);
    TrainConfig c = quick_config(seed, 10);
    c.patience = 10;
    const TrainResult r = train(ModelKind::Jca, kDims, data.train, data.val, c);
    ASSERT_EQ(r.history.epochs.size(), 10u);
    decreasing += r.history.epochs.back().train_loss < r.history.epochs.front().train_loss;
  }
  EXPECT_GE(decreasing, 2);
}

TEST(Train, BothTargetsNeedTwoOutputs) {
  const auto data = small_synth(4);
  TrainConfig c = quick_config(1, 2);
  c.target = Target::Both;
  EXPECT_THROW(train(ModelKind::Jca, kDims, data.train, data.val, c), ConfigError);
  JcaDims two = kDims;
  two.outputs = 2;
  const TrainResult r = train(ModelKind::Jca, two, data.train, data.val, c);
  EXPECT_EQ(r.history.epochs.size(), 2u);
}

TEST(Train, Preconditions) {
  const auto data = small_synth(5);
  const TrainConfig c = quick_config(1, 1);
  EXPECT_THROW(train(ModelKind::Jca, kDims, {}, data.val, c), ConfigError);
  EXPECT_THROW(train(ModelKind::Jca, JcaDims{4, 5, 6, 4}, data.train, data.val, c), ShapeError);
}

TEST(Train, EvaluationIsDeterministic) {
  const auto data = small_synth(6);
  const ModelParams p = init_model(ModelKind::Jca, kDims, 8);
  EXPECT_EQ(evaluate_split(p, data.val, Target::Arousal).find(Target::Arousal)->rho_c,
            evaluate_split(p, data.val, Target::Arousal).find(Target::Arousal)->rho_c);
}

TEST(Train, HistoryLogFormat) {
  TrainHistory h;
  h.epochs.push_back({1, 0.5, 0.25, 0.125});
  EXPECT_EQ(h.to_log(), "epoch=1 train_loss=0.5 train_ccc=0.25 val_ccc=0.125\n");
}

}  // namespace
}  // namespace jca
