#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "jca/gradients.hpp"
#include "jca/model.hpp"
#include "jca/rng.hpp"
#include "jca/subsequence.hpp"

namespace {

using namespace jca;

constexpr ModelKind kKinds[] = {ModelKind::Jca, ModelKind::Concat, ModelKind::VanillaCa};

Matrix noise(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

Dataset make_batch(const JcaDims& dims, std::size_t n, Rng& rng) {
  Dataset batch;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> val(dims.clips), aro(dims.clips);
    for (std::size_t t = 0; t < dims.clips; ++t) {
      val[t] = rng.uniform(-0.9, 0.9);
      aro[t] = rng.uniform(-0.9, 0.9);
    }
    batch.emplace_back("b" + std::to_string(i),
                       ModalityFeatures(noise(dims.clips, dims.audio_dim, rng), Modality::Audio),
                       ModalityFeatures(noise(dims.clips, dims.visual_dim, rng), Modality::Visual),
                       std::move(val), std::move(aro));
  }
  return batch;
}

// state.range(0): model kind index, state.range(1): feature dim
void BM_Forward(benchmark::State& state) {
  const ModelKind kind = kKinds[state.range(0)];
  const auto d = static_cast<std::size_t>(state.range(1));
  const JcaDims dims{8, d, d, 8};
  const ModelParams params = init_model(kind, dims, 1);
  Rng rng(2);
  const ModalityFeatures xa(noise(dims.clips, d, rng), Modality::Audio);
  const ModalityFeatures xv(noise(dims.clips, d, rng), Modality::Visual);
  for (auto _ : state) benchmark::DoNotOptimize(model_forward(params, xa, xv));
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1, 2}, {16, 64, 256}});

// one minibatch of 64 sub-sequences, loss and all gradients
void BM_LossAndGrads(benchmark::State& state) {
  const ModelKind kind = kKinds[state.range(0)];
  const JcaDims dims{};
  const ModelParams params = init_model(kind, dims, 1);
  Rng rng(3);
  const Dataset batch = make_batch(dims, 64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grads(params, batch, Target::Valence));
  state.SetLabel(to_string(kind));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LossAndGrads)->DenseRange(0, 2);

}  // namespace
