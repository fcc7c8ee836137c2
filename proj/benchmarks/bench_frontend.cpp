#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "jca/audio.hpp"
#include "jca/metrics.hpp"
#include "jca/rng.hpp"

namespace {

// one 1.07 s sub-sequence at 44.1 kHz
void BM_Spectrogram(benchmark::State& state) {
  std::vector<double> x(47187);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 44100.0);
  for (auto _ : state) benchmark::DoNotOptimize(jca::spectrogram(x));
}
BENCHMARK(BM_Spectrogram)->Unit(benchmark::kMillisecond);

void BM_Ccc(benchmark::State& state) {
  jca::Rng rng(1);
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
    y[i] = 0.5 * x[i] + rng.uniform(-0.5, 0.5);
  }
  for (auto _ : state) benchmark::DoNotOptimize(jca::ccc(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ccc)->RangeMultiplier(8)->Range(64, 32768);

}  // namespace
