// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "jca/audio.hpp"
#include "jca/gradients.hpp"
#include "jca/metrics.hpp"
#include "jca/param_io.hpp"
#include "jca/synth.hpp"
#include "jca/training.hpp"
#include "jca_cli/cli.hpp"
#include "oracle.hpp"

namespace jca {
namespace {

namespace fs = std::filesystem;
using testing::random_matrix;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.next_u64() % (hi - lo + 1); }

constexpr ModelKind kKinds[] = {ModelKind::Jca, ModelKind::Concat, ModelKind::VanillaCa};

// 1 -------------------------------------------------------------------------

Outcome forward_oracle() {
  Rng rng(101);
  double worst[3] = {0, 0, 0};
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) {
    const JcaDims dims{pick(rng, 1, 4), pick(rng, 1, 5),
                       pick(rng, 1, 5), pick(rng, 1, 4)};
    const Matrix xa = random_matrix(dims.clips, dims.audio_dim, rng);
    const Matrix xv = random_matrix(dims.clips, dims.visual_dim, rng);
    const ModalityFeatures fa(xa, Modality::Audio), fv(xv, Modality::Visual);
    for (std::size_t k = 0; k < 3; ++k) {
      const ModelParams p = init_model(kKinds[k], dims, rng.next_u64());
      oracle::Grid ref;
      if (k == 0) ref = oracle::jca(std::get<JcaParams>(p), xa, xv).y;
      if (k == 1) ref = oracle::concat(std::get<ConcatParams>(p), xa, xv);
      if (k == 2) ref = oracle::vanilla_ca(std::get<VanillaCaParams>(p), xa, xv);
      worst[k] = std::max(worst[k], max_abs_diff(model_forward(p, fa, fv), oracle::to_matrix(ref)));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = worst[0] <= 1e-12 && worst[1] <= 1e-12 && worst[2] <= 1e-12 && secs < 10.0;
  return {ok, fmt("100 instances, max |diff| jca %.2e concat %.2e vanilla_ca %.2e, %.2fs", worst[0], worst[1],
                  worst[2], secs)};
}

// 2 -------------------------------------------------------------------------

Outcome gradient_check() {
  Rng rng(202);
  const JcaDims dims{3, 3, 3, 2};
  std::size_t failures = 0, kinks = 0, rejected = 0;
  double worst = 0.0;
  std::string first_failure;
  const auto t0 = std::chrono::steady_clock::now();
  for (ModelKind kind : kKinds) {
    for (int i = 0; i < 20; ++i) {
      ModelParams p = init_model(kind, dims, rng.next_u64());
      Dataset batch = testing::random_batch(dims, 2, rng);
      while (min_relu_margin(p, batch) < 1e-3) {
        ++rejected;
        p = init_model(kind, dims, rng.next_u64());
        batch = testing::random_batch(dims, 2, rng);
      }
      const GradCheckReport r = grad_check(p, batch, Target::Valence, {}, {.tol = 1e-4, .step = 1e-6});
      for (const auto& c : r.params) {
        worst = std::max(worst, c.max_rel_error);
        kinks += c.kink_entries;
      }
      if (!r.passed()) {
        ++failures;
        if (first_failure.empty()) first_failure = std::string(" first failure ") + to_string(kind) + "\n" + r.to_table();
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {failures == 0 && kinks == 0 && secs < 120.0,
          fmt("60 checks, %zu failed, max rel err %.2e, %zu kink entries, %zu resampled, %.1fs", failures, worst,
              kinks, rejected, secs) +
              first_failure};
}

// 3 -------------------------------------------------------------------------

Outcome ccc_identities() {
  Rng rng(303);
  double self_err = 0.0, const_worst = 0.0, asym = 0.0, abs_max = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = pick(rng, 2, 64);
    std::vector<double> x(n), y(n), c(n, rng.uniform(-1, 1));
    const double slope = rng.uniform(-2, 2), offset = rng.uniform(-1, 1), noise = rng.uniform(0, 1);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = rng.uniform(-1, 1);
      y[j] = slope * x[j] + offset + noise * rng.uniform(-1, 1);
    }
    self_err = std::max(self_err, std::abs(ccc(x, x).rho_c - 1.0));
    const_worst = std::max({const_worst, std::abs(ccc(c, x).rho_c), std::abs(ccc(x, c).rho_c)});
    const double xy = ccc(x, y).rho_c, yx = ccc(y, x).rho_c;
    asym = std::max(asym, std::abs(xy - yx));
    abs_max = std::max(abs_max, std::abs(xy));
  }
  const std::vector<double> x{-1, 0, 1}, y{-0.7, 0.3, 1.3};
  const double shift = ccc(x, y).rho_c;
  const std::vector<double> flat(3, 0.3);
  const double fixed_const = ccc(flat, x).rho_c;
  const bool ok = self_err <= 1e-12 && const_worst <= 1e-12 && fixed_const == 0.0 &&
                  std::abs(shift - 0.93677) <= 1e-5 && asym <= 1e-12 && abs_max <= 1.0;
  return {ok, fmt("self max err %.1e, constant max |rho| %.1e, shift %.8f, asym %.1e, max |rho| %.4f", self_err,
                  const_worst, shift, asym, abs_max)};
}

// 4 -------------------------------------------------------------------------

Outcome residual_identity() {
  Rng rng(404);
  int mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    const JcaDims dims{pick(rng, 1, 8), pick(rng, 1, 8),
                       pick(rng, 1, 8), pick(rng, 1, 6)};
    JcaParams p = xavier_init(dims, rng.next_u64());
    for (Matrix* m : {&p.w_ja, &p.w_jv, &p.w_a, &p.w_v, &p.w_ca, &p.w_cv, &p.w_ha, &p.w_hv})
      *m = Matrix(m->rows(), m->cols());
    const Matrix xa = random_matrix(dims.clips, dims.audio_dim, rng, 3.0);
    const Matrix xv = random_matrix(dims.clips, dims.visual_dim, rng, 3.0);
    const Matrix att = forward(p, ModalityFeatures(xa, Modality::Audio), ModalityFeatures(xv, Modality::Visual)).attended;
    bool same = att.rows() == dims.clips && att.cols() == dims.joint_dim();
    for (std::size_t r = 0; same && r < dims.clips; ++r) {
      for (std::size_t j = 0; j < dims.visual_dim; ++j) same = same && att(r, j) == xv(r, j);
      for (std::size_t j = 0; j < dims.audio_dim; ++j) same = same && att(r, dims.visual_dim + j) == xa(r, j);
    }
    mismatches += same ? 0 : 1;
  }
  return {mismatches == 0, fmt("50 instances, %d not bitwise equal to [X_v | X_a]", mismatches)};
}

// 5 -------------------------------------------------------------------------

Outcome complementarity_ordering() {
  std::vector<double> jca, concat;
  std::string per_seed;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t seed : {1, 2, 3}) {
    SynthConfig sc;
    sc.seed = seed;
    const SynthDatasets data = synth_datasets(sc);
    TrainConfig tc;
    tc.seed = seed;
    jca.push_back(train(ModelKind::Jca, JcaDims{}, data.train, data.val, tc).history.best_val_ccc);
    concat.push_back(train(ModelKind::Concat, JcaDims{}, data.train, data.val, tc).history.best_val_ccc);
    per_seed += fmt(" seed %llu: jca %.4f concat %.4f;", static_cast<unsigned long long>(seed), jca.back(),
                    concat.back());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int wins = 0;
  for (std::size_t i = 0; i < 3; ++i) wins += jca[i] > concat[i] ? 1 : 0;
  auto median = [](std::vector<double> v) {
    std::ranges::sort(v);
    return v[1];
  };
  const double gap = median(jca) - median(concat);
  return {gap >= 0.02 && wins >= 2 && secs < 600.0,
          fmt("median gap %.4f, jca wins %d/3,", gap, wins) + per_seed + fmt(" %.0fs", secs)};
}

// CLI helpers ----------------------------------------------------------------

int jca_run(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != cli::kExitOk) std::fprintf(stderr, "jca %s failed (%d): %s\n", args[0].c_str(), code, e.str().c_str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

/// Predicted column of predictions.csv.
std::vector<double> read_predictions(const fs::path& csv_path) {
  std::istringstream csv(slurp(csv_path));
  std::string line;
  std::getline(csv, line);
  std::vector<double> preds;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() >= 3) preds.push_back(std::stod(cells[2]));
  }
  return preds;
}

double report_ccc(const fs::path& eval_dir) {
  return nlohmann::json::parse(slurp(eval_dir / "eval_report.json"))[0]["rho_c"].get<double>();
}

// 6 -------------------------------------------------------------------------

Outcome capacity() {
  TempDir dir("capacity");
  const std::string data = dir.file("data"), run = dir.file("run");
  if (jca_run({"synth", "--train-sequences", "4", "--val-sequences", "2", "--test-sequences", "1",
               "--subsequences", "8", "--seed", "1", "--out", data}) != 0)
    return {false, "synth failed"};
  if (jca_run({"train", "--model", "jca", "--train-manifest", data + "/train.manifest.json", "--val-manifest",
               data + "/val.manifest.json", "--dropout", "0", "--weight-decay", "0", "--max-epochs", "500",
               "--patience", "500", "--seed", "1", "--out", run}) != 0)
    return {false, "train failed"};

  std::size_t hit = 0, epochs = 0;
  double best = -1.0;
  std::istringstream log(slurp(fs::path(run) / "history.log"));
  for (std::string line; std::getline(log, line);) {
    const std::size_t epoch = std::stoul(line.substr(line.find("epoch=") + 6));
    const double train_ccc = std::stod(line.substr(line.find("train_ccc=") + 10));
    epochs = epoch;
    best = std::max(best, train_ccc);
    if (!hit && train_ccc >= 0.95) hit = epoch;
  }
  const std::size_t train_subseq = 4 * 8;
  if (!hit) return {false, fmt("%zu sub-sequences, %zu epochs, best train CCC %.4f < 0.95", train_subseq, epochs, best)};

  const std::string ckpt = run + fmt("/checkpoints/epoch_%03zu.params", hit);
  if (jca_run({"eval", "--checkpoint", ckpt, "--manifest", data + "/train.manifest.json", "--out", run + "/eval"}) != 0)
    return {false, "eval failed"};
  const double evaluated = report_ccc(fs::path(run) / "eval");
  return {evaluated >= 0.95,
          fmt("%zu train sub-sequences, train CCC >= 0.95 first at epoch %zu, eval of that checkpoint on the "
              "train split %.4f",
              train_subseq, hit, evaluated)};
}

// 7 -------------------------------------------------------------------------

Outcome spectrogram_shape() {
  const double rate = 44100.0;
  const auto n = static_cast<std::size_t>(std::lround(1.07 * rate));
  std::vector<double> tone(n);
  for (std::size_t i = 0; i < n; ++i) tone[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / rate);

  const SpectrogramConfig config;
  const Matrix spec = spectrogram(tone, config);

  // DFT bin nearest 1 kHz, then the linear band holding it
  const double bin = std::round(1000.0 * static_cast<double>(config.dft_length) / rate);
  const auto expected_band = static_cast<std::size_t>(bin / (static_cast<double>(config.bins()) / config.bands));
  const Matrix energy = log_band_spectrogram(tone, config);
  std::size_t off_peak = 0;
  for (std::size_t f = 0; f < energy.cols(); ++f) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < energy.rows(); ++b)
      if (energy(b, f) > energy(best, f)) best = b;
    off_peak += best == expected_band ? 0 : 1;
  }
  return {spec.rows() == 64 && spec.cols() == 107 && off_peak == 0,
          fmt("%zu samples -> %zu x %zu; 1 kHz peak band %zu, %zu frames elsewhere", n, spec.rows(), spec.cols(),
              expected_band, off_peak)};
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
  TempDir dir("determinism");
  const std::string root = dir.file("work");
  auto pipeline = [&]() -> bool {
    const std::string data = root + "/data", run = root + "/run";
    return jca_run({"synth", "--train-sequences", "8", "--val-sequences", "3", "--test-sequences", "2",
                    "--subsequences", "4", "--seed", "11", "--out", data}) == 0 &&
           jca_run({"train", "--model", "jca", "--train-manifest", data + "/train.manifest.json", "--val-manifest",
                    data + "/val.manifest.json", "--max-epochs", "4", "--seed", "11", "--out", run}) == 0 &&
           jca_run({"eval", "--checkpoint", run + "/best.params", "--manifest", data + "/test.manifest.json",
                    "--out", run + "/eval"}) == 0;
  };
  if (!pipeline()) return {false, "first run failed"};
  const auto first = snapshot(root);
  fs::remove_all(root);
  if (!pipeline()) return {false, "second run failed"};
  const auto second = snapshot(root);

  std::size_t differing = 0;
  std::string example;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) {
      ++differing;
      if (example.empty()) example = " e.g. " + name;
    }
  }
  differing += second.size() > first.size() ? second.size() - first.size() : 0;
  return {differing == 0 && !first.empty(),
          fmt("synth+train+eval twice, %zu files compared, %zu differ", first.size(), differing) + example};
}

// 9 -------------------------------------------------------------------------

Outcome prediction_range() {
  TempDir dir("range");
  const std::string data = dir.file("data"), run = dir.file("run");
  if (jca_run({"synth", "--train-sequences", "6", "--val-sequences", "2", "--test-sequences", "2",
               "--subsequences", "4", "--seed", "5", "--out", data}) != 0 ||
      jca_run({"train", "--model", "jca", "--train-manifest", data + "/train.manifest.json", "--val-manifest",
               data + "/val.manifest.json", "--max-epochs", "3", "--seed", "5", "--out", run}) != 0)
    return {false, "setup failed"};

  // a second checkpoint with an amplified head pushes raw outputs well past the label range
  ModelParams loud = load_params(run + "/best.params");
  for (auto& slot : param_slots(loud))
    if (slot.name.starts_with("head."))
      for (double& v : slot.value->data()) v *= 50.0;
  save_params(run + "/loud.params", loud);

  std::size_t total = 0, outside = 0, saturated = 0;
  for (const char* ckpt : {"best", "loud"})
    for (const char* split : {"train", "val", "test"}) {
      const std::string out = run + "/eval-" + ckpt + "-" + split;
      if (jca_run({"eval", "--checkpoint", run + "/" + ckpt + ".params", "--manifest",
                   data + "/" + split + ".manifest.json", "--out", out}) != 0)
        return {false, std::string("eval failed for ") + ckpt + " on " + split};
      for (double p : read_predictions(fs::path(out) / "predictions.csv")) {
        ++total;
        outside += (p < -1.0 || p > 1.0) ? 1 : 0;
        saturated += std::abs(p) == 1.0 ? 1 : 0;
      }
    }
  return {total > 0 && outside == 0 && saturated > 0,
          fmt("%zu predictions, %zu outside [-1, 1], %zu clipped to the bound", total, outside, saturated)};
}

}  // namespace
}  // namespace jca

int main() {
  using namespace jca;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"forward oracle equivalence", forward_oracle},
      {"gradient verification", gradient_check},
      {"CCC identities", ccc_identities},
      {"residual identity", residual_identity},
      {"complementarity ordering", complementarity_ordering},
      {"capacity sanity", capacity},
      {"spectrogram shape", spectrogram_shape},
      {"determinism", determinism},
      {"prediction range", prediction_range},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
