#include "jca/audio.hpp"

#include <cmath>
#include <numbers>

#include "jca/errors.hpp"

namespace jca {

std::size_t SpectrogramConfig::window_samples() const {
  return static_cast<std::size_t>(std::lround(window_ms * 1e-3 * sample_rate));
}

std::size_t SpectrogramConfig::hop_samples() const {
  return static_cast<std::size_t>(std::lround(hop_ms * 1e-3 * sample_rate));
}

void SpectrogramConfig::validate() const {
  if (dft_length < 2 || (dft_length & (dft_length - 1)) != 0) {
    throw ConfigError("DFT length must be a power of two, got " + std::to_string(dft_length));
  }
  const std::size_t win = window_samples();
  const std::size_t hop = hop_samples();
  if (win == 0 || hop == 0) throw ConfigError("window and hop must be at least one sample");
  if (win > dft_length) {
    throw ConfigError("window of " + std::to_string(win) + " samples exceeds DFT length " +
                      std::to_string(dft_length));
  }
  if (hop > win) throw ConfigError("hop exceeds window");
  if (bands == 0 || bands > bins()) {
    throw ConfigError("band count must lie in [1, " + std::to_string(bins()) + "]");
  }
}

std::vector<double> resample(std::span<const double> signal, double src_rate, double dst_rate) {
  if (signal.empty()) throw ConfigError("resample: empty signal");
  if (!(src_rate > 0.0) || !(dst_rate > 0.0)) throw ConfigError("resample: rates must be positive");
  if (src_rate == dst_rate) return {signal.begin(), signal.end()};
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(signal.size()) * dst_rate / src_rate));
  std::vector<double> out(n_out);
  const double step = src_rate / dst_rate;
  const std::size_t last = signal.size() - 1;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto left = std::min(static_cast<std::size_t>(pos), last);
    const std::size_t right = std::min(left + 1, last);
    const double frac = pos - static_cast<double>(left);
    out[i] = signal[left] + (signal[right] - signal[left]) * std::min(frac, 1.0);
  }
  return out;
}

void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

namespace {

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
    if (kind == WindowKind::Hann) w[i] = 0.5 - 0.5 * c;
    if (kind == WindowKind::Hamming) w[i] = 0.54 - 0.46 * c;
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// bands x bins averaging weights, each row summing to 1.
Matrix band_weights(const SpectrogramConfig& cfg) {
  const std::size_t bins = cfg.bins();
  Matrix w(cfg.bands, bins);
  if (cfg.band_mode == BandMode::Linear) {
    const auto edges = linear_band_edges(bins, cfg.bands);
    for (std::size_t b = 0; b < cfg.bands; ++b) {
      const double share = 1.0 / static_cast<double>(edges[b].second - edges[b].first);
      for (std::size_t k = edges[b].first; k < edges[b].second; ++k) w(b, k) = share;
    }
    return w;
  }
  const double bin_hz = cfg.sample_rate / static_cast<double>(cfg.dft_length);
  const double mel_max = hz_to_mel(cfg.sample_rate / 2.0);
  for (std::size_t b = 0; b < cfg.bands; ++b) {
    const double lo = mel_to_hz(mel_max * static_cast<double>(b) / static_cast<double>(cfg.bands + 1));
    const double mid = mel_to_hz(mel_max * static_cast<double>(b + 1) / static_cast<double>(cfg.bands + 1));
    const double hi = mel_to_hz(mel_max * static_cast<double>(b + 2) / static_cast<double>(cfg.bands + 1));
    double total = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double v = 0.0;
      if (f > lo && f <= mid) v = (f - lo) / (mid - lo);
      if (f > mid && f < hi) v = (hi - f) / (hi - mid);
      w(b, k) = v;
      total += v;
    }
    if (total == 0.0) {
      // triangle narrower than a bin: take the nearest bin
      const auto k = std::min(bins - 1, static_cast<std::size_t>(std::lround(mid / bin_hz)));
      w(b, k) = 1.0;
      total = 1.0;
    }
    for (std::size_t k = 0; k < bins; ++k) w(b, k) /= total;
  }
  return w;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> linear_band_edges(std::size_t bins,
                                                                   std::size_t bands) {
  const std::size_t width = bins / bands;
  std::vector<std::pair<std::size_t, std::size_t>> edges(bands);
  for (std::size_t b = 0; b < bands; ++b) edges[b] = {b * width, (b + 1) * width};
  edges.back().second = bins;
  return edges;
}

std::size_t frame_count(std::size_t n, const SpectrogramConfig& config) {
  const std::size_t win = config.window_samples();
  const std::size_t hop = config.hop_samples();
  if (n < win) return 0;
  const std::size_t padded = config.pad_end ? n + (win - hop) : n;
  return 1 + (padded - win) / hop;
}

Matrix power_frames(std::span<const double> signal, const SpectrogramConfig& config) {
  config.validate();
  const std::size_t win = config.window_samples();
  const std::size_t hop = config.hop_samples();
  if (signal.size() < win) {
    throw ConfigError("signal too short: " + std::to_string(signal.size()) +
                      " samples, need at least one window of " + std::to_string(win));
  }
  const std::size_t frames = frame_count(signal.size(), config);
  const auto window = make_window(config.window, win);
  Matrix power(frames, config.bins());
  std::vector<std::complex<double>> buf(config.dft_length);
  for (std::size_t f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < win; ++i) {
      const std::size_t at = start + i;
      const double x = at < signal.size() ? signal[at] : 0.0;
      buf[i] = x * window[i];
    }
    fft(buf);
    for (std::size_t k = 0; k < config.bins(); ++k) power(f, k) = std::norm(buf[k]);
  }
  return power;
}

Matrix log_band_spectrogram(std::span<const double> signal, const SpectrogramConfig& config) {
  Matrix power = power_frames(signal, config);
  for (double& v : power.data()) v = std::max(10.0 * std::log10(v + 1e-10), config.db_floor);
  // (bands x bins) * (bins x frames)
  return matmul(band_weights(config), transpose(power));
}

Matrix spectrogram(std::span<const double> signal, const SpectrogramConfig& config) {
  Matrix spec = log_band_spectrogram(signal, config);
  constexpr double kVarianceFloor = 1e-8;
  auto normalize = [&](std::size_t row_begin, std::size_t row_end) {
    double mean = 0.0;
    const double count = static_cast<double>((row_end - row_begin) * spec.cols());
    for (std::size_t r = row_begin; r < row_end; ++r)
      for (double v : spec.row_span(r)) mean += v;
    mean /= count;
    double var = 0.0;
    for (std::size_t r = row_begin; r < row_end; ++r)
      for (double v : spec.row_span(r)) var += (v - mean) * (v - mean);
    var /= count;
    const double inv_std = 1.0 / std::sqrt(std::max(var, kVarianceFloor));
    for (std::size_t r = row_begin; r < row_end; ++r)
      for (double& v : spec.row_span(r)) v = (v - mean) * inv_std;
  };
  if (config.norm == NormScope::Global) {
    normalize(0, spec.rows());
  } else {
    for (std::size_t b = 0; b < spec.rows(); ++b) normalize(b, b + 1);
  }
  return spec;
}

}  // namespace jca
