#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jca/matrix.hpp"

namespace jca {

enum class WindowKind { Hann, Hamming, Rectangular };
enum class BandMode { Linear, Mel };
enum class NormScope { Global, PerBand };

struct SpectrogramConfig {
  double sample_rate = 44100.0;
  std::size_t dft_length = 1024;
  double window_ms = 20.0;
  double hop_ms = 10.0;
  std::size_t bands = 64;
  double db_floor = -80.0;
  WindowKind window = WindowKind::Hann;
  BandMode band_mode = BandMode::Linear;
  NormScope norm = NormScope::Global;
  /// Zero-pad the end by (window - hop) samples so each complete hop of
  /// signal starts a frame: frames = floor(n / hop). When false, frames =
  /// 1 + floor((n - window) / hop).
  bool pad_end = true;

  std::size_t window_samples() const;
  std::size_t hop_samples() const;
  std::size_t bins() const noexcept { return dft_length / 2 + 1; }
  void validate() const;
};

inline constexpr double kTargetSampleRate = 44100.0;

/// Linear-interpolation resampling to `dst_rate`; output length is
/// round(n * dst_rate / src_rate).
std::vector<double> resample(std::span<const double> signal, double src_rate,
                             double dst_rate = kTargetSampleRate);

/// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data);

/// Number of analysis frames for an n-sample signal.
std::size_t frame_count(std::size_t n, const SpectrogramConfig& config);

/// frames x bins linear power |X_k|^2 of the windowed frames.
Matrix power_frames(std::span<const double> signal, const SpectrogramConfig& config);

/// bands x frames dB spectrogram before normalization (floored, band-averaged).
Matrix log_band_spectrogram(std::span<const double> signal, const SpectrogramConfig& config);

/// Full pipeline: windowed DFT power, dB with floor, band averaging and
/// mean-variance normalization. Returns bands x frames.
Matrix spectrogram(std::span<const double> signal, const SpectrogramConfig& config = {});

/// Bins covered by each linear band: band b holds [b*w, (b+1)*w) with
/// w = bins / bands; the last band absorbs the remainder.
std::vector<std::pair<std::size_t, std::size_t>> linear_band_edges(std::size_t bins,
                                                                   std::size_t bands);

// ---------------------------------------------------------------------------
// WAVE container (mono, 16-bit PCM or 32-bit float).

struct AudioClip {
  double sample_rate = 0.0;
  std::vector<double> samples;  ///< in [-1, 1]
};

AudioClip read_wav(const std::string& path);
AudioClip decode_wav(const std::vector<char>& bytes, const std::string& source = "<memory>");
/// Writes 16-bit PCM mono.
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace jca
