#include <algorithm>
#include <cmath>
#include <cstring>

#include "binary_io.hpp"
#include "jca/audio.hpp"
#include "jca/errors.hpp"

namespace jca {

namespace {

std::uint16_t u16_at(const std::vector<char>& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint32_t u32_at(const std::vector<char>& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

}  // namespace

AudioClip decode_wav(const std::vector<char>& b, const std::string& source) {
  auto unsupported = [&](const std::string& why) {
    return FormatError(FormatError::Kind::Malformed, source + ": unsupported audio container: " + why);
  };
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(FormatError::Kind::BadMagic,
                      source + ": unsupported audio container (expected RIFF/WAVE)");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::string id(b.data() + at, 4);
    const std::uint32_t size = u32_at(b, at + 4);
    const std::size_t body = at + 8;
    if (body + size > b.size()) {
      throw FormatError(FormatError::Kind::Truncated, source + ": chunk '" + id + "' is truncated");
    }
    if (id == "fmt ") {
      if (size < 16) throw unsupported("short fmt chunk");
      format = u16_at(b, body);
      channels = u16_at(b, body + 2);
      rate = u32_at(b, body + 4);
      bits = u16_at(b, body + 14);
      if (format == 0xFFFE && size >= 26) format = u16_at(b, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw unsupported("data chunk before fmt chunk");
      if (channels != 1) throw unsupported(std::to_string(channels) + " channels, expected mono");
      AudioClip clip;
      clip.sample_rate = rate;
      if (format == 1 && bits == 16) {
        clip.samples.resize(size / 2);
        for (std::size_t i = 0; i < clip.samples.size(); ++i) {
          const auto v = static_cast<std::int16_t>(u16_at(b, body + 2 * i));
          clip.samples[i] = static_cast<double>(v) / 32768.0;
        }
      } else if (format == 3 && bits == 32) {
        clip.samples.resize(size / 4);
        for (std::size_t i = 0; i < clip.samples.size(); ++i) {
          float f;
          const std::uint32_t raw = u32_at(b, body + 4 * i);
          std::memcpy(&f, &raw, 4);
          clip.samples[i] = f;
        }
      } else {
        throw unsupported("format " + std::to_string(format) + " with " + std::to_string(bits) +
                          " bits per sample");
      }
      return clip;
    }
    at = body + size + (size & 1u);
  }
  throw unsupported("no data chunk");
}

AudioClip read_wav(const std::string& path) { return decode_wav(detail::read_file(path), path); }

void write_wav(const std::string& path, const AudioClip& clip) {
  detail::ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  w.bytes("RIFF");
  w.u32(36 + data_bytes);
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  w.u32(1u | (1u << 16));       // PCM, mono
  w.u32(rate);
  w.u32(rate * 2);              // byte rate
  w.u32(2u | (16u << 16));      // block align, bits per sample
  w.bytes("data");
  w.u32(data_bytes);
  std::vector<char> buf = w.buffer();
  for (double s : clip.samples) {
    const auto v = static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0, 32767.0 / 32768.0) * 32768.0));
    const auto u = static_cast<std::uint16_t>(v);
    buf.push_back(static_cast<char>(u & 0xff));
    buf.push_back(static_cast<char>(u >> 8));
  }
  detail::write_file(path, buf);
}

}  // namespace jca
