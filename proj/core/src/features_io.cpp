#include "binary_io.hpp"
#include "jca/data.hpp"
#include "jca/errors.hpp"

namespace jca {

std::vector<char> encode_features(const Matrix& m) {
  detail::ByteWriter w;
  w.bytes("AVF1");
  w.u32(kFeatureFormatVersion);
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) w.f64(v);
  return w.buffer();
}

Matrix decode_features(const std::vector<char>& bytes, const std::string& source) {
  detail::ByteReader r(bytes, source);
  const std::string magic = r.bytes(4);
  if (magic != "AVF1") {
    throw FormatError(FormatError::Kind::BadMagic,
                      source + ": bad magic '" + magic + "', expected 'AVF1'");
  }
  const std::uint32_t version = r.u32();
  if (version != kFeatureFormatVersion) {
    throw FormatError(FormatError::Kind::VersionMismatch,
                      source + ": feature format version " + std::to_string(version) +
                          ", expected " + std::to_string(kFeatureFormatVersion));
  }
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  r.need(count * 8);
  std::vector<double> data(count);
  for (double& v : data) v = r.f64();
  if (r.remaining() != 0) {
    throw FormatError(FormatError::Kind::Malformed,
                      source + ": " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return Matrix(rows, cols, std::move(data));
}

void write_features(const std::string& path, const Matrix& m) {
  detail::write_file(path, encode_features(m));
}

Matrix read_features(const std::string& path) {
  return decode_features(detail::read_file(path), path);
}

}  // namespace jca
