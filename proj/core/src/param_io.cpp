#include "jca/param_io.hpp"

#include <fstream>
#include <iterator>

#include "binary_io.hpp"
#include "jca/errors.hpp"

namespace jca {

namespace detail {

std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<char>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace detail

const char* param_magic(ModelKind kind) {
  switch (kind) {
    case ModelKind::Jca: return "JCAP";
    case ModelKind::Concat: return "CONP";
    case ModelKind::VanillaCa: return "VCAP";
  }
  return "????";
}

std::vector<char> encode_params(const ModelParams& params) {
  detail::ByteWriter w;
  const JcaDims& d = dims_of(params);
  w.bytes(param_magic(kind_of(params)));
  w.u32(kParamFormatVersion);
  for (std::size_t v : {d.clips, d.audio_dim, d.visual_dim, d.attn_dim, d.head_hidden, d.outputs})
    w.u32(static_cast<std::uint32_t>(v));
  for (const auto& slot : param_slots(params)) {
    w.u32(static_cast<std::uint32_t>(slot.value->rows()));
    w.u32(static_cast<std::uint32_t>(slot.value->cols()));
    for (double v : slot.value->data()) w.f64(v);
  }
  return w.buffer();
}

ModelParams decode_params(const std::vector<char>& bytes, const std::string& source) {
  detail::ByteReader r(bytes, source);
  const std::string magic = r.bytes(4);
  ModelKind kind;
  if (magic == "JCAP") {
    kind = ModelKind::Jca;
  } else if (magic == "CONP") {
    kind = ModelKind::Concat;
  } else if (magic == "VCAP") {
    kind = ModelKind::VanillaCa;
  } else {
    throw FormatError(FormatError::Kind::BadMagic,
                      source + ": bad magic '" + magic + "', expected JCAP, CONP or VCAP");
  }
  const std::uint32_t version = r.u32();
  if (version != kParamFormatVersion) {
    throw FormatError(FormatError::Kind::VersionMismatch,
                      source + ": parameter format version " + std::to_string(version) +
                          ", expected " + std::to_string(kParamFormatVersion));
  }
  JcaDims dims;
  dims.clips = r.u32();
  dims.audio_dim = r.u32();
  dims.visual_dim = r.u32();
  dims.attn_dim = r.u32();
  dims.head_hidden = r.u32();
  dims.outputs = r.u32();
  try {
    dims.validate();
  } catch (const ConfigError& e) {
    throw FormatError(FormatError::Kind::Malformed, source + ": " + e.what());
  }

  // init gives correctly shaped matrices; every value is then overwritten
  ModelParams params = init_model(kind, dims, 0);
  for (auto& slot : param_slots(params)) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != slot.value->rows() || cols != slot.value->cols()) {
      throw FormatError(FormatError::Kind::Malformed,
                        source + ": " + std::string(slot.name) + " stored as " +
                            std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                            slot.value->shape_string());
    }
    r.need(static_cast<std::size_t>(rows) * cols * 8);
    for (double& v : slot.value->data()) v = r.f64();
  }
  if (r.remaining() != 0) {
    throw FormatError(FormatError::Kind::Malformed,
                      source + ": " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return params;
}

void save_params(const std::string& path, const ModelParams& params) {
  detail::write_file(path, encode_params(params));
}

ModelParams load_params(const std::string& path) { return decode_params(detail::read_file(path), path); }

}  // namespace jca
