#pragma once

#include <string>
#include <vector>

#include "jca/model.hpp"

namespace jca {

/// Parameter files start with a 4-byte magic naming the model kind
/// ("JCAP", "CONP", "VCAP"), then u32 format version, six u32 dims
/// (L, d_a, d_v, k, head_hidden, outputs) and every matrix in slot order as
/// u32 rows, u32 cols, rows*cols little-endian doubles.
inline constexpr std::uint32_t kParamFormatVersion = 1;

const char* param_magic(ModelKind kind);

std::vector<char> encode_params(const ModelParams& params);
ModelParams decode_params(const std::vector<char>& bytes, const std::string& source = "<memory>");

void save_params(const std::string& path, const ModelParams& params);
ModelParams load_params(const std::string& path);

}  // namespace jca
