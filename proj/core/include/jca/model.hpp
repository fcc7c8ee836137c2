#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jca/baselines.hpp"
#include "jca/fusion.hpp"

namespace jca {

enum class ModelKind { Jca, Concat, VanillaCa };

const char* to_string(ModelKind kind);
/// Parses "jca" | "concat" | "vanilla-ca".
ModelKind parse_model_kind(const std::string& s);

using ModelParams = std::variant<JcaParams, ConcatParams, VanillaCaParams>;

ModelKind kind_of(const ModelParams& params);
const JcaDims& dims_of(const ModelParams& params);

ModelParams init_model(ModelKind kind, const JcaDims& dims, std::uint64_t seed);

/// Unclipped L x outputs predictions of any model kind.
Matrix model_forward(const ModelParams& params, const ModalityFeatures& xa,
                     const ModalityFeatures& xv,
                     const std::optional<Matrix>& dropout_mask = std::nullopt);
/// Inference: no dropout, clipped to [-1, 1].
Matrix model_predict(const ModelParams& params, const ModalityFeatures& xa,
                     const ModalityFeatures& xv);

/// Columns of the matrix the dropout mask is applied to.
std::size_t dropout_width(const ModelParams& params);

std::size_t param_count(const ModelParams& params);

struct ParamSlot {
  std::string_view name;
  Matrix* value;
  bool is_bias;
};

struct ConstParamSlot {
  std::string_view name;
  const Matrix* value;
  bool is_bias;
};

/// Every trainable matrix in serialization order.
std::vector<ParamSlot> param_slots(ModelParams& params);
std::vector<ConstParamSlot> param_slots(const ModelParams& params);

/// Same kind and dims, every matrix zero.
ModelParams zeros_like(const ModelParams& params);

/// Bitwise equality of kind, dims and every matrix.
bool bitwise_equal(const ModelParams& a, const ModelParams& b);

}  // namespace jca
