#include "jca/model.hpp"

#include "jca/errors.hpp"

namespace jca {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Jca: return "jca";
    case ModelKind::Concat: return "concat";
    case ModelKind::VanillaCa: return "vanilla-ca";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "jca") return ModelKind::Jca;
  if (s == "concat") return ModelKind::Concat;
  if (s == "vanilla-ca") return ModelKind::VanillaCa;
  throw ConfigError("unknown model '" + s + "' (expected jca|concat|vanilla-ca)");
}

ModelKind kind_of(const ModelParams& params) {
  switch (params.index()) {
    case 0: return ModelKind::Jca;
    case 1: return ModelKind::Concat;
    default: return ModelKind::VanillaCa;
  }
}

const JcaDims& dims_of(const ModelParams& params) {
  return std::visit([](const auto& p) -> const JcaDims& { return p.dims; }, params);
}

ModelParams init_model(ModelKind kind, const JcaDims& dims, std::uint64_t seed) {
  switch (kind) {
    case ModelKind::Jca: return xavier_init(dims, seed);
    case ModelKind::Concat: return concat_init(dims, seed);
    case ModelKind::VanillaCa: return vanilla_ca_init(dims, seed);
  }
  throw ConfigError("unknown model kind");
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Matrix model_forward(const ModelParams& params, const ModalityFeatures& xa,
                     const ModalityFeatures& xv, const std::optional<Matrix>& dropout_mask) {
  return std::visit(
      Overloaded{
          [&](const JcaParams& p) { return forward(p, xa, xv, dropout_mask).y_hat; },
          [&](const ConcatParams& p) { return concat_forward_full(p, xa, xv, dropout_mask).y_hat; },
          [&](const VanillaCaParams& p) {
            return vanilla_ca_forward_full(p, xa, xv, dropout_mask).y_hat;
          },
      },
      params);
}

Matrix model_predict(const ModelParams& params, const ModalityFeatures& xa,
                     const ModalityFeatures& xv) {
  return clip_predictions(model_forward(params, xa, xv));
}

std::size_t dropout_width(const ModelParams& params) { return dims_of(params).joint_dim(); }

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto& slot : param_slots(params)) n += slot.value->size();
  return n;
}

std::vector<ParamSlot> param_slots(ModelParams& params) {
  std::vector<ParamSlot> out;
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        P::visit(p, [&](const char* name, Matrix& m, bool bias) { out.push_back({name, &m, bias}); });
      },
      params);
  return out;
}

std::vector<ConstParamSlot> param_slots(const ModelParams& params) {
  std::vector<ConstParamSlot> out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        P::visit(p, [&](const char* name, const Matrix& m, bool bias) {
          out.push_back({name, &m, bias});
        });
      },
      params);
  return out;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out = params;
  for (auto& slot : param_slots(out)) *slot.value = Matrix(slot.value->rows(), slot.value->cols());
  return out;
}

bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  if (a.index() != b.index() || !(dims_of(a) == dims_of(b))) return false;
  auto sa = param_slots(a);
  auto sb = param_slots(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (!bitwise_equal(*sa[i].value, *sb[i].value)) return false;
  return true;
}

}  // namespace jca
