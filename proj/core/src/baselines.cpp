#include "jca/baselines.hpp"

#include "attention_branch.hpp"
#include "jca/errors.hpp"

namespace jca {

namespace {

void expect_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
  if (m.rows() != r || m.cols() != c) {
    throw ShapeError(std::string(name) + " is " + m.shape_string() + ", expected " +
                     std::to_string(r) + "x" + std::to_string(c));
  }
}

void check_inputs(const JcaDims& dims, const ModalityFeatures& xa, const ModalityFeatures& xv) {
  if (xa.clips() != dims.clips || xa.dim() != dims.audio_dim || xv.clips() != dims.clips ||
      xv.dim() != dims.visual_dim) {
    throw ShapeError("inputs audio " + xa.block().shape_string() + " / visual " +
                     xv.block().shape_string() + " do not match model dims " + dims.to_string());
  }
}

}  // namespace

void ConcatParams::check_shapes() const { check_head_shapes(head, dims, dims.joint_dim()); }

void VanillaCaParams::check_shapes() const {
  const auto L = dims.clips, k = dims.attn_dim;
  expect_shape(w_xa, L, L, "W_xa");
  expect_shape(w_xv, L, L, "W_xv");
  expect_shape(w_a, k, L, "W_a");
  expect_shape(w_v, k, L, "W_v");
  expect_shape(w_ca, k, dims.visual_dim, "W_ca");
  expect_shape(w_cv, k, dims.audio_dim, "W_cv");
  expect_shape(w_ha, k, L, "W_ha");
  expect_shape(w_hv, k, L, "W_hv");
  check_head_shapes(head, dims, dims.joint_dim());
}

ConcatParams concat_init(const JcaDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  return {dims, make_head(dims.joint_dim(), dims.head_hidden, dims.outputs, rng)};
}

VanillaCaParams vanilla_ca_init(const JcaDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  const auto L = dims.clips, k = dims.attn_dim;
  VanillaCaParams p;
  p.dims = dims;
  p.w_xa = xavier_uniform(L, L, rng);
  p.w_xv = xavier_uniform(L, L, rng);
  p.w_a = xavier_uniform(k, L, rng);
  p.w_v = xavier_uniform(k, L, rng);
  p.w_ca = xavier_uniform(k, dims.visual_dim, rng);
  p.w_cv = xavier_uniform(k, dims.audio_dim, rng);
  p.w_ha = xavier_uniform(k, L, rng);
  p.w_hv = xavier_uniform(k, L, rng);
  p.head = make_head(dims.joint_dim(), dims.head_hidden, dims.outputs, rng);
  return p;
}

ConcatActivations concat_forward_full(const ConcatParams& params, const ModalityFeatures& xa,
                                      const ModalityFeatures& xv,
                                      const std::optional<Matrix>& dropout_mask) {
  check_inputs(params.dims, xa, xv);
  ConcatActivations act;
  act.features = concat_cols(xa.block(), xv.block());
  act.head_input = dropout_mask ? hadamard(act.features, *dropout_mask) : act.features;
  act.y_hat = head_forward(params.head, act.head_input, &act.head_trace);
  detail::require_finite(act.y_hat, "head", "prediction");
  return act;
}

Matrix cross_correlation(const ModalityFeatures& self, const ModalityFeatures& other,
                         const Matrix& w) {
  return detail::correlation(self.block(), w, other.block());
}

VanillaCaActivations vanilla_ca_forward_full(const VanillaCaParams& params,
                                             const ModalityFeatures& xa,
                                             const ModalityFeatures& xv,
                                             const std::optional<Matrix>& dropout_mask) {
  check_inputs(params.dims, xa, xv);
  VanillaCaActivations act;
  auto a = detail::branch_forward(xa.block(), xv.block(),
                                  {params.w_xa, params.w_a, params.w_ca, params.w_ha}, "audio branch");
  auto v = detail::branch_forward(xv.block(), xa.block(),
                                  {params.w_xv, params.w_v, params.w_cv, params.w_hv}, "visual branch");
  act.corr_a = std::move(a.corr);
  act.pre_a = std::move(a.pre);
  act.maps_a = std::move(a.maps);
  act.attended_a = std::move(a.attended);
  act.corr_v = std::move(v.corr);
  act.pre_v = std::move(v.pre);
  act.maps_v = std::move(v.maps);
  act.attended_v = std::move(v.attended);
  act.attended = concat_cols(act.attended_v, act.attended_a);
  act.head_input = dropout_mask ? hadamard(act.attended, *dropout_mask) : act.attended;
  act.y_hat = head_forward(params.head, act.head_input, &act.head_trace);
  detail::require_finite(act.y_hat, "head", "prediction");
  return act;
}

Matrix concat_forward(const ConcatParams& params, const ModalityFeatures& xa,
                      const ModalityFeatures& xv) {
  return concat_forward_full(params, xa, xv).y_hat;
}

Matrix vanilla_ca_forward(const VanillaCaParams& params, const ModalityFeatures& xa,
                          const ModalityFeatures& xv) {
  return vanilla_ca_forward_full(params, xa, xv).y_hat;
}

std::size_t concat_param_count(const JcaDims& dims) {
  return head_param_count(dims, dims.joint_dim());
}

std::size_t vanilla_ca_param_count(const JcaDims& dims) {
  const auto L = dims.clips, k = dims.attn_dim;
  return 2 * L * L + 4 * k * L + k * dims.joint_dim() + head_param_count(dims, dims.joint_dim());
}

}  // namespace jca
