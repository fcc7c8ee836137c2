#include "jca/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "attention_branch.hpp"
#include "jca/errors.hpp"

namespace jca {

const char* to_string(Modality m) { return m == Modality::Audio ? "audio" : "visual"; }

ModalityFeatures::ModalityFeatures(Matrix block, Modality modality)
    : block_(std::move(block)), modality_(modality) {
  if (block_.rows() == 0 || block_.cols() == 0) {
    throw ConfigError(std::string(to_string(modality_)) +
                      " features need at least one clip and one column, got " +
                      block_.shape_string());
  }
  if (!all_finite(block_)) {
    throw NumericError(std::string(to_string(modality_)) + " features contain non-finite values");
  }
}

void JcaDims::validate() const {
  if (clips == 0 || audio_dim == 0 || visual_dim == 0 || attn_dim == 0) {
    throw ConfigError("dims must be positive: " + to_string());
  }
  if (outputs != 1 && outputs != 2) {
    throw ConfigError("head outputs must be 1 or 2, got " + std::to_string(outputs));
  }
}

std::string JcaDims::to_string() const {
  return "L=" + std::to_string(clips) + " d_a=" + std::to_string(audio_dim) +
         " d_v=" + std::to_string(visual_dim) + " k=" + std::to_string(attn_dim) +
         " head_hidden=" + std::to_string(head_hidden) + " outputs=" + std::to_string(outputs);
}

namespace {

void expect_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
  if (m.rows() != r || m.cols() != c) {
    throw ShapeError(std::string(name) + " is " + m.shape_string() + ", expected " +
                     std::to_string(r) + "x" + std::to_string(c));
  }
}

}  // namespace

void check_head_shapes(const Head& head, const JcaDims& dims, std::size_t in) {
  const std::size_t expected_layers = dims.head_hidden > 0 ? 2 : 1;
  if (head.layers.size() != expected_layers) {
    throw ShapeError("head has " + std::to_string(head.layers.size()) + " layers, expected " +
                     std::to_string(expected_layers));
  }
  if (dims.head_hidden > 0) {
    expect_shape(head.layers[0].weight, dims.head_hidden, in, "head.0.weight");
    expect_shape(head.layers[0].bias, 1, dims.head_hidden, "head.0.bias");
    expect_shape(head.layers[1].weight, dims.outputs, dims.head_hidden, "head.1.weight");
    expect_shape(head.layers[1].bias, 1, dims.outputs, "head.1.bias");
  } else {
    expect_shape(head.layers[0].weight, dims.outputs, in, "head.0.weight");
    expect_shape(head.layers[0].bias, 1, dims.outputs, "head.0.bias");
  }
}

void JcaParams::check_shapes() const {
  const auto L = dims.clips, k = dims.attn_dim, d = dims.joint_dim();
  expect_shape(w_ja, L, L, "W_ja");
  expect_shape(w_jv, L, L, "W_jv");
  expect_shape(w_a, k, L, "W_a");
  expect_shape(w_v, k, L, "W_v");
  expect_shape(w_ca, k, d, "W_ca");
  expect_shape(w_cv, k, d, "W_cv");
  expect_shape(w_ha, k, L, "W_ha");
  expect_shape(w_hv, k, L, "W_hv");
  check_head_shapes(head, dims, d);
}

JcaParams xavier_init(const JcaDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  const auto L = dims.clips, k = dims.attn_dim, d = dims.joint_dim();
  JcaParams p;
  p.dims = dims;
  p.w_ja = xavier_uniform(L, L, rng);
  p.w_jv = xavier_uniform(L, L, rng);
  p.w_a = xavier_uniform(k, L, rng);
  p.w_v = xavier_uniform(k, L, rng);
  p.w_ca = xavier_uniform(k, d, rng);
  p.w_cv = xavier_uniform(k, d, rng);
  p.w_ha = xavier_uniform(k, L, rng);
  p.w_hv = xavier_uniform(k, L, rng);
  p.head = make_head(d, dims.head_hidden, dims.outputs, rng);
  return p;
}

Matrix joint_representation(const ModalityFeatures& xa, const ModalityFeatures& xv) {
  if (xa.clips() != xv.clips()) {
    throw ShapeError("clip count mismatch: audio " + xa.block().shape_string() + ", visual " +
                     xv.block().shape_string());
  }
  return concat_cols(xa.block(), xv.block());
}

Matrix joint_correlation(const ModalityFeatures& xm, const Matrix& joint, const Matrix& w_jm,
                         std::size_t d) {
  if (joint.rows() != xm.clips() || joint.cols() != d) {
    throw ShapeError("joint representation is " + joint.shape_string() + ", expected " +
                     std::to_string(xm.clips()) + "x" + std::to_string(d));
  }
  return detail::correlation(xm.block(), w_jm, joint);
}

Matrix attention_maps(const ModalityFeatures& xm, const Matrix& corr, const Matrix& w_m,
                      const Matrix& w_cm) {
  return ew_relu(add(matmul(w_m, xm.block()), matmul(w_cm, transpose(corr))));
}

Matrix attended_features(const ModalityFeatures& xm, const Matrix& maps, const Matrix& w_hm) {
  return add(matmul(transpose(w_hm), maps), xm.block());
}

JcaActivations forward(const JcaParams& params, const ModalityFeatures& xa,
                       const ModalityFeatures& xv, const std::optional<Matrix>& dropout_mask) {
  const JcaDims& dims = params.dims;
  if (xa.clips() != dims.clips || xa.dim() != dims.audio_dim || xv.clips() != dims.clips ||
      xv.dim() != dims.visual_dim) {
    throw ShapeError("inputs audio " + xa.block().shape_string() + " / visual " +
                     xv.block().shape_string() + " do not match model dims " + dims.to_string());
  }
  JcaActivations act;
  act.joint = joint_representation(xa, xv);

  auto a = detail::branch_forward(xa.block(), act.joint,
                                  {params.w_ja, params.w_a, params.w_ca, params.w_ha}, "audio branch");
  auto v = detail::branch_forward(xv.block(), act.joint,
                                  {params.w_jv, params.w_v, params.w_cv, params.w_hv}, "visual branch");
  act.corr_a = std::move(a.corr);
  act.pre_a = std::move(a.pre);
  act.maps_a = std::move(a.maps);
  act.attended_a = std::move(a.attended);
  act.corr_v = std::move(v.corr);
  act.pre_v = std::move(v.pre);
  act.maps_v = std::move(v.maps);
  act.attended_v = std::move(v.attended);

  // visual-first concatenation of the attended features
  act.attended = concat_cols(act.attended_v, act.attended_a);
  act.head_input = dropout_mask ? hadamard(act.attended, *dropout_mask) : act.attended;
  act.y_hat = head_forward(params.head, act.head_input, &act.head_trace);
  detail::require_finite(act.y_hat, "head", "prediction");
  return act;
}

Matrix clip_predictions(const Matrix& raw) {
  Matrix out = raw;
  for (double& v : out.data()) v = std::clamp(v, -1.0, 1.0);
  return out;
}

Matrix predict(const JcaParams& params, const ModalityFeatures& xa, const ModalityFeatures& xv) {
  return clip_predictions(forward(params, xa, xv).y_hat);
}

std::size_t head_param_count(const JcaDims& dims, std::size_t in) {
  if (dims.head_hidden == 0) return dims.outputs * in + dims.outputs;
  return dims.head_hidden * in + dims.head_hidden + dims.outputs * dims.head_hidden +
         dims.outputs;
}

std::size_t jca_param_count(const JcaDims& dims) {
  const auto L = dims.clips, k = dims.attn_dim, d = dims.joint_dim();
  return 2 * L * L + 4 * k * L + 2 * k * d + head_param_count(dims, d);
}

Matrix make_dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng) {
  Matrix mask(rows, cols, 1.0);
  if (p <= 0.0) return mask;
  const double keep = 1.0 / (1.0 - p);
  for (double& v : mask.data()) v = rng.uniform() < p ? 0.0 : keep;
  return mask;
}

}  // namespace jca
