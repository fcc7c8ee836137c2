#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "jca/head.hpp"
#include "jca/matrix.hpp"

namespace jca {

enum class Modality { Audio, Visual };

const char* to_string(Modality m);

/// Clip-major feature block of one modality: one row per clip.
class ModalityFeatures {
 public:
  ModalityFeatures(Matrix block, Modality modality);

  const Matrix& block() const noexcept { return block_; }
  Modality modality() const noexcept { return modality_; }
  std::size_t clips() const noexcept { return block_.rows(); }
  std::size_t dim() const noexcept { return block_.cols(); }

 private:
  Matrix block_;
  Modality modality_;
};

/// Sizes shared by every fusion model.
struct JcaDims {
  std::size_t clips = 8;        ///< L, clips per sub-sequence
  std::size_t audio_dim = 16;   ///< d_a
  std::size_t visual_dim = 16;  ///< d_v
  std::size_t attn_dim = 8;     ///< k, attention hidden size
  std::size_t head_hidden = 0;  ///< 0: single linear layer
  std::size_t outputs = 1;      ///< 1 (one target) or 2 (valence and arousal)

  std::size_t joint_dim() const noexcept { return audio_dim + visual_dim; }
  /// Throws ConfigError on zero sizes or unsupported output width.
  void validate() const;
  std::string to_string() const;

  friend bool operator==(const JcaDims&, const JcaDims&) = default;
};

/// Trainable state of the joint cross-attention model.
struct JcaParams {
  JcaDims dims;
  Matrix w_ja;  ///< L x L
  Matrix w_jv;  ///< L x L
  Matrix w_a;   ///< k x L
  Matrix w_v;   ///< k x L
  Matrix w_ca;  ///< k x d
  Matrix w_cv;  ///< k x d
  Matrix w_ha;  ///< k x L
  Matrix w_hv;  ///< k x L
  Head head;    ///< d -> outputs

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f("W_ja", self.w_ja, false);
    f("W_jv", self.w_jv, false);
    f("W_a", self.w_a, false);
    f("W_v", self.w_v, false);
    f("W_ca", self.w_ca, false);
    f("W_cv", self.w_cv, false);
    f("W_ha", self.w_ha, false);
    f("W_hv", self.w_hv, false);
    visit_head(self.head, f);
  }

  template <typename HeadT, typename F>
  static void visit_head(HeadT& head, F&& f) {
    static const char* kWeightNames[] = {"head.0.weight", "head.1.weight"};
    static const char* kBiasNames[] = {"head.0.bias", "head.1.bias"};
    for (std::size_t i = 0; i < head.layers.size(); ++i) {
      f(kWeightNames[i], head.layers[i].weight, false);
      f(kBiasNames[i], head.layers[i].bias, true);
    }
  }

  /// Throws ShapeError if any matrix disagrees with `dims`.
  void check_shapes() const;
};

/// Intermediates of one forward pass, kept for the backward pass.
struct JcaActivations {
  Matrix joint;        ///< J, L x d (audio columns first)
  Matrix corr_a;       ///< C_a, d_a x d
  Matrix corr_v;       ///< C_v, d_v x d
  Matrix pre_a;        ///< W_a X_a + W_ca C_a^T, k x d_a
  Matrix pre_v;        ///< k x d_v
  Matrix maps_a;       ///< H_a, k x d_a
  Matrix maps_v;       ///< H_v, k x d_v
  Matrix attended_a;   ///< X_att,a, L x d_a
  Matrix attended_v;   ///< X_att,v, L x d_v
  Matrix attended;     ///< X_att = [X_att,v | X_att,a], L x d
  Matrix head_input;   ///< X_att after the dropout mask
  HeadTrace head_trace;
  Matrix y_hat;        ///< L x outputs, unclipped
};

JcaParams xavier_init(const JcaDims& dims, std::uint64_t seed);

/// J = [X_a | X_v].
Matrix joint_representation(const ModalityFeatures& xa, const ModalityFeatures& xv);

/// C_m = tanh(X_m^T W_jm J / sqrt(d)).
Matrix joint_correlation(const ModalityFeatures& xm, const Matrix& joint, const Matrix& w_jm,
                         std::size_t d);

/// H_m = ReLU(W_m X_m + W_cm C_m^T).
Matrix attention_maps(const ModalityFeatures& xm, const Matrix& corr, const Matrix& w_m,
                      const Matrix& w_cm);

/// X_att,m = W_hm^T H_m + X_m.
Matrix attended_features(const ModalityFeatures& xm, const Matrix& maps, const Matrix& w_hm);

/// Full pass. `dropout_mask`, when given, is an L x d matrix multiplied into
/// X_att before the head (entries 0 or 1/(1-p)).
JcaActivations forward(const JcaParams& params, const ModalityFeatures& xa,
                       const ModalityFeatures& xv,
                       const std::optional<Matrix>& dropout_mask = std::nullopt);

/// Inference: forward without dropout, each output clamped to [-1, 1].
Matrix predict(const JcaParams& params, const ModalityFeatures& xa, const ModalityFeatures& xv);

/// Clamps every entry to [-1, 1].
Matrix clip_predictions(const Matrix& raw);

/// Analytic parameter count: 2L^2 + 4kL + 2kd + head.
std::size_t jca_param_count(const JcaDims& dims);
std::size_t head_param_count(const JcaDims& dims, std::size_t in);

/// Throws ShapeError unless `head` maps `in` columns to dims.outputs.
void check_head_shapes(const Head& head, const JcaDims& dims, std::size_t in);

/// Inverted-dropout mask: each entry 0 with probability p, else 1/(1-p).
Matrix make_dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng);

}  // namespace jca
