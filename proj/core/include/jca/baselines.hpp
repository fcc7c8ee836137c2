#pragma once

#include <cstdint>
#include <optional>

#include "jca/fusion.hpp"

namespace jca {

/// Feature concatenation: head applied to [X_a | X_v], no attention.
struct ConcatParams {
  JcaDims dims;
  Head head;

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    JcaParams::visit_head(self.head, f);
  }

  void check_shapes() const;
};

/// Cross-attention where each modality is correlated with the other one
/// instead of the joint representation.
struct VanillaCaParams {
  JcaDims dims;
  Matrix w_xa;  ///< L x L
  Matrix w_xv;  ///< L x L
  Matrix w_a;   ///< k x L
  Matrix w_v;   ///< k x L
  Matrix w_ca;  ///< k x d_v
  Matrix w_cv;  ///< k x d_a
  Matrix w_ha;  ///< k x L
  Matrix w_hv;  ///< k x L
  Head head;

  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f("W_xa", self.w_xa, false);
    f("W_xv", self.w_xv, false);
    f("W_a", self.w_a, false);
    f("W_v", self.w_v, false);
    f("W_ca", self.w_ca, false);
    f("W_cv", self.w_cv, false);
    f("W_ha", self.w_ha, false);
    f("W_hv", self.w_hv, false);
    JcaParams::visit_head(self.head, f);
  }

  void check_shapes() const;
};

struct ConcatActivations {
  Matrix features;    ///< [X_a | X_v]
  Matrix head_input;  ///< after the dropout mask
  HeadTrace head_trace;
  Matrix y_hat;
};

/// Same layout as JcaActivations; corr_a is d_a x d_v and corr_v is d_v x d_a.
struct VanillaCaActivations {
  Matrix corr_a, corr_v;
  Matrix pre_a, pre_v;
  Matrix maps_a, maps_v;
  Matrix attended_a, attended_v;
  Matrix attended;  ///< [X_att,v | X_att,a]
  Matrix head_input;
  HeadTrace head_trace;
  Matrix y_hat;
};

ConcatParams concat_init(const JcaDims& dims, std::uint64_t seed);
VanillaCaParams vanilla_ca_init(const JcaDims& dims, std::uint64_t seed);

ConcatActivations concat_forward_full(const ConcatParams& params, const ModalityFeatures& xa,
                                      const ModalityFeatures& xv,
                                      const std::optional<Matrix>& dropout_mask = std::nullopt);
VanillaCaActivations vanilla_ca_forward_full(
    const VanillaCaParams& params, const ModalityFeatures& xa, const ModalityFeatures& xv,
    const std::optional<Matrix>& dropout_mask = std::nullopt);

/// Unclipped L x outputs predictions.
Matrix concat_forward(const ConcatParams& params, const ModalityFeatures& xa,
                      const ModalityFeatures& xv);
Matrix vanilla_ca_forward(const VanillaCaParams& params, const ModalityFeatures& xa,
                          const ModalityFeatures& xv);

/// C = tanh(X_self^T W X_other / sqrt(d_other)).
Matrix cross_correlation(const ModalityFeatures& self, const ModalityFeatures& other,
                         const Matrix& w);

std::size_t concat_param_count(const JcaDims& dims);
/// 2L^2 + 4kL + k(d_a + d_v) + head.
std::size_t vanilla_ca_param_count(const JcaDims& dims);

}  // namespace jca
