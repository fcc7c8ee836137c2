#pragma once

// One direction of cross-modal attention, shared by the joint and the vanilla
// cross-attention models. They differ only in the key block the modality is
// correlated against (J, or the opposite modality) and its width.

#include "jca/matrix.hpp"

namespace jca::detail {

struct BranchWeights {
  const Matrix& w_corr;    ///< L x L
  const Matrix& w_feat;    ///< k x L
  const Matrix& w_map;     ///< k x key_dim
  const Matrix& w_attend;  ///< k x L
};

struct BranchActivations {
  Matrix corr;      ///< tanh(X^T W_corr K / sqrt(key_dim)), d_m x key_dim
  Matrix pre;       ///< W_feat X + W_map corr^T, k x d_m
  Matrix maps;      ///< ReLU(pre)
  Matrix attended;  ///< W_attend^T maps + X, L x d_m
};

struct BranchGrads {
  Matrix w_corr;
  Matrix w_feat;
  Matrix w_map;
  Matrix w_attend;
};

BranchActivations branch_forward(const Matrix& x, const Matrix& key, const BranchWeights& w,
                                 const char* stage);

BranchGrads branch_backward(const Matrix& x, const Matrix& key, const BranchWeights& w,
                            const BranchActivations& act, const Matrix& d_attended);

Matrix correlation(const Matrix& x, const Matrix& w_corr, const Matrix& key);

void require_finite(const Matrix& m, const char* stage, const char* what);

}  // namespace jca::detail
