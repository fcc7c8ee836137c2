#include "attention_branch.hpp"

#include <cmath>
#include <string>

#include "jca/errors.hpp"

namespace jca::detail {

void require_finite(const Matrix& m, const char* stage, const char* what) {
  if (!all_finite(m)) {
    throw NumericError(std::string("non-finite value in ") + what + " (" + stage + ")");
  }
}

Matrix correlation(const Matrix& x, const Matrix& w_corr, const Matrix& key) {
  if (w_corr.rows() != x.rows() || w_corr.cols() != key.rows()) {
    throw ShapeError("correlation weight " + w_corr.shape_string() + " does not fit features " +
                     x.shape_string() + " and key " + key.shape_string());
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(key.cols()));
  return ew_tanh(scale(matmul(matmul(transpose(x), w_corr), key), norm));
}

BranchActivations branch_forward(const Matrix& x, const Matrix& key, const BranchWeights& w,
                                 const char* stage) {
  BranchActivations act;
  act.corr = correlation(x, w.w_corr, key);
  require_finite(act.corr, stage, "correlation matrix");
  act.pre = add(matmul(w.w_feat, x), matmul(w.w_map, transpose(act.corr)));
  require_finite(act.pre, stage, "attention pre-activation");
  act.maps = ew_relu(act.pre);
  act.attended = add(matmul(transpose(w.w_attend), act.maps), x);
  require_finite(act.attended, stage, "attended features");
  return act;
}

BranchGrads branch_backward(const Matrix& x, const Matrix& key, const BranchWeights& w,
                            const BranchActivations& act, const Matrix& d_attended) {
  BranchGrads g;
  // attended = W_h^T H + X
  g.w_attend = matmul(act.maps, transpose(d_attended));
  Matrix d_maps = matmul(w.w_attend, d_attended);

  // H = ReLU(pre); derivative taken as 0 at exactly 0
  Matrix d_pre = d_maps;
  for (std::size_t i = 0; i < d_pre.size(); ++i) {
    if (!(act.pre.data()[i] > 0.0)) d_pre.data()[i] = 0.0;
  }

  // pre = W_f X + W_m C^T
  g.w_feat = matmul(d_pre, transpose(x));
  g.w_map = matmul(d_pre, act.corr);
  Matrix d_corr = matmul(transpose(d_pre), w.w_map);

  // C = tanh(P), P = X^T W_c K / sqrt(key_dim)
  Matrix d_p = d_corr;
  for (std::size_t i = 0; i < d_p.size(); ++i) {
    const double c = act.corr.data()[i];
    d_p.data()[i] *= 1.0 - c * c;
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(key.cols()));
  g.w_corr = scale(matmul(matmul(x, d_p), transpose(key)), norm);
  return g;
}

}  // namespace jca::detail
