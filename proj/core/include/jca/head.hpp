#pragma once

#include <cstddef>
#include <vector>

#include "jca/matrix.hpp"
#include "jca/rng.hpp"

namespace jca {

/// Fully connected layer applied row-wise: out = in * weight^T + bias.
struct DenseLayer {
  Matrix weight;  ///< out x in
  Matrix bias;    ///< 1 x out
};

/// Prediction head: dense layers with ReLU between them (none after the last).
struct Head {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().weight.cols(); }
  std::size_t output_dim() const { return layers.back().weight.rows(); }
  std::size_t param_count() const;
};

/// Values retained by head_forward for the backward pass.
struct HeadTrace {
  std::vector<Matrix> inputs;  ///< input of each layer
  std::vector<Matrix> pre;     ///< pre-activation output of each layer
};

/// Xavier-uniform weights, zero biases. hidden == 0 gives a single layer.
Head make_head(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng);

Matrix head_forward(const Head& head, const Matrix& x, HeadTrace* trace = nullptr);

/// Gradient of the layer weights/biases given dLoss/dOutput; returns
/// dLoss/dInput when `d_input` is non-null.
Head head_backward(const Head& head, const HeadTrace& trace, const Matrix& d_out,
                   Matrix* d_input);

/// Xavier-uniform m x n matrix in +-sqrt(6 / (m + n)).
Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace jca
