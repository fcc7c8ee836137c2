#include "jca/head.hpp"

#include <cmath>

#include "jca/errors.hpp"

namespace jca {

std::size_t Head::param_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
  return m;
}

Head make_head(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng) {
  Head head;
  if (hidden > 0) {
    head.layers.push_back({xavier_uniform(hidden, in, rng), Matrix(1, hidden)});
    head.layers.push_back({xavier_uniform(out, hidden, rng), Matrix(1, out)});
  } else {
    head.layers.push_back({xavier_uniform(out, in, rng), Matrix(1, out)});
  }
  return head;
}

namespace {

Matrix dense(const DenseLayer& layer, const Matrix& x) {
  if (x.cols() != layer.weight.cols()) {
    throw ShapeError("head layer expects " + std::to_string(layer.weight.cols()) +
                     " inputs, got " + x.shape_string());
  }
  Matrix out = matmul(x, transpose(layer.weight));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += layer.bias(0, j);
  return out;
}

}  // namespace

Matrix head_forward(const Head& head, const Matrix& x, HeadTrace* trace) {
  Matrix cur = x;
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    Matrix pre = dense(head.layers[l], cur);
    if (trace) {
      trace->inputs.push_back(cur);
      trace->pre.push_back(pre);
    }
    cur = (l + 1 < head.layers.size()) ? ew_relu(pre) : std::move(pre);
  }
  return cur;
}

Head head_backward(const Head& head, const HeadTrace& trace, const Matrix& d_out,
                   Matrix* d_input) {
  Head grads;
  grads.layers.resize(head.layers.size());
  Matrix d_cur = d_out;
  for (std::size_t l = head.layers.size(); l-- > 0;) {
    if (l + 1 < head.layers.size()) {
      // ReLU between layers
      const Matrix& pre = trace.pre[l];
      for (std::size_t i = 0; i < d_cur.size(); ++i)
        if (!(pre.data()[i] > 0.0)) d_cur.data()[i] = 0.0;
    }
    grads.layers[l].weight = matmul(transpose(d_cur), trace.inputs[l]);
    Matrix db(1, d_cur.cols());
    for (std::size_t i = 0; i < d_cur.rows(); ++i)
      for (std::size_t j = 0; j < d_cur.cols(); ++j) db(0, j) += d_cur(i, j);
    grads.layers[l].bias = std::move(db);
    if (l > 0 || d_input) d_cur = matmul(d_cur, head.layers[l].weight);
  }
  if (d_input) *d_input = std::move(d_cur);
  return grads;
}

}  // namespace jca
