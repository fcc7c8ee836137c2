#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jca/model.hpp"
#include "jca/subsequence.hpp"

namespace jca {

/// dLoss/dParam for every trainable matrix, shaped like the model itself.
struct GradientSet {
  ModelParams grads;
  double loss = 0.0;

  /// Gradient matrix by parameter name ("W_ca", "head.0.bias", ...).
  const Matrix& get(std::string_view name) const;
  Matrix& get(std::string_view name);
};

/// Batch loss 1 - rho_c over all clips of `batch` (mean over head outputs
/// when training both targets). Predictions are not clipped. `masks` is
/// either empty (no dropout) or one L x d mask per sub-sequence.
double batch_loss(const ModelParams& params, std::span<const SubSequence> batch, Target target,
                  std::span<const Matrix> masks = {});

/// Exact gradients of batch_loss with the dropout masks held constant.
GradientSet loss_and_grads(const ModelParams& params, std::span<const SubSequence> batch,
                           Target target, std::span<const Matrix> masks = {});

/// Central differences (f(t+h) - f(t-h)) / 2h per scalar parameter. When
/// `kink_flags` is given it receives 1.0 for every entry whose perturbation
/// flips the sign of some ReLU pre-activation.
GradientSet finite_diff_grads(const ModelParams& params, std::span<const SubSequence> batch,
                              Target target, std::span<const Matrix> masks, double step,
                              ModelParams* kink_flags = nullptr);

struct ParamCheck {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t entries = 0;
  /// Entries straddling a ReLU kink; excluded from the error maxima.
  std::size_t kink_entries = 0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double tol = 0.0;
  double step = 0.0;

  bool passed() const;
  const ParamCheck* find(std::string_view name) const;
  /// Aligned text table, one row per parameter.
  std::string to_table() const;
  /// One JSON object per parameter.
  std::string to_json() const;
};

struct GradCheckOptions {
  double tol = 1e-4;
  double step = 1e-6;
  /// Adds 0.1 to entry (0, 0) of the named analytic gradient before comparing.
  std::optional<std::string> inject_fault;
};

/// |g - g_fd| / max(|g|, |g_fd|, 1e-8).
double relative_error(double analytic, double numeric);

GradCheckReport grad_check(const ModelParams& params, std::span<const SubSequence> batch,
                           Target target, std::span<const Matrix> masks = {},
                           const GradCheckOptions& options = {});

/// Smallest |pre-activation| over every ReLU in the model for this batch
/// (infinity for models without ReLU). Used to keep gradient checks off kinks.
double min_relu_margin(const ModelParams& params, std::span<const SubSequence> batch,
                       std::span<const Matrix> masks = {});

}  // namespace jca
