#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "jca/model.hpp"
#include "jca/subsequence.hpp"

namespace jca {

/// Concordance statistics with population (1/n) moments.
struct CccStats {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
  double rho_c = 0.0;
  std::size_t n = 0;
  /// Denominator below kCccDegenerateEps; rho_c then follows the fallback rule.
  bool degenerate = false;
};

inline constexpr double kCccDegenerateEps = 1e-12;

/// rho_c = 2 cov / (var_x + var_y + (mu_x - mu_y)^2). A vanishing denominator
/// gives 1 for identical constants and 0 otherwise.
CccStats ccc(std::span<const double> x, std::span<const double> y);

/// 1 - rho_c, in [0, 2].
double ccc_loss(std::span<const double> predictions, std::span<const double> targets);

/// Loss and dLoss/dPrediction. Throws DegenerateError on a degenerate
/// denominator since the loss is then not differentiable.
double ccc_loss_grad(std::span<const double> predictions, std::span<const double> targets,
                     std::span<double> d_predictions);

struct CccEntry {
  Target target = Target::Valence;
  std::size_t n = 0;
  double rho_c = 0.0;
  bool degenerate = false;
};

/// One CCC per target over every clip of a split.
struct CccReport {
  std::vector<CccEntry> entries;

  const CccEntry* find(Target t) const;
  /// "target=valence n=4000 rho_c=0.81234 degenerate=false" lines.
  std::string to_text() const;
  std::string to_json() const;
};

/// Clipped predictions of every sub-sequence, in dataset order, concatenated
/// per output column.
std::vector<std::vector<double>> split_predictions(const ModelParams& model, const Dataset& data);

/// Concatenates clipped per-clip predictions across all sub-sequences and
/// computes one CCC per trained target. `target` selects the head layout.
CccReport evaluate_split(const ModelParams& model, const Dataset& data, Target target);

}  // namespace jca
