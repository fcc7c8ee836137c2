#include "jca/metrics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "jca/errors.hpp"

namespace jca {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("ccc: length mismatch " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
  if (x.size() < 2) throw ConfigError("ccc: need at least 2 samples, got " + std::to_string(x.size()));
}

}  // namespace

CccStats ccc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  CccStats s;
  s.n = x.size();
  const double n = static_cast<double>(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    s.mu_x += x[i];
    s.mu_y += y[i];
  }
  s.mu_x /= n;
  s.mu_y /= n;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double dx = x[i] - s.mu_x;
    const double dy = y[i] - s.mu_y;
    s.var_x += dx * dx;
    s.var_y += dy * dy;
    s.cov_xy += dx * dy;
  }
  s.var_x /= n;
  s.var_y /= n;
  s.cov_xy /= n;
  const double mean_gap = s.mu_x - s.mu_y;
  const double den = s.var_x + s.var_y + mean_gap * mean_gap;
  if (den < kCccDegenerateEps) {
    s.degenerate = true;
    s.rho_c = std::abs(mean_gap) < kCccDegenerateEps ? 1.0 : 0.0;
  } else {
    s.rho_c = 2.0 * s.cov_xy / den;
  }
  return s;
}

double ccc_loss(std::span<const double> predictions, std::span<const double> targets) {
  return 1.0 - ccc(predictions, targets).rho_c;
}

double ccc_loss_grad(std::span<const double> predictions, std::span<const double> targets,
                     std::span<double> d_predictions) {
  const CccStats s = ccc(predictions, targets);
  if (s.degenerate) {
    throw DegenerateError("CCC denominator vanished over " + std::to_string(s.n) +
                          " clips (constant predictions and targets)");
  }
  if (d_predictions.size() != s.n) throw ShapeError("ccc_loss_grad: gradient buffer size mismatch");
  const double n = static_cast<double>(s.n);
  const double mean_gap = s.mu_x - s.mu_y;
  const double num = 2.0 * s.cov_xy;
  const double den = s.var_x + s.var_y + mean_gap * mean_gap;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double d_num = 2.0 * (targets[i] - s.mu_y) / n;
    const double d_den = 2.0 * (predictions[i] - s.mu_x) / n + 2.0 * mean_gap / n;
    d_predictions[i] = -(d_num * den - num * d_den) / (den * den);
  }
  return 1.0 - s.rho_c;
}

const CccEntry* CccReport::find(Target t) const {
  for (const auto& e : entries)
    if (e.target == t) return &e;
  return nullptr;
}

std::string CccReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& e : entries) {
    os << "target=" << to_string(e.target) << " n=" << e.n << " rho_c=" << e.rho_c
       << " degenerate=" << (e.degenerate ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string CccReport::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    j.push_back({{"target", to_string(e.target)},
                 {"n", e.n},
                 {"rho_c", e.rho_c},
                 {"degenerate", e.degenerate}});
  }
  return j.dump(2);
}

std::vector<std::vector<double>> split_predictions(const ModelParams& model, const Dataset& data) {
  const std::size_t outputs = dims_of(model).outputs;
  std::vector<std::vector<double>> cols(outputs);
  for (const auto& s : data) {
    const Matrix pred = model_predict(model, s.audio, s.visual);
    for (std::size_t i = 0; i < pred.rows(); ++i)
      for (std::size_t c = 0; c < outputs; ++c) cols[c].push_back(pred(i, c));
  }
  return cols;
}

CccReport evaluate_split(const ModelParams& model, const Dataset& data, Target target) {
  if (data.empty()) throw ConfigError("evaluate_split: empty dataset");
  const std::size_t outputs = dims_of(model).outputs;
  if ((target == Target::Both) != (outputs == 2)) {
    throw ConfigError(std::string("target '") + to_string(target) + "' does not match a " +
                      std::to_string(outputs) + "-output head");
  }
  const auto preds = split_predictions(model, data);
  std::vector<Target> targets;
  if (target == Target::Both) {
    targets = {Target::Valence, Target::Arousal};
  } else {
    targets = {target};
  }
  CccReport report;
  for (std::size_t c = 0; c < targets.size(); ++c) {
    std::vector<double> truth;
    truth.reserve(preds[c].size());
    for (const auto& s : data) {
      const auto& labels = targets[c] == Target::Valence ? s.valence : s.arousal;
      truth.insert(truth.end(), labels.begin(), labels.end());
    }
    const CccStats st = ccc(preds[c], truth);
    report.entries.push_back({targets[c], st.n, st.rho_c, st.degenerate});
  }
  return report;
}

}  // namespace jca
