#include <cmath>

#include "jca/errors.hpp"
#include "jca/training.hpp"

namespace jca {

const char* to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd") return OptimizerKind::Sgd;
  throw ConfigError("unknown optimizer '" + s + "' (expected adam|sgd)");
}

namespace {

struct Slots {
  std::vector<ParamSlot> params;
  std::vector<ConstParamSlot> grads;
};

Slots matched_slots(ModelParams& params, const GradientSet& grads) {
  Slots s{param_slots(params), param_slots(grads.grads)};
  if (params.index() != grads.grads.index() || s.params.size() != s.grads.size()) {
    throw ShapeError("gradient set does not belong to this model");
  }
  for (std::size_t i = 0; i < s.params.size(); ++i) {
    if (!s.params[i].value->same_shape(*s.grads[i].value)) {
      throw ShapeError("gradient for " + std::string(s.params[i].name) + " is " +
                       s.grads[i].value->shape_string() + ", parameter is " +
                       s.params[i].value->shape_string());
    }
    if (!all_finite(*s.grads[i].value)) {
      throw NumericError("non-finite gradient for " + std::string(s.params[i].name));
    }
  }
  return s;
}

void decay(Matrix& theta, bool is_bias, const TrainConfig& config) {
  if (is_bias || config.weight_decay == 0.0) return;
  const double factor = config.learning_rate * config.weight_decay;
  for (double& v : theta.data()) v -= factor * v;
}

}  // namespace

void adam_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
               const TrainConfig& config) {
  Slots s = matched_slots(params, grads);
  if (!state.first) state.first = zeros_like(params);
  if (!state.second) state.second = zeros_like(params);
  auto m = param_slots(*state.first);
  auto v = param_slots(*state.second);
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t p = 0; p < s.params.size(); ++p) {
    Matrix& theta = *s.params[p].value;
    decay(theta, s.params[p].is_bias, config);
    const auto g = s.grads[p].value->data();
    auto mm = m[p].value->data();
    auto vv = v[p].value->data();
    auto th = theta.data();
    for (std::size_t i = 0; i < th.size(); ++i) {
      mm[i] = config.beta1 * mm[i] + (1.0 - config.beta1) * g[i];
      vv[i] = config.beta2 * vv[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = mm[i] / c1;
      const double v_hat = vv[i] / c2;
      th[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void sgd_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
              const TrainConfig& config) {
  Slots s = matched_slots(params, grads);
  if (!state.first) state.first = zeros_like(params);
  auto vel = param_slots(*state.first);
  ++state.step;
  for (std::size_t p = 0; p < s.params.size(); ++p) {
    Matrix& theta = *s.params[p].value;
    decay(theta, s.params[p].is_bias, config);
    const auto g = s.grads[p].value->data();
    auto vv = vel[p].value->data();
    auto th = theta.data();
    for (std::size_t i = 0; i < th.size(); ++i) {
      vv[i] = config.momentum * vv[i] + g[i];
      th[i] -= config.learning_rate * vv[i];
    }
  }
}

void optimizer_step(ModelParams& params, const GradientSet& grads, OptimizerState& state,
                    const TrainConfig& config) {
  if (config.optimizer == OptimizerKind::Adam) {
    adam_step(params, grads, state, config);
  } else {
    sgd_step(params, grads, state, config);
  }
}

}  // namespace jca
