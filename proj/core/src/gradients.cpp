#include "jca/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "attention_branch.hpp"
#include "jca/errors.hpp"
#include "jca/metrics.hpp"

namespace jca {

namespace {

std::optional<Matrix> mask_at(std::span<const Matrix> masks, std::size_t i) {
  if (masks.empty()) return std::nullopt;
  return masks[i];
}

void check_batch(std::span<const SubSequence> batch, std::span<const Matrix> masks,
                 const ModelParams& params, Target target) {
  if (batch.empty()) throw ConfigError("empty batch");
  if (!masks.empty() && masks.size() != batch.size()) {
    throw ShapeError("got " + std::to_string(masks.size()) + " dropout masks for " +
                     std::to_string(batch.size()) + " sub-sequences");
  }
  const std::size_t outputs = dims_of(params).outputs;
  if ((target == Target::Both) != (outputs == 2)) {
    throw ConfigError(std::string("target '") + to_string(target) + "' does not match a " +
                      std::to_string(outputs) + "-output head");
  }
}

/// Per-output-column loss gradient over the whole batch; returns the loss.
double loss_columns(const std::vector<Matrix>& preds, std::span<const SubSequence> batch,
                    Target target, std::vector<Matrix>* d_preds) {
  const std::size_t outputs = preds.front().cols();
  double total = 0.0;
  if (d_preds) {
    d_preds->clear();
    for (const auto& p : preds) d_preds->emplace_back(p.rows(), p.cols());
  }
  for (std::size_t c = 0; c < outputs; ++c) {
    std::vector<double> x, y;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Matrix t = target_matrix(batch[b], target);
      for (std::size_t i = 0; i < preds[b].rows(); ++i) {
        x.push_back(preds[b](i, c));
        y.push_back(t(i, c));
      }
    }
    double loss;
    if (d_preds) {
      std::vector<double> g(x.size());
      loss = ccc_loss_grad(x, y, g);
      std::size_t at = 0;
      for (std::size_t b = 0; b < batch.size(); ++b)
        for (std::size_t i = 0; i < preds[b].rows(); ++i)
          (*d_preds)[b](i, c) = g[at++] / static_cast<double>(outputs);
    } else {
      const CccStats s = ccc(x, y);
      if (s.degenerate) {
        throw DegenerateError("CCC denominator vanished over " + std::to_string(s.n) + " clips");
      }
      loss = 1.0 - s.rho_c;
    }
    total += loss;
  }
  return outputs == 1 ? total : total / static_cast<double>(outputs);
}

void accumulate(Matrix& into, const Matrix& g) {
  for (std::size_t i = 0; i < into.size(); ++i) into.data()[i] += g.data()[i];
}

void accumulate_head(Head& into, const Head& g) {
  for (std::size_t l = 0; l < into.layers.size(); ++l) {
    accumulate(into.layers[l].weight, g.layers[l].weight);
    accumulate(into.layers[l].bias, g.layers[l].bias);
  }
}

Matrix masked(Matrix d, const std::optional<Matrix>& mask) {
  return mask ? hadamard(d, *mask) : d;
}

void backward_one(const JcaParams& p, const SubSequence& s, const std::optional<Matrix>& mask,
                  const JcaActivations& act, const Matrix& d_y, JcaParams& g) {
  Matrix d_in;
  accumulate_head(g.head, head_backward(p.head, act.head_trace, d_y, &d_in));
  const Matrix d_att = masked(std::move(d_in), mask);
  const std::size_t dv = p.dims.visual_dim;
  const Matrix d_att_v = slice_cols(d_att, 0, dv);
  const Matrix d_att_a = slice_cols(d_att, dv, d_att.cols());
  const auto ga = detail::branch_backward(
      s.audio.block(), act.joint, {p.w_ja, p.w_a, p.w_ca, p.w_ha},
      {act.corr_a, act.pre_a, act.maps_a, act.attended_a}, d_att_a);
  const auto gv = detail::branch_backward(
      s.visual.block(), act.joint, {p.w_jv, p.w_v, p.w_cv, p.w_hv},
      {act.corr_v, act.pre_v, act.maps_v, act.attended_v}, d_att_v);
  accumulate(g.w_ja, ga.w_corr);
  accumulate(g.w_a, ga.w_feat);
  accumulate(g.w_ca, ga.w_map);
  accumulate(g.w_ha, ga.w_attend);
  accumulate(g.w_jv, gv.w_corr);
  accumulate(g.w_v, gv.w_feat);
  accumulate(g.w_cv, gv.w_map);
  accumulate(g.w_hv, gv.w_attend);
}

void backward_one(const VanillaCaParams& p, const SubSequence& s,
                  const std::optional<Matrix>& mask, const VanillaCaActivations& act,
                  const Matrix& d_y, VanillaCaParams& g) {
  Matrix d_in;
  accumulate_head(g.head, head_backward(p.head, act.head_trace, d_y, &d_in));
  const Matrix d_att = masked(std::move(d_in), mask);
  const std::size_t dv = p.dims.visual_dim;
  const Matrix d_att_v = slice_cols(d_att, 0, dv);
  const Matrix d_att_a = slice_cols(d_att, dv, d_att.cols());
  const auto ga = detail::branch_backward(
      s.audio.block(), s.visual.block(), {p.w_xa, p.w_a, p.w_ca, p.w_ha},
      {act.corr_a, act.pre_a, act.maps_a, act.attended_a}, d_att_a);
  const auto gv = detail::branch_backward(
      s.visual.block(), s.audio.block(), {p.w_xv, p.w_v, p.w_cv, p.w_hv},
      {act.corr_v, act.pre_v, act.maps_v, act.attended_v}, d_att_v);
  accumulate(g.w_xa, ga.w_corr);
  accumulate(g.w_a, ga.w_feat);
  accumulate(g.w_ca, ga.w_map);
  accumulate(g.w_ha, ga.w_attend);
  accumulate(g.w_xv, gv.w_corr);
  accumulate(g.w_v, gv.w_feat);
  accumulate(g.w_cv, gv.w_map);
  accumulate(g.w_hv, gv.w_attend);
}

void backward_one(const ConcatParams& p, const SubSequence&, const std::optional<Matrix>&,
                  const ConcatActivations& act, const Matrix& d_y, ConcatParams& g) {
  accumulate_head(g.head, head_backward(p.head, act.head_trace, d_y, nullptr));
}

auto full_forward(const JcaParams& p, const SubSequence& s, const std::optional<Matrix>& m) {
  return forward(p, s.audio, s.visual, m);
}
auto full_forward(const VanillaCaParams& p, const SubSequence& s, const std::optional<Matrix>& m) {
  return vanilla_ca_forward_full(p, s.audio, s.visual, m);
}
auto full_forward(const ConcatParams& p, const SubSequence& s, const std::optional<Matrix>& m) {
  return concat_forward_full(p, s.audio, s.visual, m);
}

void push_signs(const Matrix& m, std::vector<bool>& out) {
  for (double v : m.data()) out.push_back(v > 0.0);
}

void push_margin(const Matrix& m, double& margin) {
  for (double v : m.data()) margin = std::min(margin, std::abs(v));
}

template <typename Act>
void relu_inputs(const Act& act, auto&& sink) {
  if constexpr (requires { act.pre_a; }) {
    sink(act.pre_a);
    sink(act.pre_v);
  }
  // hidden head layers are followed by ReLU; the last one is not
  for (std::size_t l = 0; l + 1 < act.head_trace.pre.size(); ++l) sink(act.head_trace.pre[l]);
}

std::vector<bool> relu_pattern(const ModelParams& params, std::span<const SubSequence> batch,
                               std::span<const Matrix> masks) {
  std::vector<bool> bits;
  std::visit(
      [&](const auto& p) {
        for (std::size_t b = 0; b < batch.size(); ++b) {
          const auto act = full_forward(p, batch[b], mask_at(masks, b));
          relu_inputs(act, [&](const Matrix& m) { push_signs(m, bits); });
        }
      },
      params);
  return bits;
}

}  // namespace

const Matrix& GradientSet::get(std::string_view name) const {
  for (const auto& slot : param_slots(grads))
    if (slot.name == name) return *slot.value;
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

Matrix& GradientSet::get(std::string_view name) {
  for (auto& slot : param_slots(grads))
    if (slot.name == name) return *slot.value;
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

double batch_loss(const ModelParams& params, std::span<const SubSequence> batch, Target target,
                  std::span<const Matrix> masks) {
  check_batch(batch, masks, params, target);
  std::vector<Matrix> preds;
  preds.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b)
    preds.push_back(model_forward(params, batch[b].audio, batch[b].visual, mask_at(masks, b)));
  return loss_columns(preds, batch, target, nullptr);
}

GradientSet loss_and_grads(const ModelParams& params, std::span<const SubSequence> batch,
                           Target target, std::span<const Matrix> masks) {
  check_batch(batch, masks, params, target);
  GradientSet out{zeros_like(params), 0.0};
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        using Act = decltype(full_forward(p, batch[0], std::nullopt));
        std::vector<Act> acts;
        std::vector<Matrix> preds;
        acts.reserve(batch.size());
        for (std::size_t b = 0; b < batch.size(); ++b) {
          acts.push_back(full_forward(p, batch[b], mask_at(masks, b)));
          preds.push_back(acts.back().y_hat);
        }
        std::vector<Matrix> d_preds;
        out.loss = loss_columns(preds, batch, target, &d_preds);
        auto& g = std::get<P>(out.grads);
        for (std::size_t b = 0; b < batch.size(); ++b)
          backward_one(p, batch[b], mask_at(masks, b), acts[b], d_preds[b], g);
      },
      params);
  for (const auto& slot : param_slots(out.grads)) {
    if (!all_finite(*slot.value)) {
      throw NumericError("non-finite gradient for " + std::string(slot.name));
    }
  }
  return out;
}

GradientSet finite_diff_grads(const ModelParams& params, std::span<const SubSequence> batch,
                              Target target, std::span<const Matrix> masks, double step,
                              ModelParams* kink_flags) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  GradientSet out{zeros_like(params), batch_loss(params, batch, target, masks)};
  if (kink_flags) *kink_flags = zeros_like(params);
  ModelParams work = params;
  auto work_slots = param_slots(work);
  auto grad_slots = param_slots(out.grads);
  std::vector<ParamSlot> kink_slots;
  if (kink_flags) kink_slots = param_slots(*kink_flags);

  for (std::size_t s = 0; s < work_slots.size(); ++s) {
    Matrix& theta = *work_slots[s].value;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta.data()[i];
      theta.data()[i] = saved + step;
      const double plus = batch_loss(work, batch, target, masks);
      std::vector<bool> pattern_plus;
      if (kink_flags) pattern_plus = relu_pattern(work, batch, masks);
      theta.data()[i] = saved - step;
      const double minus = batch_loss(work, batch, target, masks);
      if (kink_flags && relu_pattern(work, batch, masks) != pattern_plus) {
        kink_slots[s].value->data()[i] = 1.0;
      }
      theta.data()[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericError("non-finite loss while perturbing " + std::string(work_slots[s].name));
      }
      grad_slots[s].value->data()[i] = (plus - minus) / (2.0 * step);
    }
  }
  return out;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

bool GradCheckReport::passed() const {
  return std::all_of(params.begin(), params.end(), [](const ParamCheck& p) { return p.passed; });
}

const ParamCheck* GradCheckReport::find(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

std::string GradCheckReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(16) << "parameter" << std::right << std::setw(9) << "entries"
     << std::setw(8) << "kinks" << std::setw(14) << "max_rel" << std::setw(14) << "max_abs"
     << "  status\n";
  os << std::scientific << std::setprecision(3);
  for (const auto& p : params) {
    os << std::left << std::setw(16) << p.name << std::right << std::setw(9) << p.entries
       << std::setw(8) << p.kink_entries << std::setw(14) << p.max_rel_error << std::setw(14)
       << p.max_abs_error << "  " << (p.passed ? "ok" : "FAIL") << '\n';
  }
  os << "tol=" << tol << " step=" << step << " result=" << (passed() ? "pass" : "fail") << '\n';
  return os.str();
}

std::string GradCheckReport::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& p : params) {
    j.push_back({{"parameter", p.name},
                 {"entries", p.entries},
                 {"kink_entries", p.kink_entries},
                 {"max_rel_error", p.max_rel_error},
                 {"max_abs_error", p.max_abs_error},
                 {"passed", p.passed}});
  }
  return j.dump(2);
}

GradCheckReport grad_check(const ModelParams& params, std::span<const SubSequence> batch,
                           Target target, std::span<const Matrix> masks,
                           const GradCheckOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("gradient check tolerance must be positive");
  GradientSet analytic = loss_and_grads(params, batch, target, masks);
  if (options.inject_fault) analytic.get(*options.inject_fault).data()[0] += 0.1;
  ModelParams kinks;
  const GradientSet numeric = finite_diff_grads(params, batch, target, masks, options.step, &kinks);

  GradCheckReport report;
  report.tol = options.tol;
  report.step = options.step;
  const auto a = param_slots(std::as_const(analytic.grads));
  const auto n = param_slots(std::as_const(numeric.grads));
  const auto k = param_slots(std::as_const(kinks));
  for (std::size_t s = 0; s < a.size(); ++s) {
    ParamCheck check;
    check.name = std::string(a[s].name);
    check.entries = a[s].value->size();
    for (std::size_t i = 0; i < check.entries; ++i) {
      if (k[s].value->data()[i] != 0.0) {
        ++check.kink_entries;
        continue;
      }
      const double ga = a[s].value->data()[i];
      const double gn = n[s].value->data()[i];
      check.max_abs_error = std::max(check.max_abs_error, std::abs(ga - gn));
      check.max_rel_error = std::max(check.max_rel_error, relative_error(ga, gn));
    }
    check.passed = check.max_rel_error <= options.tol;
    report.params.push_back(std::move(check));
  }
  return report;
}

double min_relu_margin(const ModelParams& params, std::span<const SubSequence> batch,
                       std::span<const Matrix> masks) {
  double margin = std::numeric_limits<double>::infinity();
  std::visit(
      [&](const auto& p) {
        for (std::size_t b = 0; b < batch.size(); ++b) {
          const auto act = full_forward(p, batch[b], mask_at(masks, b));
          relu_inputs(act, [&](const Matrix& m) { push_margin(m, margin); });
        }
      },
      params);
  return margin;
}

}  // namespace jca
