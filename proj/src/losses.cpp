#include "matta/losses.hpp"

#include <cmath>

#include "matta/errors.hpp"

namespace matta {
namespace {

void validate_targets(const Tensor& y) {
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
      if (!(y(i, j) >= 0.0)) {
        throw ContractError("soft_cross_entropy: negative target in row " + std::to_string(i));
      }
      total += y(i, j);
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw ContractError("soft_cross_entropy: target row " + std::to_string(i) + " sums to " +
                          std::to_string(total));
    }
  }
}

double inv_batch(std::size_t rows) { return rows == 0 ? 0.0 : 1.0 / static_cast<double>(rows); }

}  // namespace

void validate(const LossWeights& w) {
  if (!(w.w_s >= 0.0 && w.w_ta >= 0.0 && w.w_d >= 0.0)) throw ContractError("loss weights must be >= 0");
  if (w.w_s == 0.0 && w.w_ta == 0.0 && w.w_d == 0.0) throw ContractError("loss weights are all zero");
}

Var soft_cross_entropy(Var logits, const Tensor& y) {
  if (!logits.value().same_shape(y)) {
    throw DimensionError("soft_cross_entropy: logits " + logits.value().shape_str() + " vs targets " +
                         y.shape_str());
  }
  validate_targets(y);
  Graph& g = *logits.graph;
  Var picked = mul(log_softmax_rows(logits), g.leaf(y));
  return scale(sum(picked), -inv_batch(y.rows()));
}

double soft_cross_entropy(const Tensor& logits, const Tensor& y) {
  Graph g;
  return soft_cross_entropy(g.leaf(logits), y).value().item();
}

Var distill_loss(Var logits_s, Var logits_ta) {
  if (!logits_s.value().same_shape(logits_ta.value())) {
    throw DimensionError("distill_loss: shape mismatch " + logits_s.value().shape_str() + " vs " +
                         logits_ta.value().shape_str());
  }
  Var p_ta = exp(log_softmax_rows(stop_gradient(logits_ta)));
  Var picked = mul(log_softmax_rows(logits_s), p_ta);
  return scale(sum(picked), -inv_batch(logits_s.rows()));
}

double distill_loss(const Tensor& logits_s, const Tensor& logits_ta) {
  Graph g;
  return distill_loss(g.leaf(logits_s), g.leaf(logits_ta)).value().item();
}

Var composite_loss(const LossWeights& w, Var l_s, Var l_ta, Var l_d) {
  return add(add(scale(l_s, w.w_s), scale(l_ta, w.w_ta)), scale(l_d, w.w_d));
}

double composite_loss(const LossWeights& w, double l_s, double l_ta, double l_d) {
  return w.w_s * l_s + w.w_ta * l_ta + w.w_d * l_d;
}

double curriculum_weight(std::size_t step, const Curriculum& c, double target) {
  if (c.ramp_start > c.ramp_end) throw ContractError("curriculum: ramp_start > ramp_end");
  if (!(target >= 0.0)) throw ContractError("curriculum: target must be >= 0");
  if (step < c.ramp_start) return 0.0;
  if (step >= c.ramp_end) return target;
  const double frac = static_cast<double>(step - c.ramp_start) /
                      static_cast<double>(c.ramp_end - c.ramp_start);
  return target * frac;
}

}  // namespace matta
