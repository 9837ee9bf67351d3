#pragma once

#include <cstddef>

#include "matta/graph.hpp"
#include "matta/tensor.hpp"

namespace matta {

// ω of the composite objective.
struct LossWeights {
  double w_s = 1.0;
  double w_ta = 1.0;
  double w_d = 1.0;
};

void validate(const LossWeights& w);

// Linear ramp of the distillation weight between two steps.
struct Curriculum {
  std::size_t ramp_start = 0;
  std::size_t ramp_end = 0;
};

// Mean over rows of -Σ y·log_softmax(logits). Rows of y must be
// probability vectors (entries >= 0, sums within 1e-6 of 1).
Var soft_cross_entropy(Var logits, const Tensor& y);
double soft_cross_entropy(const Tensor& logits, const Tensor& y);

// Mean over rows of -Σ softmax(logits_ta)·log_softmax(logits_s). The TA
// logits pass through stop_gradient, so no gradient reaches the TA path.
Var distill_loss(Var logits_s, Var logits_ta);
double distill_loss(const Tensor& logits_s, const Tensor& logits_ta);

Var composite_loss(const LossWeights& w, Var l_s, Var l_ta, Var l_d);
double composite_loss(const LossWeights& w, double l_s, double l_ta, double l_d);

// 0 before ramp_start, `target` from ramp_end on, linear in between.
double curriculum_weight(std::size_t step, const Curriculum& c, double target);

}  // namespace matta
