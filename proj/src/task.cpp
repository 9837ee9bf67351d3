#include "matta/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "matta/errors.hpp"
#include "matta/losses.hpp"

namespace matta {

LabelMode parse_label_mode(const std::string& name) {
  if (name == "soft") return LabelMode::soft;
  if (name == "hard-event") return LabelMode::hard_event;
  throw ContractError("unknown label mode '" + name + "'");
}

std::string to_string(LabelMode m) { return m == LabelMode::soft ? "soft" : "hard-event"; }

SyntheticTask SyntheticTask::create(const TaskParams& p) {
  if (p.classes < 2) throw ContractError("task: need at least 2 classes");
  if (!(p.temperature > 0.0)) throw ContractError("task: temperature must be > 0");
  if (p.d_in < 1 || p.teacher_hidden < 1 || p.mixtures < 1) {
    throw ContractError("task: d_in, teacher_hidden and mixtures must be >= 1");
  }
  SyntheticTask t;
  t.params_ = p;
  Rng rng(p.seed);
  t.means_ = Tensor::randn(p.mixtures, p.d_in, p.input_spread, rng);
  double total = 0.0;
  for (std::size_t g = 0; g < p.mixtures; ++g) {
    t.scales_.push_back(rng.uniform(0.5, 1.5));
    total += rng.uniform(0.5, 1.5);
    t.cumulative_.push_back(total);
  }
  for (auto& c : t.cumulative_) c /= total;
  t.w1_ = Tensor::randn(p.d_in, p.teacher_hidden, p.teacher_gain / std::sqrt(double(p.d_in)), rng);
  t.w2_ = Tensor::randn(p.teacher_hidden, p.classes, p.teacher_gain / std::sqrt(double(p.teacher_hidden)), rng);
  return t;
}

Tensor SyntheticTask::teacher_logits(const Tensor& x) const {
  return scale(matmul(activation(matmul(x, w1_), Activation::tanh), w2_), 1.0 / params_.temperature);
}

Tensor SyntheticTask::sample_inputs(Rng& rng, std::size_t batch) const {
  Tensor x(batch, params_.d_in);
  for (std::size_t i = 0; i < batch; ++i) {
    const double u = rng.uniform();
    std::size_t g = static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    g = std::min(g, params_.mixtures - 1);
    for (std::size_t j = 0; j < params_.d_in; ++j) x(i, j) = means_(g, j) + scales_[g] * rng.normal();
  }
  return x;
}

Batch SyntheticTask::sample_batch(Rng& rng, std::size_t batch) const {
  if (batch < 1) throw ContractError("sample_batch: batch size must be >= 1");
  Batch b;
  b.x = sample_inputs(rng, batch);
  b.y = teacher_probs(b.x);
  if (params_.label_mode == LabelMode::hard_event) {
    for (std::size_t i = 0; i < batch; ++i) {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = b.y.cols() - 1;
      for (std::size_t j = 0; j < b.y.cols(); ++j) {
        acc += b.y(i, j);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      for (std::size_t j = 0; j < b.y.cols(); ++j) b.y(i, j) = j == pick ? 1.0 : 0.0;
    }
  }
  return b;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auroc: scores and labels differ in length");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ContractError("auroc: labels must be 0/1");
    if (std::isnan(scores[i])) throw MetricError("auroc: NaN score");
    pos += labels[i] == 1;
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw MetricError("auroc: undefined with a single class present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk tie groups in ascending score order; each positive beats every
  // negative seen so far and half of the negatives tied with it.
  double wins = 0.0;
  std::size_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0, group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? group_pos : group_neg)++;
      ++j;
    }
    wins += static_cast<double>(group_pos) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(group_neg));
    neg_below += group_neg;
    i = j;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

EvalSet make_eval_set(const SyntheticTask& task, std::size_t n_eval, std::uint64_t seed) {
  if (n_eval < 1) throw ContractError("evaluate: n_eval must be >= 1");
  Rng rng = Rng::stream(seed, kEvalStream);
  EvalSet set;
  set.x = task.sample_inputs(rng, n_eval);
  set.soft = task.teacher_probs(set.x);
  set.argmax.resize(n_eval);
  for (std::size_t i = 0; i < n_eval; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < set.soft.cols(); ++j)
      if (set.soft(i, j) > set.soft(i, best)) best = j;
    set.argmax[i] = static_cast<int>(best);
  }
  return set;
}

EvalMetrics evaluate(const LogitsFn& logits_fn, const EvalSet& set) {
  const Tensor logits = logits_fn(set.x);
  if (!logits.same_shape(set.soft)) {
    throw DimensionError("evaluate: logits " + logits.shape_str() + " vs labels " + set.soft.shape_str());
  }
  EvalMetrics m;
  m.cross_entropy = soft_cross_entropy(logits, set.soft);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols(); ++j)
      if (logits(i, j) > logits(i, best)) best = j;
    correct += static_cast<int>(best) == set.argmax[i];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows());
  if (logits.cols() == 2) {
    const Tensor probs = softmax_rows(logits);
    std::vector<double> scores(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) scores[i] = probs(i, 1);
    m.auroc = auroc(scores, set.argmax);
    m.aucloss = 1.0 - m.auroc;
  } else {
    m.auroc = std::numeric_limits<double>::quiet_NaN();
    m.aucloss = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

EvalMetrics evaluate(const LogitsFn& logits_fn, const SyntheticTask& task, std::size_t n_eval,
                     std::uint64_t seed) {
  return evaluate(logits_fn, make_eval_set(task, n_eval, seed));
}

}  // namespace matta
