#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "matta/rng.hpp"
#include "matta/tensor.hpp"

namespace matta {

enum class LabelMode { soft, hard_event };

LabelMode parse_label_mode(const std::string& name);
std::string to_string(LabelMode m);

struct TaskParams {
  std::uint64_t seed = 1234;
  std::size_t d_in = 16;
  std::size_t classes = 2;
  std::size_t teacher_hidden = 64;
  std::size_t mixtures = 8;
  double temperature = 1.0;
  LabelMode label_mode = LabelMode::hard_event;
  // Standard deviation of the mixture means around the origin.
  double input_spread = 1.5;
  // Gain applied to both teacher weight matrices (relative to 1/sqrt(fan_in)).
  double teacher_gain = 2.5;
};

struct Batch {
  Tensor x;
  Tensor y;
};

/// Frozen MLP teacher (d_in -> hidden -> C, tanh) over a Gaussian mixture.
class SyntheticTask {
 public:
  static SyntheticTask create(const TaskParams& params);

  const TaskParams& params() const { return params_; }
  // Teacher logits already divided by the temperature.
  Tensor teacher_logits(const Tensor& x) const;
  Tensor teacher_probs(const Tensor& x) const { return softmax_rows(teacher_logits(x)); }

  Tensor sample_inputs(Rng& rng, std::size_t batch) const;
  // Targets follow the task's label mode (soft rows or one-hot draws).
  Batch sample_batch(Rng& rng, std::size_t batch) const;

  const Tensor& teacher_hidden_weights() const { return w1_; }
  const Tensor& teacher_output_weights() const { return w2_; }
  const Tensor& mixture_means() const { return means_; }

 private:
  TaskParams params_;
  Tensor means_;                 // G x d_in
  std::vector<double> scales_;   // per component
  std::vector<double> cumulative_;
  Tensor w1_;
  Tensor w2_;
};

// Stream ids used to derive disjoint generators from a run seed.
inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kEvalStream = 2;
inline constexpr std::uint64_t kInitStream = 3;

// Area under the ROC curve, P(score+ > score-) + P(tie)/2. Throws
// MetricError unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct EvalMetrics {
  double cross_entropy = 0.0;  // vs soft teacher labels
  double accuracy = 0.0;       // vs teacher argmax
  double auroc = 0.0;          // C == 2 only, NaN otherwise
  double aucloss = 0.0;        // 1 - auroc
};

struct EvalSet {
  Tensor x;
  Tensor soft;              // teacher probabilities
  std::vector<int> argmax;  // teacher argmax class
};

EvalSet make_eval_set(const SyntheticTask& task, std::size_t n_eval, std::uint64_t seed);

using LogitsFn = std::function<Tensor(const Tensor& x)>;

EvalMetrics evaluate(const LogitsFn& logits, const EvalSet& set);
EvalMetrics evaluate(const LogitsFn& logits, const SyntheticTask& task, std::size_t n_eval,
                     std::uint64_t seed);

}  // namespace matta
