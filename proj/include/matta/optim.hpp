#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "matta/tensor.hpp"

namespace matta {

enum class Method { sgd, adagrad, adam, shampoo };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct OptimHyper {
  double lr = 0.01;
  // Adagrad / Adam denominator epsilon.
  double epsilon = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.999;
  // Shampoo damping added to both Kronecker factors before the root.
  double shampoo_epsilon = 1e-6;
  std::size_t update_interval = 10;
};

// ---- first-order methods --------------------------------------------------

struct FirstOrderState {
  Method method = Method::sgd;
  OptimHyper hyper;
  Tensor acc;   // adagrad: Σ G∘G; adam: first moment
  Tensor acc2;  // adam: second moment
  std::size_t step = 0;
};

FirstOrderState first_order_new(Method method, const OptimHyper& hyper, std::size_t rows,
                                std::size_t cols);
// param ← param - lr·update, where update follows the state's method.
void first_order_step(FirstOrderState& state, Tensor& param, const Tensor& grad, double lr);

// ---- Shampoo ----------------------------------------------------------------

/// Kronecker-factored second-moment state for one m x n parameter matrix.
struct ShampooState {
  Tensor left;   // Σ G·Gᵀ  (m x m)
  Tensor right;  // Σ Gᵀ·G  (n x n)
  Tensor left_root;
  Tensor right_root;
  bool roots_valid = false;
  std::size_t step = 0;
  std::size_t update_interval = 10;
  double epsilon = 1e-6;
};

ShampooState shampoo_new(std::size_t rows, std::size_t cols, std::size_t update_interval,
                         double epsilon);
void shampoo_accumulate(ShampooState& state, const Tensor& grad);
// left_root·G·right_root with roots (acc + εI)^(-1/4), refreshed when
// absent or when step is a multiple of update_interval.
Tensor shampoo_direction(ShampooState& state, const Tensor& grad);
// param ← param - lr·shampoo_direction(grad). Accumulate first.
void shampoo_step(ShampooState& state, Tensor& param, const Tensor& grad, double lr);

// ---- parameter grouping -----------------------------------------------------

// One parameter tensor placed as a block inside a preconditioned matrix.
struct ParamSlot {
  Tensor* param = nullptr;
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  double lr_scale = 1.0;
};

// A matrix preconditioned as a unit. For first-order methods grouping has
// no effect on the update.
struct PrecondGroup {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<ParamSlot> slots;
};

// Returns the gradient for a parameter, or nullptr for "no gradient" (zero).
using GradLookup = std::function<const Tensor*(const Tensor& param)>;

/// Steps every registered tensor exactly once per call.
class Optimizer {
 public:
  Optimizer(Method method, const OptimHyper& hyper, std::vector<PrecondGroup> groups);

  void step(const GradLookup& grads);

  Method method() const { return method_; }
  const std::vector<PrecondGroup>& groups() const { return groups_; }
  // Shampoo state per group (empty for first-order methods).
  const std::vector<ShampooState>& shampoo_states() const { return shampoo_; }
  std::vector<ShampooState>& shampoo_states() { return shampoo_; }

 private:
  Method method_;
  OptimHyper hyper_;
  std::vector<PrecondGroup> groups_;
  std::vector<ShampooState> shampoo_;
  std::vector<std::vector<FirstOrderState>> first_order_;
};

// ---- preconditioner structure report ----------------------------------------

struct BlockStats {
  std::size_t split = 0;
  std::size_t dim = 0;
  // Mean |C_ij| over off-diagonal entries of each region.
  double mean_abs_student = 0.0;  // [0, split)²
  double mean_abs_extra = 0.0;    // [split, dim)²
  double mean_abs_within = 0.0;   // both diagonal blocks together
  double mean_abs_cross = 0.0;    // [0, split) x [split, dim)
  double within_cross_ratio = 0.0;
  bool zero_diagonal = false;     // some C_ii undefined, reported as 0
};

struct PreconditionerReport {
  Tensor correlation;  // acc_ij / sqrt(acc_ii·acc_jj)
  BlockStats stats;
};

PreconditionerReport preconditioner_report(const Tensor& accumulator, std::size_t split);

// Plain-text artifacts for a report.
std::string heatmap_pgm(const Tensor& correlation);
std::string matrix_csv(const Tensor& m);

}  // namespace matta
