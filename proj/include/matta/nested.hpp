#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "matta/graph.hpp"
#include "matta/rng.hpp"
#include "matta/tensor.hpp"

namespace matta {

// How the TA path relates to Student storage.
//   shared          - TA reads the Student's w_s tensors (Θ ⊂ Φ).
//   unshared_blocks - every nested dense keeps a TA-private copy of w_s;
//                     encoder and readout stay shared.
//   fully_unshared  - additionally the TA has its own encoder and readout.
enum class Sharing { shared, unshared_blocks, fully_unshared };

Sharing parse_sharing(const std::string& name);
std::string to_string(Sharing s);

/// Maps parameter tensors to graph leaves, one leaf per tensor address.
///
/// Binding the same tensor twice returns the same Var, so gradients from
/// every use of a shared tensor are summed on that leaf.
class ParamBinder {
 public:
  explicit ParamBinder(Graph& graph) : graph_(&graph) {}

  Var operator()(const Tensor& param);
  Graph& graph() const { return *graph_; }
  // Gradient for a bound parameter, or nullptr if unbound/unreachable.
  const Tensor* grad(const Tensor& param) const;
  bool bound(const Tensor& param) const { return vars_.contains(&param); }

 private:
  Graph* graph_;
  std::unordered_map<const Tensor*, Var> vars_;
};

/// Dense layer whose Student weights are nested inside the TA weights.
///
/// Layout of the TA weight matrix (m_ta x n_ta):
///
///   [ w_s   (m_s x n_s)        | w_ta2 (m_ta x (n_ta - n_s)) ]
///   [ w_ta1 ((m_ta-m_s) x n_s) |                            ]
///
/// When `shared` is false the TA path reads `w_s_ta` instead of `w_s`.
struct NestedDense {
  std::size_t m_s = 0, m_ta = 0, n_s = 0, n_ta = 0;
  bool shared = true;
  Tensor w_s;
  Tensor w_ta1;
  Tensor w_ta2;
  std::optional<Tensor> w_s_ta;

  const Tensor& ta_narrow() const { return shared ? w_s : *w_s_ta; }
  Tensor& ta_narrow() { return shared ? w_s : *w_s_ta; }
  // The assembled m_ta x n_ta matrix read by the TA path.
  Tensor assembled_ta() const;
};

NestedDense nested_dense_new(std::size_t m_s, std::size_t m_ta, std::size_t n_s, std::size_t n_ta,
                             bool shared, Rng& rng);

Var nested_dense_student(const NestedDense& layer, ParamBinder& params, Var i_s);
Var nested_dense_ta(const NestedDense& layer, ParamBinder& params, Var i_ta);
std::pair<Var, Var> nested_dense_forward(const NestedDense& layer, ParamBinder& params, Var i_s,
                                         Var i_ta);

/// Residual FFN block y = x + down(act(up(x))) with nested hidden width.
struct NestedBlock {
  NestedDense up;    // d -> {h_s ⊂ h_ta}
  NestedDense down;  // {h_s ⊂ h_ta} -> d
  Activation act = Activation::gelu_tanh;
  bool ta_exclusive = false;
};

NestedBlock nested_block_new(std::size_t d, std::size_t h_s, std::size_t h_ta, Activation act,
                             bool ta_exclusive, bool shared, Rng& rng);

std::pair<Var, Var> nested_block_forward(const NestedBlock& block, ParamBinder& params, Var x_s,
                                         Var x_ta);

struct ModelDims {
  std::size_t d_in = 16;
  std::size_t d = 16;
  std::size_t h_s = 8;
  std::size_t h_ta = 48;
  std::size_t n_shared = 2;
  std::size_t n_extra = 1;
  std::size_t classes = 2;

  std::size_t n_blocks() const { return n_shared + n_extra; }
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

enum class Which { student, ta };

/// Encoder, nested residual blocks (the last n_extra TA-exclusive) and readout.
class MatTAModel {
 public:
  static MatTAModel create(const ModelDims& dims, Sharing sharing, Activation act, Rng& rng);

  const ModelDims& dims() const { return dims_; }
  Sharing sharing() const { return sharing_; }
  Activation act() const { return act_; }

  const Tensor& encoder(Which w) const;
  const Tensor& readout(Which w) const;
  const std::vector<NestedBlock>& blocks() const { return blocks_; }

  // Every tensor of Φ with its canonical name, in a fixed order.
  std::vector<std::pair<std::string, const Tensor*>> named_params() const;
  std::vector<std::pair<std::string, Tensor*>> named_params_mut();
  Tensor* find_param(const std::string& name);

  // Θ: tensors read by the Student path.
  std::unordered_set<const Tensor*> student_params() const;
  // Tensors read by the TA path.
  std::unordered_set<const Tensor*> ta_path_params() const;

  // Leaves created by `params` for this model are bound lazily on use.
  std::pair<Var, Var> forward(ParamBinder& params, Var x) const;
  // Convenience: (logits_s, logits_ta) on a private graph.
  std::pair<Tensor, Tensor> logits(const Tensor& x) const;

 private:
  ModelDims dims_;
  Sharing sharing_ = Sharing::shared;
  Activation act_ = Activation::gelu_tanh;
  Tensor encoder_;
  Tensor readout_;
  std::optional<Tensor> ta_encoder_;
  std::optional<Tensor> ta_readout_;
  std::vector<NestedBlock> blocks_;
};

// Number of scalar parameters in Θ (student) or Φ (ta, every tensor).
std::size_t param_count(const MatTAModel& model, Which which);

}  // namespace matta
