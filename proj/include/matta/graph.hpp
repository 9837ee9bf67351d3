#pragma once

#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

#include "matta/tensor.hpp"

namespace matta {

class Graph;

// Handle to a node recorded on a Graph.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Append-only differentiation tape.
///
/// Nodes are recorded in execution order, so inputs always precede their
/// consumers and backward is a single reverse sweep. Node values keep stable
/// addresses while the tape grows. A Graph is built per
/// training step and discarded; it is not thread-safe.
class Graph {
 public:
  enum class Op {
    leaf,
    matmul,
    add,
    mul,
    scale,
    slice_cols,
    concat_cols,
    activation,
    log_softmax,
    exp,
    stop_gradient,
    sum,
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Records a leaf (parameter, input or constant).
  Var leaf(Tensor value);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a 1x1 seed. Clears gradients from any earlier call.
  void backward(Var seed);

  // Gradient of the last backward seed wrt `v`; nullptr when `v` was not
  // reachable from the seed.
  const Tensor* grad(Var v) const;
  Tensor grad_or_zero(Var v) const;

 private:
  struct Node {
    Op op = Op::leaf;
    std::size_t in0 = 0;
    std::size_t in1 = 0;
    Tensor value;
    // Op parameters: slice offset, scale factor, activation kind.
    std::size_t offset = 0;
    double factor = 0.0;
    Activation act = Activation::tanh;
  };

  Var push(Node node);
  void accumulate(std::size_t id, const Tensor& g);
  void accumulate_cols(std::size_t id, const Tensor& g, std::size_t col0);

  std::deque<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<char> has_grad_;

  friend Var matmul(Var, Var);
  friend Var add(Var, Var);
  friend Var mul(Var, Var);
  friend Var scale(Var, double);
  friend std::pair<Var, Var> split_cols(Var, std::size_t);
  friend Var slice_cols(Var, std::size_t, std::size_t);
  friend Var concat_cols(Var, Var);
  friend Var activation(Var, Activation);
  friend Var log_softmax_rows(Var);
  friend Var exp(Var);
  friend Var stop_gradient(Var);
  friend Var sum(Var);
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double s);
Var slice_cols(Var x, std::size_t begin, std::size_t count);
// Splits after column m: ([.., :m], [.., m:]).
std::pair<Var, Var> split_cols(Var x, std::size_t m);
Var concat_cols(Var a, Var b);
Var activation(Var x, Activation kind);
Var log_softmax_rows(Var x);
Var exp(Var x);
// Identity forward, contributes nothing to x's ancestors on backward.
Var stop_gradient(Var x);
Var sum(Var x);  // 1x1

}  // namespace matta
