#include "matta/graph.hpp"

#include <cmath>

#include "matta/errors.hpp"

namespace matta {
namespace {

Graph& owner(Var a, Var b) {
  if (a.graph == nullptr || a.graph != b.graph) throw ContractError("operands belong to different graphs");
  return *a.graph;
}

Graph& owner(Var a) {
  if (a.graph == nullptr) throw ContractError("operand is not recorded on a graph");
  return *a.graph;
}

}  // namespace

const Tensor& Var::value() const { return graph->value(*this); }

Var Graph::leaf(Tensor value) {
  Node n;
  n.op = Op::leaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::push(Node node) {
#ifndef NDEBUG
  node.value.check_finite("graph op");
#endif
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

void Graph::accumulate(std::size_t id, const Tensor& g) {
  if (has_grad_[id]) {
    add_into(grads_[id], g);
  } else {
    grads_[id] = g;
    has_grad_[id] = 1;
  }
}

void Graph::accumulate_cols(std::size_t id, const Tensor& g, std::size_t col0) {
  if (!has_grad_[id]) {
    grads_[id] = Tensor::zeros(nodes_[id].value.rows(), nodes_[id].value.cols());
    has_grad_[id] = 1;
  }
  add_block_into(grads_[id], g, 0, col0);
}

void Graph::backward(Var seed) {
  if (seed.graph != this) throw ContractError("backward: seed belongs to another graph");
  const Tensor& sv = nodes_.at(seed.id).value;
  if (sv.rows() != 1 || sv.cols() != 1) {
    throw ContractError("backward: seed must be a 1x1 scalar, got " + sv.shape_str());
  }
  grads_.assign(nodes_.size(), Tensor{});
  has_grad_.assign(nodes_.size(), 0);
  grads_[seed.id] = Tensor::scalar(1.0);
  has_grad_[seed.id] = 1;

  for (std::size_t id = seed.id + 1; id-- > 0;) {
    if (!has_grad_[id]) continue;
    const Node& n = nodes_[id];
    const Tensor& g = grads_[id];
    switch (n.op) {
      case Op::leaf:
      case Op::stop_gradient:
        break;
      case Op::matmul:
        accumulate(n.in0, matmul_nt(g, nodes_[n.in1].value));
        accumulate(n.in1, matmul_tn(nodes_[n.in0].value, g));
        break;
      case Op::add:
        accumulate(n.in0, g);
        accumulate(n.in1, g);
        break;
      case Op::mul:
        accumulate(n.in0, hadamard(g, nodes_[n.in1].value));
        accumulate(n.in1, hadamard(g, nodes_[n.in0].value));
        break;
      case Op::scale:
        accumulate(n.in0, matta::scale(g, n.factor));
        break;
      case Op::slice_cols:
        accumulate_cols(n.in0, g, n.offset);
        break;
      case Op::concat_cols: {
        const std::size_t left = nodes_[n.in0].value.cols();
        accumulate(n.in0, matta::slice_cols(g, 0, left));
        accumulate(n.in1, matta::slice_cols(g, left, g.cols() - left));
        break;
      }
      case Op::activation:
        accumulate(n.in0, hadamard(g, activation_derivative(nodes_[n.in0].value, n.act)));
        break;
      case Op::log_softmax: {
        // d/dx = g - softmax(x) * rowsum(g)
        Tensor gx = g;
        for (std::size_t i = 0; i < g.rows(); ++i) {
          double row_total = 0.0;
          for (std::size_t j = 0; j < g.cols(); ++j) row_total += g(i, j);
          for (std::size_t j = 0; j < g.cols(); ++j) gx(i, j) -= std::exp(n.value(i, j)) * row_total;
        }
        accumulate(n.in0, gx);
        break;
      }
      case Op::exp:
        accumulate(n.in0, hadamard(g, n.value));
        break;
      case Op::sum: {
        const Tensor& x = nodes_[n.in0].value;
        accumulate(n.in0, Tensor::filled(x.rows(), x.cols(), g.item()));
        break;
      }
    }
  }
}

const Tensor* Graph::grad(Var v) const {
  if (v.id >= has_grad_.size() || !has_grad_[v.id]) return nullptr;
  return &grads_[v.id];
}

Tensor Graph::grad_or_zero(Var v) const {
  if (const Tensor* g = grad(v)) return *g;
  const Tensor& x = value(v);
  return Tensor::zeros(x.rows(), x.cols());
}

Var matmul(Var a, Var b) {
  Graph& g = owner(a, b);
  Graph::Node n;
  n.op = Graph::Op::matmul;
  n.in0 = a.id;
  n.in1 = b.id;
  n.value = matmul(a.value(), b.value());
  return g.push(std::move(n));
}

Var add(Var a, Var b) {
  Graph& g = owner(a, b);
  Graph::Node n;
  n.op = Graph::Op::add;
  n.in0 = a.id;
  n.in1 = b.id;
  n.value = add(a.value(), b.value());
  return g.push(std::move(n));
}

Var mul(Var a, Var b) {
  Graph& g = owner(a, b);
  Graph::Node n;
  n.op = Graph::Op::mul;
  n.in0 = a.id;
  n.in1 = b.id;
  n.value = hadamard(a.value(), b.value());
  return g.push(std::move(n));
}

Var scale(Var a, double s) {
  Graph& g = owner(a);
  Graph::Node n;
  n.op = Graph::Op::scale;
  n.in0 = a.id;
  n.factor = s;
  n.value = scale(a.value(), s);
  return g.push(std::move(n));
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::slice_cols;
  n.in0 = x.id;
  n.offset = begin;
  n.value = slice_cols(x.value(), begin, count);
  return g.push(std::move(n));
}

std::pair<Var, Var> split_cols(Var x, std::size_t m) {
  const std::size_t cols = x.value().cols();
  if (m > cols) {
    throw DimensionError("split_cols: split point " + std::to_string(m) + " exceeds " +
                         x.value().shape_str());
  }
  return {slice_cols(x, 0, m), slice_cols(x, m, cols - m)};
}

Var concat_cols(Var a, Var b) {
  Graph& g = owner(a, b);
  Graph::Node n;
  n.op = Graph::Op::concat_cols;
  n.in0 = a.id;
  n.in1 = b.id;
  n.value = concat_cols(a.value(), b.value());
  return g.push(std::move(n));
}

Var activation(Var x, Activation kind) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::activation;
  n.in0 = x.id;
  n.act = kind;
  n.value = activation(x.value(), kind);
  return g.push(std::move(n));
}

Var log_softmax_rows(Var x) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::log_softmax;
  n.in0 = x.id;
  n.value = log_softmax_rows(x.value());
  return g.push(std::move(n));
}

Var exp(Var x) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::exp;
  n.in0 = x.id;
  n.value = exp(x.value());
  return g.push(std::move(n));
}

Var stop_gradient(Var x) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::stop_gradient;
  n.in0 = x.id;
  n.value = x.value();
  return g.push(std::move(n));
}

Var sum(Var x) {
  Graph& g = owner(x);
  Graph::Node n;
  n.op = Graph::Op::sum;
  n.in0 = x.id;
  n.value = Tensor::scalar(sum(x.value()));
  return g.push(std::move(n));
}

}  // namespace matta
