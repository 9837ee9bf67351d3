#include "matta/nested.hpp"

#include <cmath>

#include "matta/errors.hpp"

namespace matta {
namespace {

double init_std(std::size_t fan_in) { return fan_in == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(fan_in)); }

void require_cols(Var v, std::size_t cols, const char* what) {
  if (v.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(cols) +
                         " columns, got " + v.value().shape_str());
  }
}

}  // namespace

Sharing parse_sharing(const std::string& name) {
  if (name == "shared") return Sharing::shared;
  if (name == "unshared-blocks") return Sharing::unshared_blocks;
  if (name == "fully-unshared") return Sharing::fully_unshared;
  throw ContractError("unknown sharing mode '" + name + "'");
}

std::string to_string(Sharing s) {
  switch (s) {
    case Sharing::shared: return "shared";
    case Sharing::unshared_blocks: return "unshared-blocks";
    case Sharing::fully_unshared: return "fully-unshared";
  }
  return "?";
}

Var ParamBinder::operator()(const Tensor& param) {
  auto it = vars_.find(&param);
  if (it != vars_.end()) return it->second;
  Var v = graph_->leaf(param);
  vars_.emplace(&param, v);
  return v;
}

const Tensor* ParamBinder::grad(const Tensor& param) const {
  auto it = vars_.find(&param);
  return it == vars_.end() ? nullptr : graph_->grad(it->second);
}

Tensor NestedDense::assembled_ta() const {
  Tensor w(m_ta, n_ta);
  add_block_into(w, ta_narrow(), 0, 0);
  add_block_into(w, w_ta1, m_s, 0);
  add_block_into(w, w_ta2, 0, n_s);
  return w;
}

NestedDense nested_dense_new(std::size_t m_s, std::size_t m_ta, std::size_t n_s, std::size_t n_ta,
                             bool shared, Rng& rng) {
  if (m_s < 1 || n_s < 1 || m_s > m_ta || n_s > n_ta) {
    throw ContractError("nested_dense_new: need 1 <= m_s <= m_ta and 1 <= n_s <= n_ta, got m=(" +
                        std::to_string(m_s) + "," + std::to_string(m_ta) + ") n=(" +
                        std::to_string(n_s) + "," + std::to_string(n_ta) + ")");
  }
  NestedDense layer;
  layer.m_s = m_s;
  layer.m_ta = m_ta;
  layer.n_s = n_s;
  layer.n_ta = n_ta;
  layer.shared = shared;
  layer.w_s = Tensor::randn(m_s, n_s, init_std(m_s), rng);
  layer.w_ta1 = Tensor::randn(m_ta - m_s, n_s, init_std(m_ta - m_s), rng);
  layer.w_ta2 = Tensor::randn(m_ta, n_ta - n_s, init_std(m_ta), rng);
  if (!shared) layer.w_s_ta = layer.w_s;
  return layer;
}

Var nested_dense_student(const NestedDense& layer, ParamBinder& params, Var i_s) {
  require_cols(i_s, layer.m_s, "nested_dense student input");
  return matmul(i_s, params(layer.w_s));
}

Var nested_dense_ta(const NestedDense& layer, ParamBinder& params, Var i_ta) {
  require_cols(i_ta, layer.m_ta, "nested_dense TA input");
  auto [i0, i_extra] = split_cols(i_ta, layer.m_s);
  Var o0 = matmul(i0, params(layer.ta_narrow()));
  Var o_extra = matmul(i_extra, params(layer.w_ta1));
  Var o1 = add(o0, o_extra);
  Var o2 = matmul(i_ta, params(layer.w_ta2));
  return concat_cols(o1, o2);
}

std::pair<Var, Var> nested_dense_forward(const NestedDense& layer, ParamBinder& params, Var i_s,
                                         Var i_ta) {
  Var o_s = nested_dense_student(layer, params, i_s);
  Var o_ta = nested_dense_ta(layer, params, i_ta);
  return {o_s, o_ta};
}

NestedBlock nested_block_new(std::size_t d, std::size_t h_s, std::size_t h_ta, Activation act,
                             bool ta_exclusive, bool shared, Rng& rng) {
  NestedBlock block;
  block.up = nested_dense_new(d, d, h_s, h_ta, shared, rng);
  block.down = nested_dense_new(h_s, h_ta, d, d, shared, rng);
  block.act = act;
  block.ta_exclusive = ta_exclusive;
  return block;
}

std::pair<Var, Var> nested_block_forward(const NestedBlock& block, ParamBinder& params, Var x_s,
                                         Var x_ta) {
  Var y_s = x_s;
  if (!block.ta_exclusive) {
    Var h_s = activation(nested_dense_student(block.up, params, x_s), block.act);
    y_s = add(x_s, nested_dense_student(block.down, params, h_s));
  }
  Var h_ta = activation(nested_dense_ta(block.up, params, x_ta), block.act);
  Var y_ta = add(x_ta, nested_dense_ta(block.down, params, h_ta));
  return {y_s, y_ta};
}

MatTAModel MatTAModel::create(const ModelDims& dims, Sharing sharing, Activation act, Rng& rng) {
  if (dims.d_in < 1 || dims.d < 1 || dims.h_s < 1 || dims.h_s > dims.h_ta || dims.classes < 1) {
    throw ContractError("MatTAModel: invalid dims (need d_in, d, h_s >= 1, h_s <= h_ta, C >= 1)");
  }
  MatTAModel m;
  m.dims_ = dims;
  m.sharing_ = sharing;
  m.act_ = act;
  m.encoder_ = Tensor::randn(dims.d_in, dims.d, init_std(dims.d_in), rng);
  const bool shared_blocks = sharing == Sharing::shared;
  for (std::size_t i = 0; i < dims.n_blocks(); ++i) {
    m.blocks_.push_back(nested_block_new(dims.d, dims.h_s, dims.h_ta, act, i >= dims.n_shared,
                                         shared_blocks, rng));
  }
  m.readout_ = Tensor::randn(dims.d, dims.classes, init_std(dims.d), rng);
  if (sharing == Sharing::fully_unshared) {
    m.ta_encoder_ = m.encoder_;
    m.ta_readout_ = m.readout_;
  }
  return m;
}

const Tensor& MatTAModel::encoder(Which w) const {
  return (w == Which::ta && ta_encoder_) ? *ta_encoder_ : encoder_;
}

const Tensor& MatTAModel::readout(Which w) const {
  return (w == Which::ta && ta_readout_) ? *ta_readout_ : readout_;
}

std::vector<std::pair<std::string, Tensor*>> MatTAModel::named_params_mut() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.emplace_back("encoder", &encoder_);
  if (ta_encoder_) out.emplace_back("ta_encoder", &*ta_encoder_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const std::string prefix = "blocks." + std::to_string(i) + ".";
    for (auto [name, layer] : {std::pair{"up", &blocks_[i].up}, std::pair{"down", &blocks_[i].down}}) {
      const std::string p = prefix + name + ".";
      out.emplace_back(p + "w_s", &layer->w_s);
      out.emplace_back(p + "w_ta1", &layer->w_ta1);
      out.emplace_back(p + "w_ta2", &layer->w_ta2);
      if (layer->w_s_ta) out.emplace_back(p + "w_s_ta", &*layer->w_s_ta);
    }
  }
  out.emplace_back("readout", &readout_);
  if (ta_readout_) out.emplace_back("ta_readout", &*ta_readout_);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> MatTAModel::named_params() const {
  auto mut = const_cast<MatTAModel*>(this)->named_params_mut();
  return {mut.begin(), mut.end()};
}

Tensor* MatTAModel::find_param(const std::string& name) {
  for (auto& [n, t] : named_params_mut())
    if (n == name) return t;
  return nullptr;
}

std::unordered_set<const Tensor*> MatTAModel::student_params() const {
  std::unordered_set<const Tensor*> s{&encoder_, &readout_};
  for (const auto& b : blocks_) {
    if (b.ta_exclusive) continue;
    s.insert(&b.up.w_s);
    s.insert(&b.down.w_s);
  }
  return s;
}

std::unordered_set<const Tensor*> MatTAModel::ta_path_params() const {
  std::unordered_set<const Tensor*> s{&encoder(Which::ta), &readout(Which::ta)};
  for (const auto& b : blocks_) {
    for (const NestedDense* layer : {&b.up, &b.down}) {
      s.insert(&layer->ta_narrow());
      s.insert(&layer->w_ta1);
      s.insert(&layer->w_ta2);
    }
  }
  return s;
}

std::pair<Var, Var> MatTAModel::forward(ParamBinder& params, Var x) const {
  if (x.cols() != dims_.d_in) {
    throw DimensionError("model_forward: expected input with " + std::to_string(dims_.d_in) +
                         " columns, got " + x.value().shape_str());
  }
  Var x_s = matmul(x, params(encoder(Which::student)));
  Var x_ta = ta_encoder_ ? matmul(x, params(*ta_encoder_)) : x_s;
  for (const auto& block : blocks_) std::tie(x_s, x_ta) = nested_block_forward(block, params, x_s, x_ta);
  return {matmul(x_s, params(readout(Which::student))), matmul(x_ta, params(readout(Which::ta)))};
}

std::pair<Tensor, Tensor> MatTAModel::logits(const Tensor& x) const {
  Graph g;
  ParamBinder params(g);
  auto [s, ta] = forward(params, g.leaf(x));
  return {s.value(), ta.value()};
}

std::size_t param_count(const MatTAModel& model, Which which) {
  std::size_t n = 0;
  if (which == Which::student) {
    for (const Tensor* t : model.student_params()) n += t->size();
  } else {
    for (const auto& [name, t] : model.named_params()) n += t->size();
  }
  return n;
}

}  // namespace matta
