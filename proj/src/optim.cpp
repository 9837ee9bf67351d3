#include "matta/optim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "matta/errors.hpp"
#include "matta/linalg.hpp"

namespace matta {
namespace {

void require_same(const Tensor& param, const Tensor& grad, const char* what) {
  if (!param.same_shape(grad)) {
    throw DimensionError(std::string(what) + ": parameter " + param.shape_str() + " vs gradient " +
                         grad.shape_str());
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "sgd") return Method::sgd;
  if (name == "adagrad") return Method::adagrad;
  if (name == "adam") return Method::adam;
  if (name == "shampoo") return Method::shampoo;
  throw ContractError("unknown optimizer '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::sgd: return "sgd";
    case Method::adagrad: return "adagrad";
    case Method::adam: return "adam";
    case Method::shampoo: return "shampoo";
  }
  return "?";
}

FirstOrderState first_order_new(Method method, const OptimHyper& hyper, std::size_t rows,
                                std::size_t cols) {
  if (method == Method::shampoo) throw ContractError("first_order_new: shampoo is not first-order");
  FirstOrderState s;
  s.method = method;
  s.hyper = hyper;
  if (method != Method::sgd) s.acc = Tensor::zeros(rows, cols);
  if (method == Method::adam) s.acc2 = Tensor::zeros(rows, cols);
  return s;
}

void first_order_step(FirstOrderState& state, Tensor& param, const Tensor& grad, double lr) {
  require_same(param, grad, "first_order_step");
  ++state.step;
  auto w = param.data();
  auto g = grad.data();
  const double eps = state.hyper.epsilon;
  switch (state.method) {
    case Method::sgd:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
      break;
    case Method::adagrad: {
      require_same(state.acc, grad, "adagrad accumulator");
      auto acc = state.acc.data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc[i] += g[i] * g[i];
        const double denom = std::sqrt(acc[i] + eps);
        if (denom > 0.0) w[i] -= lr * g[i] / denom;
      }
      break;
    }
    case Method::adam: {
      require_same(state.acc, grad, "adam moments");
      auto m = state.acc.data();
      auto v = state.acc2.data();
      const double b1 = state.hyper.beta1, b2 = state.hyper.beta2;
      const double t = static_cast<double>(state.step);
      const double c1 = 1.0 - std::pow(b1, t);
      const double c2 = 1.0 - std::pow(b2, t);
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
      }
      break;
    }
    case Method::shampoo:
      throw ContractError("first_order_step: shampoo state passed to first-order step");
  }
}

ShampooState shampoo_new(std::size_t rows, std::size_t cols, std::size_t update_interval,
                         double epsilon) {
  if (update_interval < 1) throw ContractError("shampoo: update_interval must be >= 1");
  if (!(epsilon >= 0.0)) throw ContractError("shampoo: epsilon must be >= 0");
  ShampooState s;
  s.left = Tensor::zeros(rows, rows);
  s.right = Tensor::zeros(cols, cols);
  s.update_interval = update_interval;
  s.epsilon = epsilon;
  return s;
}

void shampoo_accumulate(ShampooState& state, const Tensor& grad) {
  if (grad.rows() != state.left.rows() || grad.cols() != state.right.rows()) {
    throw DimensionError("shampoo_accumulate: gradient " + grad.shape_str() + " vs preconditioners " +
                         state.left.shape_str() + ", " + state.right.shape_str());
  }
  add_into(state.left, matmul_nt(grad, grad));
  add_into(state.right, matmul_tn(grad, grad));
  symmetrize(state.left);
  symmetrize(state.right);
  ++state.step;
}

Tensor shampoo_direction(ShampooState& state, const Tensor& grad) {
  if (grad.rows() != state.left.rows() || grad.cols() != state.right.rows()) {
    throw DimensionError("shampoo_step: gradient " + grad.shape_str() + " vs preconditioners " +
                         state.left.shape_str() + ", " + state.right.shape_str());
  }
  if (!state.roots_valid || state.step <= state.update_interval || state.step % state.update_interval == 0) {
    state.left_root = inv_pth_root(state.left, 4, state.epsilon);
    state.right_root = inv_pth_root(state.right, 4, state.epsilon);
    state.roots_valid = true;
  }
  return matmul(matmul(state.left_root, grad), state.right_root);
}

void shampoo_step(ShampooState& state, Tensor& param, const Tensor& grad, double lr) {
  require_same(param, grad, "shampoo_step");
  Tensor dir = shampoo_direction(state, grad);
  auto w = param.data();
  auto d = dir.data();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * d[i];
}

Optimizer::Optimizer(Method method, const OptimHyper& hyper, std::vector<PrecondGroup> groups)
    : method_(method), hyper_(hyper), groups_(std::move(groups)) {
  std::unordered_set<const Tensor*> seen;
  for (const auto& g : groups_) {
    for (const auto& slot : g.slots) {
      if (slot.param == nullptr) throw ContractError("optimizer: null parameter in group " + g.name);
      if (!seen.insert(slot.param).second) {
        throw ContractError("optimizer: parameter registered twice (group " + g.name + ")");
      }
      if (slot.row0 + slot.param->rows() > g.rows || slot.col0 + slot.param->cols() > g.cols) {
        throw DimensionError("optimizer: slot " + slot.param->shape_str() + " does not fit group " +
                             g.name);
      }
    }
    if (method_ == Method::shampoo) {
      shampoo_.push_back(shampoo_new(g.rows, g.cols, hyper_.update_interval, hyper_.shampoo_epsilon));
    } else {
      std::vector<FirstOrderState> states;
      for (const auto& slot : g.slots)
        states.push_back(first_order_new(method_, hyper_, slot.param->rows(), slot.param->cols()));
      first_order_.push_back(std::move(states));
    }
  }
}

void Optimizer::step(const GradLookup& grads) {
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const PrecondGroup& group = groups_[gi];
    if (method_ != Method::shampoo) {
      for (std::size_t si = 0; si < group.slots.size(); ++si) {
        const ParamSlot& slot = group.slots[si];
        if (slot.param->empty()) continue;
        const Tensor* g = grads(*slot.param);
        const Tensor zero = g ? Tensor{} : Tensor::zeros(slot.param->rows(), slot.param->cols());
        first_order_step(first_order_[gi][si], *slot.param, g ? *g : zero, hyper_.lr * slot.lr_scale);
      }
      continue;
    }
    if (group.rows == 0 || group.cols == 0) continue;
    Tensor joint(group.rows, group.cols);
    for (const auto& slot : group.slots)
      if (const Tensor* g = grads(*slot.param)) add_block_into(joint, *g, slot.row0, slot.col0);
    ShampooState& state = shampoo_[gi];
    shampoo_accumulate(state, joint);
    const Tensor dir = shampoo_direction(state, joint);
    for (const auto& slot : group.slots) {
      const double lr = hyper_.lr * slot.lr_scale;
      Tensor& w = *slot.param;
      for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) -= lr * dir(slot.row0 + i, slot.col0 + j);
    }
  }
}

PreconditionerReport preconditioner_report(const Tensor& acc, std::size_t split) {
  if (acc.rows() != acc.cols()) throw DimensionError("preconditioner_report: accumulator not square");
  const std::size_t n = acc.rows();
  if (split > n) {
    throw ContractError("preconditioner_report: split " + std::to_string(split) + " exceeds dimension " +
                        std::to_string(n));
  }
  PreconditionerReport r;
  r.correlation = Tensor::zeros(n, n);
  r.stats.split = split;
  r.stats.dim = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double denom = std::sqrt(acc(i, i) * acc(j, j));
      if (acc(i, i) <= 0.0 || acc(j, j) <= 0.0 || !(denom > 0.0)) {
        r.stats.zero_diagonal = true;
        continue;
      }
      r.correlation(i, j) = acc(i, j) / denom;
    }
  }
  double s_sum = 0.0, e_sum = 0.0, c_sum = 0.0;
  std::size_t s_n = 0, e_n = 0, c_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = std::abs(r.correlation(i, j));
      const bool i_student = i < split, j_student = j < split;
      if (i_student && j_student) {
        s_sum += v;
        ++s_n;
      } else if (!i_student && !j_student) {
        e_sum += v;
        ++e_n;
      } else {
        c_sum += v;
        ++c_n;
      }
    }
  }
  auto mean = [](double s, std::size_t k) { return k ? s / static_cast<double>(k) : 0.0; };
  r.stats.mean_abs_student = mean(s_sum, s_n);
  r.stats.mean_abs_extra = mean(e_sum, e_n);
  r.stats.mean_abs_within = mean(s_sum + e_sum, s_n + e_n);
  r.stats.mean_abs_cross = mean(c_sum, c_n);
  r.stats.within_cross_ratio = r.stats.mean_abs_cross > 0.0
                                   ? r.stats.mean_abs_within / r.stats.mean_abs_cross
                                   : std::numeric_limits<double>::infinity();
  return r;
}

std::string heatmap_pgm(const Tensor& c) {
  std::ostringstream os;
  os << "P2\n" << c.cols() << " " << c.rows() << "\n255\n";
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const double v = std::min(1.0, std::abs(c(i, j)));
      os << (j ? " " : "") << static_cast<int>(std::lround(255.0 * v));
    }
    os << "\n";
  }
  return os.str();
}

std::string matrix_csv(const Tensor& m) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? "," : "", m(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace matta
