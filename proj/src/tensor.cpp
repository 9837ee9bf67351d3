#include "matta/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "matta/errors.hpp"

namespace matta {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
}

constexpr double kGeluScale = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluCubic = 0.044715;

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "gelu_tanh") return Activation::gelu_tanh;
  if (name == "relu") return Activation::relu;
  throw ContractError("unknown activation '" + name + "'");
}

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::tanh: return "tanh";
    case Activation::gelu_tanh: return "gelu_tanh";
    case Activation::relu: return "relu";
  }
  return "?";
}

Tensor::Tensor(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
  }
  check_finite("tensor construction");
}

Tensor::Tensor(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged tensor literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite("tensor construction");
}

Tensor Tensor::filled(std::size_t rows, std::size_t cols, double value) {
  Tensor t(rows, cols);
  std::fill(t.data_.begin(), t.data_.end(), value);
  t.check_finite("tensor construction");
  return t;
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor Tensor::randn(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Tensor t(rows, cols);
  for (auto& v : t.data_) v = rng.normal(0.0, stddev);
  return t;
}

std::string Tensor::shape_str() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

double Tensor::item() const {
  if (rows_ != 1 || cols_ != 1) throw ContractError("item() on non-scalar tensor " + shape_str());
  return data_[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::check_finite(const char* what) const {
  if (!all_finite()) throw NumericalError(std::string(what) + ": non-finite value in " + shape_str());
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: shape mismatch " + a.shape_str() + " x " + b.shape_str());
  }
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
  Tensor c(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = pc + i * m;
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double aik = pa[i * k_dim + k];
      const double* brow = pb + k * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: shape mismatch " + a.shape_str() + "^T x " + b.shape_str());
  }
  const std::size_t batch = a.rows(), n = a.cols(), m = b.cols();
  Tensor c(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t r = 0; r < batch; ++r) {
    const double* brow = pb + r * m;
    for (std::size_t i = 0; i < n; ++i) {
      const double ari = pa[r * n + i];
      double* crow = pc + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += ari * brow[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: shape mismatch " + a.shape_str() + " x " + b.shape_str() + "^T");
  }
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.rows();
  Tensor c(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = pa + i * k_dim;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = pb + j * k_dim;
      double acc = 0.0;
      for (std::size_t k = 0; k < k_dim; ++k) acc += arow[k] * brow[k];
      pc[i * m + j] = acc;
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
  return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] *= bd[i];
  return c;
}

Tensor scale(const Tensor& a, double s) {
  Tensor c = a;
  for (auto& v : c.data()) v *= s;
  return c;
}

void add_into(Tensor& dst, const Tensor& src) {
  require_same_shape(dst, src, "add_into");
  auto dd = dst.data();
  auto sd = src.data();
  for (std::size_t i = 0; i < dd.size(); ++i) dd[i] += sd[i];
}

void add_block_into(Tensor& dst, const Tensor& src, std::size_t row0, std::size_t col0) {
  if (row0 + src.rows() > dst.rows() || col0 + src.cols() > dst.cols()) {
    throw DimensionError("add_block_into: block " + src.shape_str() + " at (" +
                         std::to_string(row0) + "," + std::to_string(col0) + ") exceeds " +
                         dst.shape_str());
  }
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) dst(row0 + i, col0 + j) += src(i, j);
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
  if (begin + count > x.cols()) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " + x.shape_str());
  }
  Tensor out(x.rows(), count);
  for (std::size_t i = 0; i < x.rows(); ++i)
    std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(i * x.cols() + begin), count,
                out.data().begin() + static_cast<std::ptrdiff_t>(i * count));
  return out;
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count) {
  if (begin + count > x.rows()) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " + x.shape_str());
  }
  const auto first = x.values().begin() + static_cast<std::ptrdiff_t>(begin * x.cols());
  return Tensor(count, x.cols(),
                std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * x.cols())));
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  const std::size_t n = a.cols() + b.cols();
  Tensor out(a.rows(), n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("concat_rows: column mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  std::vector<double> data(a.values());
  data.insert(data.end(), b.values().begin(), b.values().end());
  return Tensor(a.rows() + b.rows(), a.cols(), std::move(data));
}

Tensor activation(const Tensor& x, Activation kind) {
  Tensor y = x;
  for (auto& v : y.data()) {
    switch (kind) {
      case Activation::tanh: v = std::tanh(v); break;
      case Activation::relu: v = v > 0.0 ? v : 0.0; break;
      case Activation::gelu_tanh:
        v = 0.5 * v * (1.0 + std::tanh(kGeluScale * (v + kGeluCubic * v * v * v)));
        break;
    }
  }
  return y;
}

Tensor activation_derivative(const Tensor& x, Activation kind) {
  Tensor d = x;
  for (auto& v : d.data()) {
    switch (kind) {
      case Activation::tanh: {
        const double t = std::tanh(v);
        v = 1.0 - t * t;
        break;
      }
      case Activation::relu: v = v > 0.0 ? 1.0 : 0.0; break;
      case Activation::gelu_tanh: {
        const double t = std::tanh(kGeluScale * (v + kGeluCubic * v * v * v));
        const double du = kGeluScale * (1.0 + 3.0 * kGeluCubic * v * v);
        v = 0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * du;
        break;
      }
    }
  }
  return d;
}

Tensor log_softmax_rows(const Tensor& x) {
  if (x.cols() == 0 && x.rows() > 0) throw ContractError("log_softmax_rows: needs at least one column");
  Tensor y = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mx = x(i, 0);
    for (std::size_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x(i, j));
    double total = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) total += std::exp(x(i, j) - mx);
    const double log_total = std::log(total);
    for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) = x(i, j) - mx - log_total;
  }
  return y;
}

Tensor softmax_rows(const Tensor& x) { return exp(log_softmax_rows(x)); }

Tensor exp(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data()) v = std::exp(v);
  return y;
}

double sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return s;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace matta
