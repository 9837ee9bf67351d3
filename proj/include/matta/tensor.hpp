#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "matta/rng.hpp"

namespace matta {

enum class Activation { tanh, gelu_tanh, relu };

Activation parse_activation(const std::string& name);
std::string to_string(Activation kind);

/// Dense row-major 2-D array of doubles.
///
/// Zero-row and zero-column tensors are valid values and flow through every
/// kernel as no-ops. Construction from caller data rejects NaN/Inf.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols);  // zero-filled
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);
  Tensor(std::initializer_list<std::initializer_list<double>> rows);

  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor(rows, cols); }
  static Tensor filled(std::size_t rows, std::size_t cols, double value);
  static Tensor identity(std::size_t n);
  static Tensor scalar(double value) { return filled(1, 1, value); }
  static Tensor randn(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_str() const;

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double item() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const;
  // Throws NumericalError naming `what` if any entry is NaN/Inf.
  void check_finite(const char* what) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Plain-value kernels. Each output element of matmul is accumulated over the
// inner index in ascending order starting from 0.0; callers that need
// bitwise-reproducible results rely on this.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // aᵀ·b
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a·bᵀ
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
void add_into(Tensor& dst, const Tensor& src);
void add_block_into(Tensor& dst, const Tensor& src, std::size_t row0, std::size_t col0);

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const Tensor& a, const Tensor& b);

Tensor activation(const Tensor& x, Activation kind);
// d act / dx evaluated at the pre-activation x.
Tensor activation_derivative(const Tensor& x, Activation kind);
Tensor log_softmax_rows(const Tensor& x);
Tensor softmax_rows(const Tensor& x);
Tensor exp(const Tensor& x);
double sum(const Tensor& x);

double max_abs_diff(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& a);

}  // namespace matta
