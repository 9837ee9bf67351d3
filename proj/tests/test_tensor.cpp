#include <doctest.h>

#include <cmath>
#include <limits>

#include "matta/errors.hpp"
#include "matta/rng.hpp"
#include "matta/tensor.hpp"
#include "oracles.hpp"

using namespace matta;

TEST_CASE("tensor construction rejects bad data") {
  CHECK_THROWS_AS(Tensor(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor(1, 2, std::vector<double>{1, std::nan("")}), NumericalError);
  CHECK_THROWS_AS(Tensor(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}), NumericalError);
  Tensor empty(0, 5);
  CHECK(empty.size() == 0);
  CHECK(empty.empty());
}

TEST_CASE("matmul hand cases") {
  const Tensor a{{1, 2}, {3, 4}};
  CHECK(matmul(a, Tensor::identity(2)) == a);
  CHECK(matmul(Tensor{{1, 2}}, Tensor{{3}, {4}}) == Tensor{{11}});
  CHECK_THROWS_AS(matmul(a, Tensor(3, 1)), DimensionError);
}

TEST_CASE("matmul variants agree with the naive oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(9), k = rng.below(9), m = 1 + rng.below(9);
    const Tensor a = oracle::random(n, k, rng), b = oracle::random(k, m, rng);
    const Tensor ref = oracle::naive_matmul(a, b);
    CHECK(matmul(a, b) == ref);
    CHECK(max_abs_diff(matmul_tn(transpose(a), b), ref) <= 1e-12);
    CHECK(max_abs_diff(matmul_nt(a, transpose(b)), ref) <= 1e-12);
  }
}

TEST_CASE("empty operands flow through matmul") {
  const Tensor a(3, 0), b(0, 4);
  const Tensor c = matmul(a, b);
  CHECK(c.rows() == 3);
  CHECK(c.cols() == 4);
  CHECK(c == Tensor::zeros(3, 4));
}

TEST_CASE("elementwise ops") {
  const Tensor x{{1, 2}};
  CHECK(add(x, Tensor::zeros(1, 2)) == x);
  CHECK(add(x, Tensor{{3, 4}}) == Tensor{{4, 6}});
  CHECK(hadamard(x, Tensor{{3, 4}}) == Tensor{{3, 8}});
  CHECK(scale(x, -2.0) == Tensor{{-2, -4}});
  CHECK_THROWS_AS(add(x, Tensor(2, 1)), DimensionError);
}

TEST_CASE("slice and concat round trip bitwise") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t cols = 1 + rng.below(8);
    const Tensor x = oracle::random(1 + rng.below(4), cols, rng);
    for (std::size_t m = 0; m <= cols; ++m) {
      CHECK(concat_cols(slice_cols(x, 0, m), slice_cols(x, m, cols - m)) == x);
    }
  }
}

TEST_CASE("activation values") {
  CHECK(activation(Tensor{{0}}, Activation::tanh) == Tensor{{0}});
  CHECK(activation(Tensor{{-1, 2}}, Activation::relu) == Tensor{{0, 2}});
  CHECK(activation(Tensor{{0.7}}, Activation::gelu_tanh).item() == doctest::Approx(oracle::gelu_tanh(0.7)).epsilon(1e-15));
  CHECK(parse_activation("gelu_tanh") == Activation::gelu_tanh);
  CHECK_THROWS_AS(parse_activation("swish"), ContractError);
}

TEST_CASE("activation derivatives match finite differences") {
  for (Activation kind : {Activation::tanh, Activation::gelu_tanh, Activation::relu}) {
    for (double x : {-1.3, -0.4, 0.05, 0.7, 2.1}) {
      const double h = 1e-6;
      const double numeric =
          (activation(Tensor{{x + h}}, kind).item() - activation(Tensor{{x - h}}, kind).item()) / (2 * h);
      const double analytic = activation_derivative(Tensor{{x}}, kind).item();
      CHECK(oracle::relative_error(analytic, numeric) <= 1e-7);
    }
  }
}

TEST_CASE("log_softmax is stable and shift invariant") {
  const Tensor z = log_softmax_rows(Tensor{{0, 0}});
  CHECK(z(0, 0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  const Tensor big = log_softmax_rows(Tensor{{1000, 0}});
  CHECK(std::abs(big(0, 0)) < 1e-300);
  CHECK(big(0, 1) == doctest::Approx(-1000.0));

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = oracle::random(3, 5, rng, 3.0);
    const double c = rng.normal(0.0, 10.0);
    Tensor shifted = x;
    for (auto& v : shifted.data()) v += c;
    CHECK(max_abs_diff(log_softmax_rows(x), log_softmax_rows(shifted)) <= 1e-12);
    const Tensor p = softmax_rows(x);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p.cols(); ++j) s += p(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}
