#include <doctest.h>

#include <cmath>

#include "matta/errors.hpp"
#include "matta/losses.hpp"
#include "oracles.hpp"

using namespace matta;

TEST_CASE("soft cross-entropy examples") {
  CHECK(soft_cross_entropy(Tensor{{10, -10}}, Tensor{{1, 0}}) <= 1e-4);
  CHECK(soft_cross_entropy(Tensor{{0.3, 0.3}}, Tensor{{0.5, 0.5}}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor logits = oracle::random(5, 4, rng, 2.0);
    const Tensor y = softmax_rows(oracle::random(5, 4, rng));
    CHECK(soft_cross_entropy(logits, y) == doctest::Approx(oracle::naive_cross_entropy(logits, y)).epsilon(1e-12));
  }
}

TEST_CASE("soft cross-entropy validates targets") {
  CHECK_THROWS_AS(soft_cross_entropy(Tensor{{0, 0}}, Tensor{{1.5, -0.5}}), ContractError);
  CHECK_THROWS_AS(soft_cross_entropy(Tensor{{0, 0}}, Tensor{{0.5, 0.4}}), ContractError);
  CHECK_THROWS_AS(soft_cross_entropy(Tensor{{0, 0}}, Tensor{{1, 0, 0}}), DimensionError);
}

TEST_CASE("distillation loss examples") {
  CHECK(distill_loss(Tensor{{1, 1, 1}}, Tensor{{1, 1, 1}}) == doctest::Approx(std::log(3.0)).epsilon(1e-15));

  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor s = oracle::random(4, 3, rng, 2.0), ta = oracle::random(4, 3, rng, 2.0);
    const Tensor p_ta = softmax_rows(ta);
    const double ld = distill_loss(s, ta);
    CHECK(ld == doctest::Approx(soft_cross_entropy(s, p_ta)).epsilon(1e-12));
    // Gibbs: cross-entropy is at least the TA entropy, equal when s == ta.
    const double entropy = soft_cross_entropy(ta, p_ta);
    CHECK(ld >= entropy - 1e-12);
    CHECK(distill_loss(ta, ta) == doctest::Approx(entropy).epsilon(1e-12));
  }
}

TEST_CASE("distillation gradient never reaches the TA logits") {
  Rng rng(29);
  Graph g;
  Var s = g.leaf(oracle::random(3, 4, rng));
  Var ta = g.leaf(oracle::random(3, 4, rng));
  g.backward(distill_loss(s, ta));
  CHECK(g.grad_or_zero(ta) == Tensor::zeros(3, 4));
  REQUIRE(g.grad(s) != nullptr);
  CHECK(frobenius_norm(*g.grad(s)) > 0.0);
}

TEST_CASE("composite loss weighting") {
  CHECK(composite_loss(LossWeights{1, 0, 0}, 2.0, 4.0, 1.0) == 2.0);
  CHECK(composite_loss(LossWeights{0, 0, 1}, 2.0, 4.0, 1.0) == 1.0);
  CHECK(composite_loss(LossWeights{0.5, 0.5, 0.2}, 2.0, 4.0, 1.0) == doctest::Approx(3.2).epsilon(1e-15));

  Rng rng(31);
  const LossWeights w{0.3, 1.7, 0.9};
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3), c = rng.uniform(0, 3), k = rng.uniform(0, 3);
    CHECK(composite_loss(w, a + k, b, c) - composite_loss(w, a, b, c) == doctest::Approx(w.w_s * k));
    CHECK(composite_loss(w, a, b + k, c) - composite_loss(w, a, b, c) == doctest::Approx(w.w_ta * k));
    CHECK(composite_loss(w, a, b, c + k) - composite_loss(w, a, b, c) == doctest::Approx(w.w_d * k));
  }
  CHECK_THROWS_AS(validate(LossWeights{0, 0, 0}), ContractError);
  CHECK_THROWS_AS(validate(LossWeights{-1, 1, 1}), ContractError);
}

TEST_CASE("curriculum ramp") {
  const Curriculum c{100, 200};
  CHECK(curriculum_weight(0, c, 0.5) == 0.0);
  CHECK(curriculum_weight(99, c, 0.5) == 0.0);
  CHECK(curriculum_weight(150, c, 0.5) == 0.25);
  CHECK(curriculum_weight(200, c, 0.5) == 0.5);
  CHECK(curriculum_weight(5000, c, 0.5) == 0.5);
  double prev = 0.0;
  for (std::size_t t = 0; t < 300; ++t) {
    const double w = curriculum_weight(t, c, 0.5);
    CHECK(w >= prev);
    prev = w;
  }
  CHECK(curriculum_weight(0, Curriculum{}, 0.7) == 0.7);
  CHECK_THROWS_AS(curriculum_weight(0, Curriculum{5, 4}, 1.0), ContractError);
}
