#pragma once

#include <cstddef>
#include <vector>

#include "matta/tensor.hpp"

namespace matta {

struct SymmetricEigen {
  std::vector<double> values;
  Tensor vectors;  // columns are eigenvectors
  int sweeps = 0;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Throws
// NumericalError if the off-diagonal mass has not vanished after
// `max_sweeps` sweeps.
SymmetricEigen symmetric_eigen(const Tensor& a, int max_sweeps = 100);

// (a + eps·I)^(-1/p) for symmetric positive semidefinite `a`. Eigenvalues
// with λ + eps <= 0 map to 0 (pseudo-inverse). Asymmetry above
// 1e-9·max(1, max|a|) is a ContractError.
Tensor inv_pth_root(const Tensor& a, int p, double epsilon);

double max_asymmetry(const Tensor& a);
void symmetrize(Tensor& a);

}  // namespace matta
