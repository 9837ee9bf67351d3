#include "matta/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "matta/errors.hpp"

namespace matta {
namespace {

double off_diagonal_sq(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

double max_asymmetry(const Tensor& a) {
  if (a.rows() != a.cols()) throw DimensionError("max_asymmetry: matrix is not square " + a.shape_str());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

void symmetrize(Tensor& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

SymmetricEigen symmetric_eigen(const Tensor& input, int max_sweeps) {
  if (input.rows() != input.cols()) {
    throw DimensionError("symmetric_eigen: matrix is not square " + input.shape_str());
  }
  const std::size_t n = input.rows();
  Tensor a = input;
  symmetrize(a);
  Tensor vt = Tensor::identity(n);
  double* A = a.data().data();
  double* VT = vt.data().data();

  const double total_sq = [&] {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return s;
  }();
  // Converged once the off-diagonal Frobenius mass is at rounding level.
  const double tol_sq = total_sq * 1e-32;

  SymmetricEigen out;
  for (int sweep = 0;; ++sweep) {
    const double off = off_diagonal_sq(a);
    if (off == 0.0 || off <= tol_sq) {
      out.sweeps = sweep;
      break;
    }
    if (sweep >= max_sweeps) {
      throw NumericalError("symmetric_eigen: Jacobi did not converge in " +
                           std::to_string(max_sweeps) + " sweeps (off-diagonal " +
                           std::to_string(std::sqrt(off)) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A[p * n + q];
        if (apq == 0.0) continue;
        const double app = A[p * n + p], aqq = A[q * n + q];
        // Negligible relative to both diagonals: annihilate without rotating.
        if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
          A[p * n + q] = 0.0;
          A[q * n + p] = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        double* rp = A + p * n;
        double* rq = A + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rp[k], akq = rq[k];
          const double np = c * akp - s * akq, nq = s * akp + c * akq;
          rp[k] = np;
          A[k * n + p] = np;
          rq[k] = nq;
          A[k * n + q] = nq;
        }
        rp[p] = app - t * apq;
        rq[q] = aqq + t * apq;
        rp[q] = 0.0;
        rq[p] = 0.0;
        // Rows of vt are eigenvectors, so both updates run over contiguous memory.
        double* vp = VT + p * n;
        double* vq = VT + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vp[k], vkq = vq[k];
          vp[k] = c * vkp - s * vkq;
          vq[k] = s * vkp + c * vkq;
        }
      }
    }
  }
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = transpose(vt);
  return out;
}

Tensor inv_pth_root(const Tensor& a, int p, double epsilon) {
  if (a.rows() != a.cols()) throw DimensionError("inv_pth_root: matrix is not square " + a.shape_str());
  if (p < 1) throw ContractError("inv_pth_root: exponent p must be >= 1");
  if (!(epsilon >= 0.0)) throw ContractError("inv_pth_root: epsilon must be >= 0");
  double scale_ref = 1.0;
  for (double x : a.data()) scale_ref = std::max(scale_ref, std::abs(x));
  const double asym = max_asymmetry(a);
  if (asym > 1e-9 * scale_ref) {
    throw ContractError("inv_pth_root: input asymmetric by " + std::to_string(asym));
  }
  const std::size_t n = a.rows();
  if (n == 0) return Tensor(0, 0);

  SymmetricEigen eig = symmetric_eigen(a);
  const double exponent = -1.0 / static_cast<double>(p);
  Tensor scaled = eig.vectors;  // Q·diag(f(λ))
  for (std::size_t j = 0; j < n; ++j) {
    const double shifted = eig.values[j] + epsilon;
    const double f = shifted > 0.0 ? std::pow(shifted, exponent) : 0.0;
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= f;
  }
  Tensor root = matmul_nt(scaled, eig.vectors);
  symmetrize(root);
  root.check_finite("inv_pth_root");
  return root;
}

}  // namespace matta
