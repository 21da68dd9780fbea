#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace pleg {

constexpr int kMaxDims = 3;

/// Fixed-capacity dense types: at most kMaxDims spatial directions plus one
/// for the t/s direction, so nothing here touches the heap.
template <typename Scalar>
using PointN = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDims, 1>;
template <typename Scalar>
using MatrixN =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDims, kMaxDims>;
template <typename Scalar>
using BorderedMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0,
                                     kMaxDims + 1, kMaxDims + 1>;
template <typename Scalar>
using BorderedVector =
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDims + 1, 1>;

using Point = PointN<double>;
using Matrix = MatrixN<double>;

/// Smallest eigenvalue of a symmetric matrix. Closed forms for n <= 2.
template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) {
    const Scalar mean = (m(0, 0) + m(1, 1)) / 2;
    const Scalar half_gap = (m(0, 0) - m(1, 1)) / 2;
    return mean - std::hypot(half_gap, m(0, 1));
  }
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// Symmetric eigendecomposition with a deterministic basis: eigenvalues
/// ascending, each eigenvector's first non-negligible component positive.
template <typename Scalar>
struct SortedEigen {
  PointN<Scalar> values;
  MatrixN<Scalar> vectors;  // columns
};

template <typename Derived>
SortedEigen<typename Derived::Scalar> sorted_eigen(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatrixN<Scalar>> solver(m.eval());
  SortedEigen<Scalar> out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      const Scalar v = out.vectors(r, c);
      if (std::abs(v) > Scalar(1e-10)) {
        if (v < 0) out.vectors.col(c) = -out.vectors.col(c);
        break;
      }
    }
  }
  return out;
}

/// k-th elementary symmetric function of the eigenvalues, as the sum of the
/// principal k x k minors. sigma_0 = 1.
template <typename Derived>
typename Derived::Scalar elementary_symmetric(
    const Eigen::MatrixBase<Derived>& m, int k) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(m.rows());
  if (k == 0) return Scalar(1);
  if (k < 0 || k > n) return Scalar(0);
  Scalar sum(0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    BorderedMatrix<Scalar> sub(k, k);
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      int c = 0;
      for (int j = 0; j < n; ++j) {
        if (!(mask & (1u << j))) continue;
        sub(r, c++) = m(i, j);
      }
      ++r;
    }
    sum += sub.determinant();
  }
  return sum;
}

}  // namespace pleg
