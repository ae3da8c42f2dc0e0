#ifndef HPLAB_LINALG_HPP
#define HPLAB_LINALG_HPP

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "hplab/core.hpp"

namespace hplab {

/// max |(U*U - I)_{ij}|
inline double unitarity_defect(const ComplexMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

/// Top-left n x n block of U.
inline ComplexMatrix truncate(const ComplexMatrix& u, int n) {
  require(u.rows() == u.cols(), "truncate: matrix must be square");
  require(n >= 1 && n < u.rows(), "truncate: need 1 <= n < dim(U)");
  return u.topLeftCorner(n, n);
}

/// All eigenvalues of a general complex matrix, with algebraic multiplicity.
///
/// Hessenberg reduction followed by shifted complex QR (Eigen's complex
/// Schur), capped at 30 sweeps per row. Non-convergence throws.
inline PointConfiguration eigenvalues(const ComplexMatrix& a) {
  require(a.rows() == a.cols() && a.rows() >= 1, "eigenvalues: need a non-empty square matrix");
  require(all_finite(a), "eigenvalues: non-finite entries");
  PointConfiguration out;
  if (a.rows() == 1) {
    out.points.push_back(a(0, 0));
    return out;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver;
  solver.setMaxIterations(30 * a.rows());
  solver.compute(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalues: QR iteration did not converge within 30*dim sweeps");
  const auto& ev = solver.eigenvalues();
  out.points.assign(ev.data(), ev.data() + ev.size());
  return out;
}

inline double smallest_singular_value(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double largest_singular_value(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Determinant by LU with partial pivoting.
inline Complex determinant(const ComplexMatrix& a) {
  require(a.rows() == a.cols(), "determinant: matrix must be square");
  if (a.rows() == 0) return {1.0, 0.0};
  return Eigen::PartialPivLU<ComplexMatrix>(a).determinant();
}

}  // namespace hplab

#endif  // HPLAB_LINALG_HPP
