#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace isospec {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Ascending eigenvalues of a real symmetric matrix (LAPACK dsyevd).
std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& a);

/// Largest |i - j| over the nonzeros.
std::size_t bandwidth(const SparseMatrix& a);

/// Ascending eigenvalues of a sparse symmetric matrix: tridiagonal (dstev)
/// or banded (dsbev) storage when the bandwidth is small, dense otherwise.
/// Throws ResourceError above `cap` rows.
std::vector<double> symmetric_eigenvalues(const SparseMatrix& a, std::size_t cap = 4000);

struct ExtremalEigen {
  double value = 0;
  double residual = 0;  // ||A y - value y|| / value for the unit Ritz vector y
  int iterations = 0;
};

/// Smallest eigenvalue of a symmetric positive definite sparse matrix by
/// Lanczos on A^{-1} (sparse LDL^T) with full reorthogonalization. Throws
/// ConvergenceError carrying the residual when `rel_tol` is not reached.
ExtremalEigen smallest_eigenvalue(const SparseMatrix& a, double rel_tol = 1e-10,
                                  int max_iterations = 300);

}  // namespace isospec
