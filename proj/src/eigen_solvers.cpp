#include "isospec/eigen_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include "isospec/errors.hpp"

namespace isospec {

std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw PreconditionError("eigenvalues: matrix not square");
  std::vector<double> w(n);
  if (n == 0) return w;
  Eigen::MatrixXd m = a;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, w.data());
  if (info != 0) throw ConvergenceError("dsyevd failed", static_cast<double>(info));
  return w;
}

std::size_t bandwidth(const SparseMatrix& a) {
  std::size_t kd = 0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      kd = std::max<std::size_t>(kd, std::abs(static_cast<long>(it.row()) - it.col()));
    }
  }
  return kd;
}

std::vector<double> symmetric_eigenvalues(const SparseMatrix& a, std::size_t cap) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (n > cap) {
    throw ResourceError("dense eigensolver cap " + std::to_string(cap) + " exceeded by " +
                        std::to_string(n) + " rows",
                        cap);
  }
  if (n == 0) return {};
  const std::size_t kd = bandwidth(a);
  if (kd <= 1) {
    std::vector<double> d(n), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = a.coeff(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a.coeff(i + 1, i);
    lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n), d.data(),
                                    e.data(), nullptr, 1);
    if (info != 0) throw ConvergenceError("dstev failed", static_cast<double>(info));
    return d;
  }
  if (kd * 8 < n) {
    // lower band storage: ab[(i - j) + j * ldab] = a(i, j)
    const std::size_t ldab = kd + 1;
    std::vector<double> ab(ldab * n, 0.0), w(n);
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
        if (it.row() >= it.col()) ab[(it.row() - it.col()) + it.col() * ldab] = it.value();
      }
    }
    lapack_int info =
        LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n),
                      static_cast<lapack_int>(kd), ab.data(), static_cast<lapack_int>(ldab),
                      w.data(), nullptr, 1);
    if (info != 0) throw ConvergenceError("dsbev failed", static_cast<double>(info));
    return w;
  }
  return dense_eigenvalues(Eigen::MatrixXd(a));
}

ExtremalEigen smallest_eigenvalue(const SparseMatrix& a, double rel_tol, int max_iterations) {
  const Eigen::Index n = a.rows();
  if (n == 0) throw PreconditionError("smallest eigenvalue: empty matrix");
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw ConvergenceError("smallest eigenvalue: factorization failed", NAN);
  }
  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, max_iterations));
  Eigen::MatrixXd V(n, m_max + 1);
  // deterministic, non-degenerate start vector
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  v.normalize();
  V.col(0) = v;
  std::vector<double> alpha, beta;
  ExtremalEigen out;
  double last_res = INFINITY;
  for (int j = 0; j < m_max; ++j) {
    Eigen::VectorXd w = ldlt.solve(V.col(j));
    double aj = V.col(j).dot(w);
    alpha.push_back(aj);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd c = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * c;
    }
    double bj = w.norm();
    // Ritz values of the tridiagonal T_j
    const int k = j + 1;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = es.eigenvalues()[k - 1];
    const double s_last = es.eigenvectors()(k - 1, k - 1);
    const double res = std::abs(bj * s_last) / theta;
    last_res = res;
    if (res <= rel_tol || bj <= 1e-300 || k == n) {
      Eigen::VectorXd y = V.leftCols(k) * es.eigenvectors().col(k - 1);
      y.normalize();
      out.value = 1.0 / theta;
      out.residual = (a * y - out.value * y).norm() / out.value;
      out.iterations = k;
      return out;
    }
    beta.push_back(bj);
    V.col(j + 1) = w / bj;
  }
  throw ConvergenceError("smallest eigenvalue: Lanczos did not converge", last_res);
}

}  // namespace isospec
