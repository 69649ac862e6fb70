#pragma once

// Hot loops in two interchangeable flavours. `serial` is the reference;
// `omp` must produce bit-identical results for any thread count, so every
// reduction follows a fixed tree that does not depend on the partition.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace isospec::kernels {

/// Sparse gather: out[i] = sum_k w[k] * in[source[i*K + k]], skipping -1.
struct Stencil {
  std::size_t targets = 0;
  std::size_t width = 0;  // K
  std::vector<std::int64_t> source;
};

/// Dense d-dimensional lattice stored row-major with side 2R+1 per axis;
/// coordinate x maps to sum_j (x_j + R) * stride_j.
struct Lattice {
  int dim = 1;
  std::int64_t radius = 0;
  std::vector<std::int64_t> stride;
  std::size_t cells() const;
  std::int64_t offset(std::span<const std::int64_t> x) const;
};
Lattice make_lattice(int dim, std::int64_t radius);

/// One convolution step restricted to the cube of half-width `active`:
/// out[x] = sum_k w[k] * in[x - shift[k]].
struct LatticeStep {
  const Lattice* lattice = nullptr;
  std::int64_t active = 0;
  std::vector<std::vector<std::int64_t>> shifts;
};

/// Heisenberg central-Fourier sweep input. Steps are (alpha, beta, gamma)
/// with weights; the twisted walk on (a, b) runs `steps` times per node.
struct TwistedWalk {
  std::vector<std::array<std::int64_t, 3>> moves;
  std::vector<double> weights;
  int steps = 0;
  std::int64_t reach = 1;  // max |alpha|, |beta| over moves
};

/// Per-node output: norm[s] = sum |psi_s|^2 and cross[s] = Re sum conj(psi_s) psi_{s+1}.
struct TwistedSeries {
  std::vector<double> norm;
  std::vector<double> cross;
};

/// Graded Gauss-Legendre rule on [0, pi] refined towards both end points.
struct ThetaRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
ThetaRule graded_theta_rule(int levels, int per_panel);

/// Real symmetric tridiagonal blocks sharing one off-diagonal, as
/// produced by the lamp-character decomposition of lamplighter boxes.
struct BlockFamily {
  std::size_t block_size = 0;
  std::vector<std::vector<double>> diagonals;
  std::vector<double> off_diagonal;
  std::vector<std::size_t> multiplicity;
};

namespace serial {
double pairwise_sum(std::span<const double> x);
void gather(const Stencil& st, std::span<const double> w, std::span<const double> in,
            std::span<double> out);
void gather(const Stencil& st, std::span<const mpz_class> w, std::span<const mpz_class> in,
            std::span<mpz_class> out);
void lattice_step(const LatticeStep& step, std::span<const double> w,
                  std::span<const double> in, std::span<double> out);
void lattice_step(const LatticeStep& step, std::span<const mpz_class> w,
                  std::span<const mpz_class> in, std::span<mpz_class> out);
TwistedSeries twisted_walk(const TwistedWalk& walk, double theta);
/// sum_j weight_j * series(theta_j), accumulated in node order.
TwistedSeries twisted_integral(const TwistedWalk& walk, const ThetaRule& rule);
/// Eigenvalues of every block, ascending within each block.
std::vector<std::vector<double>> block_spectra(const BlockFamily& f);
}  // namespace serial

namespace omp {
double pairwise_sum(std::span<const double> x);
void gather(const Stencil& st, std::span<const double> w, std::span<const double> in,
            std::span<double> out);
void gather(const Stencil& st, std::span<const mpz_class> w, std::span<const mpz_class> in,
            std::span<mpz_class> out);
void lattice_step(const LatticeStep& step, std::span<const double> w,
                  std::span<const double> in, std::span<double> out);
void lattice_step(const LatticeStep& step, std::span<const mpz_class> w,
                  std::span<const mpz_class> in, std::span<mpz_class> out);
TwistedSeries twisted_integral(const TwistedWalk& walk, const ThetaRule& rule);
std::vector<std::vector<double>> block_spectra(const BlockFamily& f);
}  // namespace omp

/// Symmetric tridiagonal eigenvalues (LAPACK dstev), ascending.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> off);

}  // namespace isospec::kernels
