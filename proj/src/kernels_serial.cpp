#include <boost/math/special_functions/legendre.hpp>
#include <lapacke.h>

#include "isospec/errors.hpp"
#include "kernels_impl.hpp"

namespace isospec::kernels {

std::size_t Lattice::cells() const {
  std::size_t n = 1;
  for (int j = 0; j < dim; ++j) n *= static_cast<std::size_t>(2 * radius + 1);
  return n;
}

std::int64_t Lattice::offset(std::span<const std::int64_t> x) const {
  std::int64_t o = 0;
  for (int j = 0; j < dim; ++j) o += (x[j] + radius) * stride[j];
  return o;
}

Lattice make_lattice(int dim, std::int64_t radius) {
  Lattice L;
  L.dim = dim;
  L.radius = radius;
  L.stride.assign(dim, 1);
  for (int j = dim - 2; j >= 0; --j) L.stride[j] = L.stride[j + 1] * (2 * radius + 1);
  return L;
}

ThetaRule graded_theta_rule(int levels, int per_panel) {
  if (levels < 1 || per_panel < 1) throw PreconditionError("theta rule: bad sizes");
  // Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n
  std::vector<double> x(per_panel), w(per_panel);
  const int n = per_panel;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p = boost::math::legendre_p(n, z);
      double dp = boost::math::legendre_p_prime(n, z);
      double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double dp = boost::math::legendre_p_prime(n, z);
    x[i] = z;
    w[i] = 2.0 / ((1 - z * z) * dp * dp);
  }
  // panel edges 0, pi/2^levels, ..., pi/2, then mirrored towards pi
  std::vector<double> edges{0.0};
  for (int k = levels; k >= 1; --k) edges.push_back(M_PI / std::ldexp(1.0, k));
  std::size_t half = edges.size();
  for (std::size_t i = half - 1; i-- > 0;) edges.push_back(M_PI - edges[i]);
  ThetaRule r;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double a = edges[p], b = edges[p + 1];
    for (int i = n - 1; i >= 0; --i) {
      r.nodes.push_back((b - a) / 2 * x[i] + (a + b) / 2);
      r.weights.push_back((b - a) / 2 * w[i]);
    }
  }
  return r;
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> off) {
  std::vector<double> d(diag.begin(), diag.end()), e(off.begin(), off.end());
  if (d.empty()) return d;
  e.resize(d.size());
  lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(d.size()),
                                  d.data(), e.data(), nullptr, 1);
  if (info != 0) throw ConvergenceError("dstev failed", static_cast<double>(info));
  return d;
}

namespace serial {

double pairwise_sum(std::span<const double> x) {
  std::vector<double> blocks;
  for (std::size_t i = 0; i < x.size(); i += detail::kSumBlock) {
    blocks.push_back(detail::pairwise_block(x.data() + i, std::min(detail::kSumBlock, x.size() - i)));
  }
  return detail::pairwise_block(blocks.data(), blocks.size());
}

void gather(const Stencil& st, std::span<const double> w, std::span<const double> in,
            std::span<double> out) {
  detail::gather_range(st, w, in, out, 0, st.targets);
}

void gather(const Stencil& st, std::span<const mpz_class> w, std::span<const mpz_class> in,
            std::span<mpz_class> out) {
  detail::gather_range(st, w, in, out, 0, st.targets);
}

void lattice_step(const LatticeStep& step, std::span<const double> w,
                  std::span<const double> in, std::span<double> out) {
  auto rows = detail::active_rows(step);
  detail::lattice_rows(step, rows, detail::flat_shifts(step), w, in, out, 0, rows.size());
}

void lattice_step(const LatticeStep& step, std::span<const mpz_class> w,
                  std::span<const mpz_class> in, std::span<mpz_class> out) {
  auto rows = detail::active_rows(step);
  detail::lattice_rows(step, rows, detail::flat_shifts(step), w, in, out, 0, rows.size());
}

TwistedSeries twisted_walk(const TwistedWalk& walk, double theta) {
  return detail::twisted_walk(walk, theta);
}

TwistedSeries twisted_integral(const TwistedWalk& walk, const ThetaRule& rule) {
  TwistedSeries acc;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    detail::accumulate(acc, detail::twisted_walk(walk, rule.nodes[j]), rule.weights[j]);
  }
  return acc;
}

std::vector<std::vector<double>> block_spectra(const BlockFamily& f) {
  std::vector<std::vector<double>> r(f.diagonals.size());
  for (std::size_t b = 0; b < f.diagonals.size(); ++b) {
    r[b] = tridiagonal_eigenvalues(f.diagonals[b], f.off_diagonal);
  }
  return r;
}

}  // namespace serial
}  // namespace isospec::kernels
