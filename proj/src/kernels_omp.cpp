#include <omp.h>

#include "kernels_impl.hpp"

namespace isospec::kernels::omp {

double pairwise_sum(std::span<const double> x) {
  const std::size_t nb = (x.size() + detail::kSumBlock - 1) / detail::kSumBlock;
  std::vector<double> blocks(nb);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    std::size_t i = b * detail::kSumBlock;
    blocks[b] = detail::pairwise_block(x.data() + i, std::min(detail::kSumBlock, x.size() - i));
  }
  return detail::pairwise_block(blocks.data(), blocks.size());
}

void gather(const Stencil& st, std::span<const double> w, std::span<const double> in,
            std::span<double> out) {
  const std::size_t chunk = 4096;
  const std::size_t nc = (st.targets + chunk - 1) / chunk;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < nc; ++c) {
    detail::gather_range(st, w, in, out, c * chunk, std::min(st.targets, (c + 1) * chunk));
  }
}

void gather(const Stencil& st, std::span<const mpz_class> w, std::span<const mpz_class> in,
            std::span<mpz_class> out) {
  const std::size_t chunk = 1024;
  const std::size_t nc = (st.targets + chunk - 1) / chunk;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < nc; ++c) {
    detail::gather_range(st, w, in, out, c * chunk, std::min(st.targets, (c + 1) * chunk));
  }
}

void lattice_step(const LatticeStep& step, std::span<const double> w,
                  std::span<const double> in, std::span<double> out) {
  auto rows = detail::active_rows(step);
  auto off = detail::flat_shifts(step);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < rows.size(); ++r) {
    detail::lattice_rows(step, rows, off, w, in, out, r, r + 1);
  }
}

void lattice_step(const LatticeStep& step, std::span<const mpz_class> w,
                  std::span<const mpz_class> in, std::span<mpz_class> out) {
  auto rows = detail::active_rows(step);
  auto off = detail::flat_shifts(step);
  if (rows.size() == 1) {
    // one long row: split it into column chunks instead
    const std::int64_t len = 2 * step.active + 1, chunk = 256;
    const std::int64_t nc = (len + chunk - 1) / chunk;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < nc; ++c) {
      std::int64_t lo = rows[0] + c * chunk, hi = std::min(rows[0] + len, lo + chunk);
      for (std::int64_t i = lo; i < hi; ++i) {
        mpz_class& acc = out[i];
        acc = 0;
        for (std::size_t k = 0; k < off.size(); ++k) {
          const mpz_class& v = in[i - off[k]];
          if (sgn(v) != 0) mpz_addmul(acc.get_mpz_t(), w[k].get_mpz_t(), v.get_mpz_t());
        }
      }
    }
    return;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < rows.size(); ++r) {
    detail::lattice_rows(step, rows, off, w, in, out, r, r + 1);
  }
}

TwistedSeries twisted_integral(const TwistedWalk& walk, const ThetaRule& rule) {
  std::vector<TwistedSeries> per(rule.nodes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    per[j] = detail::twisted_walk(walk, rule.nodes[j]);
  }
  TwistedSeries acc;
  for (std::size_t j = 0; j < per.size(); ++j) detail::accumulate(acc, per[j], rule.weights[j]);
  return acc;
}

std::vector<std::vector<double>> block_spectra(const BlockFamily& f) {
  std::vector<std::vector<double>> r(f.diagonals.size());
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < f.diagonals.size(); ++b) {
    r[b] = tridiagonal_eigenvalues(f.diagonals[b], f.off_diagonal);
  }
  return r;
}

}  // namespace isospec::kernels::omp
