#pragma once

// Shared loop bodies for the serial and OpenMP kernels. Each function works on
// an index range so both flavours run the same arithmetic in the same order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>

#include "isospec/kernels.hpp"

namespace isospec::kernels::detail {

inline constexpr std::size_t kSumBlock = 1024;

inline double pairwise_block(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_block(x, h) + pairwise_block(x + h, n - h);
}

inline void gather_range(const Stencil& st, std::span<const double> w,
                         std::span<const double> in, std::span<double> out,
                         std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i) {
    double acc = 0;
    const std::int64_t* src = st.source.data() + i * st.width;
    for (std::size_t k = 0; k < st.width; ++k) {
      if (src[k] >= 0) acc += w[k] * in[src[k]];
    }
    out[i] = acc;
  }
}

inline void gather_range(const Stencil& st, std::span<const mpz_class> w,
                         std::span<const mpz_class> in, std::span<mpz_class> out,
                         std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i) {
    mpz_class& acc = out[i];
    acc = 0;
    const std::int64_t* src = st.source.data() + i * st.width;
    for (std::size_t k = 0; k < st.width; ++k) {
      if (src[k] >= 0) mpz_addmul(acc.get_mpz_t(), w[k].get_mpz_t(), in[src[k]].get_mpz_t());
    }
  }
}

// Rows of the active cube: every coordinate but the last, enumerated in
// row-major order. Returns the flat offset of (row, x_last = -active).
inline std::vector<std::int64_t> active_rows(const LatticeStep& step) {
  const Lattice& L = *step.lattice;
  std::vector<std::int64_t> rows;
  std::vector<std::int64_t> x(L.dim, -step.active);
  if (L.dim == 1) return {L.offset(x)};
  while (true) {
    rows.push_back(L.offset(x));
    int j = L.dim - 2;
    while (j >= 0 && x[j] == step.active) {
      x[j] = -step.active;
      --j;
    }
    if (j < 0) break;
    ++x[j];
  }
  return rows;
}

inline std::vector<std::int64_t> flat_shifts(const LatticeStep& step) {
  std::vector<std::int64_t> off;
  for (const auto& s : step.shifts) {
    std::int64_t o = 0;
    for (int j = 0; j < step.lattice->dim; ++j) o += s[j] * step.lattice->stride[j];
    off.push_back(o);
  }
  return off;
}

inline void lattice_rows(const LatticeStep& step, const std::vector<std::int64_t>& rows,
                         const std::vector<std::int64_t>& off, std::span<const double> w,
                         std::span<const double> in, std::span<double> out,
                         std::size_t lo, std::size_t hi) {
  const std::int64_t len = 2 * step.active + 1;
  for (std::size_t r = lo; r < hi; ++r) {
    for (std::int64_t c = rows[r]; c < rows[r] + len; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < off.size(); ++k) acc += w[k] * in[c - off[k]];
      out[c] = acc;
    }
  }
}

inline void lattice_rows(const LatticeStep& step, const std::vector<std::int64_t>& rows,
                         const std::vector<std::int64_t>& off, std::span<const mpz_class> w,
                         std::span<const mpz_class> in, std::span<mpz_class> out,
                         std::size_t lo, std::size_t hi) {
  const std::int64_t len = 2 * step.active + 1;
  for (std::size_t r = lo; r < hi; ++r) {
    for (std::int64_t c = rows[r]; c < rows[r] + len; ++c) {
      mpz_class& acc = out[c];
      acc = 0;
      for (std::size_t k = 0; k < off.size(); ++k) {
        const mpz_class& v = in[c - off[k]];
        if (sgn(v) != 0) mpz_addmul(acc.get_mpz_t(), w[k].get_mpz_t(), v.get_mpz_t());
      }
    }
  }
}

// Twisted walk on (a, b): psi'(a, b) = sum_k w_k e^{i theta (gamma_k + a' beta_k)}
// psi(a', b') with (a', b') = (a - alpha_k, b - beta_k). Cells outside the
// L1 diamond of the current step, or of the wrong parity, stay zero.
inline TwistedSeries twisted_walk(const TwistedWalk& walk, double theta) {
  using cd = std::complex<double>;
  std::int64_t l1 = 0;
  bool odd = true;
  for (const auto& m : walk.moves) {
    l1 = std::max<std::int64_t>(l1, std::llabs(m[0]) + std::llabs(m[1]));
    if (((m[0] + m[1]) % 2 + 2) % 2 == 0) odd = false;
  }
  const std::int64_t R = static_cast<std::int64_t>(walk.steps + 1) * l1 + 1;
  const std::int64_t side = 2 * R + 1;
  const std::size_t K = walk.moves.size();

  // phase[k][a + R] for source row a
  std::vector<std::vector<cd>> phase(K, std::vector<cd>(side));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::int64_t a = -R; a <= R; ++a) {
      double arg = theta * static_cast<double>(walk.moves[k][2] + a * walk.moves[k][1]);
      phase[k][a + R] = walk.weights[k] * cd(std::cos(arg), std::sin(arg));
    }
  }
  std::vector<std::int64_t> shift(K);
  for (std::size_t k = 0; k < K; ++k) shift[k] = walk.moves[k][0] * side + walk.moves[k][1];

  std::vector<cd> cur(side * side), nxt(side * side);
  auto at = [&](std::int64_t a, std::int64_t b) { return (a + R) * side + (b + R); };
  cur[at(0, 0)] = 1;

  TwistedSeries out;
  out.norm.assign(walk.steps + 1, 0.0);
  out.cross.assign(walk.steps, 0.0);
  out.norm[0] = 1;
  for (int s = 1; s <= walk.steps; ++s) {
    const std::int64_t reach = s * l1;
    double norm = 0, cross = 0;
    for (std::int64_t a = -reach; a <= reach; ++a) {
      std::int64_t bmax = reach - std::llabs(a);
      std::int64_t b0 = -bmax, db = 1;
      if (odd) {
        db = 2;
        if (((a + b0 - s) % 2 + 2) % 2 != 0) ++b0;
      }
      for (std::int64_t b = b0; b <= bmax; b += db) {
        const std::int64_t c = at(a, b);
        cd acc = 0;
        for (std::size_t k = 0; k < K; ++k) {
          acc += phase[k][a - walk.moves[k][0] + R] * cur[c - shift[k]];
        }
        nxt[c] = acc;
        norm += std::norm(acc);
        cross += (std::conj(cur[c]) * acc).real();
      }
    }
    out.norm[s] = norm;
    out.cross[s - 1] = cross;
    // clear the previous step's cells so stale values never leak
    const std::int64_t prev = (s - 1) * l1;
    for (std::int64_t a = -prev; a <= prev; ++a) {
      std::int64_t bmax = prev - std::llabs(a);
      std::fill(cur.begin() + at(a, -bmax), cur.begin() + at(a, bmax) + 1, cd(0));
    }
    std::swap(cur, nxt);
  }
  return out;
}

inline void accumulate(TwistedSeries& acc, const TwistedSeries& s, double w) {
  if (acc.norm.empty()) {
    acc.norm.assign(s.norm.size(), 0.0);
    acc.cross.assign(s.cross.size(), 0.0);
  }
  for (std::size_t i = 0; i < s.norm.size(); ++i) acc.norm[i] += w * s.norm[i];
  for (std::size_t i = 0; i < s.cross.size(); ++i) acc.cross[i] += w * s.cross[i];
}

}  // namespace isospec::kernels::detail
