#pragma once

#include <cstddef>
#include <vector>

#include "isospec/group.hpp"
#include "isospec/kernels.hpp"
#include "isospec/spectral.hpp"
#include "isospec/walk.hpp"

namespace isospec {

/// Dirichlet Laplacian of Z_q wr Z on the box {lamps supported in [0, m),
/// cursor in [0, m)}, of size q^m * m.
///
/// Lamp characters xi in Z_q^m commute with the walk when the measure is
/// carried by the identity, lamp-at-cursor elements and unit shifts, so the
/// operator splits into m x m tridiagonal blocks. The block of xi has
/// diagonal 1 - mu(e) - sum_l mu(l) cos(2 pi xi_c l / q) at cursor c and
/// off-diagonal -mu(shift). Blocks depend on xi only through the classes
/// min(xi_c, q - xi_c), which are enumerated once with multiplicities.
class LampBox {
 public:
  /// Throws PreconditionError for other groups or measures.
  LampBox(const Measure& mu, int m);

  int width() const { return m_; }
  int lamp_order() const { return q_; }
  std::size_t size() const;
  const kernels::BlockFamily& blocks() const { return blocks_; }

  /// All eigenvalues with multiplicities, ascending, and the matching weights.
  struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<double> weights;
  };
  Spectrum spectrum(bool parallel = true) const;
  EmpiricalSpectralDistribution esd(bool parallel = true) const;
  /// The trivial character carries the smallest diagonal, hence lambda_1.
  double lambda1() const;
  /// Same value without building the blocks.
  static double lambda1(const Measure& mu, int m);

  /// Box elements in the order lamp configuration (lexicographic), then cursor.
  std::vector<Element> elements() const;

 private:
  Group group_;
  int m_ = 0, q_ = 2;
  kernels::BlockFamily blocks_;
};

}  // namespace isospec
