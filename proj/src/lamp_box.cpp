#include "isospec/lamp_box.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isospec/errors.hpp"

namespace isospec {

namespace {

struct LampMoves {
  int q = 2;
  double hold = 0, shift = 0;
  std::vector<double> lamp;  // mu(lamp value l at the cursor)
};

LampMoves lamp_moves(const Measure& mu) {
  const Group& group = mu.group();
  const GroupSpec& spec = group.spec();
  if (spec.family != Family::wreath || spec.rank != 1 || !spec.lamp ||
      spec.lamp->family != Family::cyclic) {
    throw PreconditionError("lamp box: needs Z_q wr Z, got " + spec.name());
  }
  LampMoves mv;
  mv.q = spec.lamp->order;
  mv.lamp.assign(mv.q, 0.0);
  const auto w = mu.float_weights();
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const Element& g = mu.support()[k];
    auto cursor = group.wreath_cursor(g).code[0];
    auto lamps = group.wreath_lamps(g);
    if (lamps.empty() && cursor == 0) {
      mv.hold = w[k];
    } else if (lamps.empty() && std::abs(cursor) == 1) {
      mv.shift = w[k];
    } else if (cursor == 0 && lamps.size() == 1 && lamps[0].first.code[0] == 0) {
      mv.lamp[lamps[0].second.code[0]] = w[k];
    } else {
      throw PreconditionError("lamp box: measure charges " + group.format(g) +
                              ", only lamp-at-cursor moves and unit shifts are allowed");
    }
  }
  return mv;
}

}  // namespace

double LampBox::lambda1(const Measure& mu, int m) {
  if (m < 1) throw PreconditionError("lamp box: width must be positive");
  auto mv = lamp_moves(mu);
  double s = 0;
  for (double x : mv.lamp) s += x;
  std::vector<double> d(m, 1 - mv.hold - s), off(m - 1, -mv.shift);
  return kernels::tridiagonal_eigenvalues(d, off).front();
}

LampBox::LampBox(const Measure& mu, int m) : group_(mu.group()), m_(m) {
  if (m < 1) throw PreconditionError("lamp box: width must be positive");
  const auto mv = lamp_moves(mu);
  q_ = mv.q;
  const std::size_t classes = static_cast<std::size_t>(q_ / 2 + 1);
  if (std::pow(double(classes), m) > 5e7) throw ResourceError("lamp box: too many blocks", m);
  const double hold = mv.hold, shift = mv.shift;
  const auto& lamp = mv.lamp;
  // diagonal value per class
  std::vector<double> diag(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double s = 0;
    for (int l = 1; l < q_; ++l) s += lamp[l] * std::cos(2 * M_PI * double(c) * l / q_);
    diag[c] = 1 - hold - s;
  }
  blocks_.block_size = m;
  blocks_.off_diagonal.assign(m > 1 ? m - 1 : 0, -shift);
  std::vector<std::size_t> cls(m, 0);
  while (true) {
    std::vector<double> d(m);
    std::size_t mult = 1;
    for (int x = 0; x < m; ++x) {
      d[x] = diag[cls[x]];
      if (cls[x] != 0 && 2 * cls[x] != static_cast<std::size_t>(q_)) mult *= 2;
    }
    blocks_.diagonals.push_back(std::move(d));
    blocks_.multiplicity.push_back(mult);
    int x = m - 1;
    while (x >= 0 && cls[x] + 1 == classes) cls[x--] = 0;
    if (x < 0) break;
    ++cls[x];
  }
}

std::size_t LampBox::size() const {
  std::size_t n = m_;
  for (int i = 0; i < m_; ++i) n *= q_;
  return n;
}

LampBox::Spectrum LampBox::spectrum(bool parallel) const {
  auto per_block = parallel ? kernels::omp::block_spectra(blocks_) : kernels::serial::block_spectra(blocks_);
  Spectrum s;
  std::vector<double> ev, wt;
  ev.reserve(per_block.size() * m_);
  wt.reserve(per_block.size() * m_);
  for (std::size_t b = 0; b < per_block.size(); ++b) {
    for (double x : per_block[b]) {
      ev.push_back(x);
      wt.push_back(double(blocks_.multiplicity[b]));
    }
  }
  std::vector<std::size_t> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ev[a] < ev[b]; });
  s.eigenvalues.reserve(ev.size());
  s.weights.reserve(ev.size());
  for (auto i : order) {
    s.eigenvalues.push_back(ev[i]);
    s.weights.push_back(wt[i]);
  }
  return s;
}

EmpiricalSpectralDistribution LampBox::esd(bool parallel) const {
  auto s = spectrum(parallel);
  return esd_from_eigenvalues(std::move(s.eigenvalues), s.weights,
                              "lamp box m=" + std::to_string(m_));
}

double LampBox::lambda1() const {
  return kernels::tridiagonal_eigenvalues(blocks_.diagonals.front(), blocks_.off_diagonal).front();
}

std::vector<Element> LampBox::elements() const {
  if (size() > 50'000'000) throw ResourceError("lamp box: too many elements to list", m_);
  std::vector<Element> out;
  out.reserve(size());
  std::vector<int> lamps(m_, 0);
  Group base = group_.base_group(), lampg = group_.lamp_group();
  while (true) {
    std::vector<std::pair<Element, Element>> cfg;
    for (int x = 0; x < m_; ++x) {
      if (lamps[x] != 0) {
        std::int64_t p = x, v = lamps[x];
        cfg.emplace_back(base.make_vector({&p, 1}), lampg.make_vector({&v, 1}));
      }
    }
    for (std::int64_t c = 0; c < m_; ++c) {
      out.push_back(group_.make_wreath(cfg, base.make_vector({&c, 1})));
    }
    int x = m_ - 1;
    while (x >= 0 && lamps[x] + 1 == q_) lamps[x--] = 0;
    if (x < 0) break;
    ++lamps[x];
  }
  return out;
}

}  // namespace isospec
