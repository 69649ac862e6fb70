#include "isospec/walk.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "isospec/errors.hpp"
#include "isospec/kernels.hpp"

namespace isospec {

namespace {

mpq_class parse_rational(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (j.is_string()) {
    mpq_class q;
    if (q.set_str(j.get<std::string>(), 10) != 0) {
      throw PreconditionError("measure: cannot parse weight '" + j.get<std::string>() + "'");
    }
    q.canonicalize();
    return q;
  }
  throw PreconditionError("measure: weights must be integers or \"p/q\" strings");
}

// Largest standard word length over the support, or -1 when some element
// lies beyond `max_radius`.
int support_word_length(const Group& g, const std::vector<Element>& support, int max_radius) {
  BallOptions opt;
  opt.max_elements = 2'000'000;
  try {
    Ball b = make_ball(g, g.standard_generators(), max_radius, opt);
    int m = 0;
    for (const auto& x : support) {
      auto i = b.find(x);
      if (!i) return -1;
      int k = 0;
      while (*i >= b.ball_size(k)) ++k;
      m = std::max(m, k);
    }
    return m;
  } catch (const ResourceError&) {
    return -1;
  }
}

bool check_generating(const Group& g, const std::vector<Element>& support) {
  std::vector<Element> steps;
  for (const auto& s : support) {
    if (!g.is_identity(s)) steps.push_back(s);
  }
  if (steps.empty()) return false;
  ElementMap<bool> reached{{g.identity(), true}};
  std::vector<Element> frontier{g.identity()};
  for (int len = 1; len <= 4; ++len) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (const auto& s : steps) {
        Element y = g.multiply(x, s);
        if (reached.emplace(y, true).second) next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
  }
  Ball b2 = make_ball(g, g.standard_generators(), 2);
  for (const auto& x : b2.elements()) {
    if (!reached.count(x)) return false;
  }
  return true;
}

}  // namespace

Measure Measure::from_weights(const Group& group,
                              std::vector<std::pair<Element, mpq_class>> weights,
                              std::string label) {
  if (weights.empty()) throw PreconditionError("measure: empty support");
  std::sort(weights.begin(), weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  mpq_class total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    group.validate(weights[i].first);
    if (i > 0 && weights[i].first == weights[i - 1].first) {
      throw PreconditionError("measure: element " + group.format(weights[i].first) +
                              " listed twice");
    }
    if (weights[i].second <= 0) {
      throw PreconditionError("measure: weight of " + group.format(weights[i].first) +
                              " is not positive");
    }
    total += weights[i].second;
  }
  if (total != 1) throw PreconditionError("measure: weights sum to " + total.get_str() + ", not 1");

  Measure m(group);
  m.label_ = std::move(label);
  ElementMap<std::size_t> index;
  for (auto& [g, w] : weights) {
    index.emplace(g, m.support_.size());
    m.support_.push_back(g);
    m.weights_.push_back(w);
  }
  for (std::size_t i = 0; i < m.support_.size(); ++i) {
    Element inv = group.inverse(m.support_[i]);
    auto it = index.find(inv);
    mpq_class wi = it == index.end() ? mpq_class(0) : m.weights_[it->second];
    if (wi != m.weights_[i]) {
      throw PreconditionError("measure not symmetric: mu(" + group.format(m.support_[i]) +
                              ") = " + m.weights_[i].get_str() + " but mu(" +
                              group.format(inv) + ") = " + wi.get_str());
    }
  }
  m.denominator_ = 1;
  for (const auto& w : m.weights_) {
    mpz_lcm(m.denominator_.get_mpz_t(), m.denominator_.get_mpz_t(), w.get_den_mpz_t());
  }
  for (const auto& w : m.weights_) {
    m.scaled_.push_back(mpz_class(w.get_num() * (m.denominator_ / w.get_den())));
  }
  m.generating_ = group.spec().family == Family::cyclic || check_generating(group, m.support_);
  m.max_len_ = support_word_length(group, m.support_, 6);
  return m;
}

std::vector<double> Measure::float_weights() const {
  std::vector<double> r;
  for (const auto& w : weights_) r.push_back(w.get_d());
  return r;
}

mpq_class Measure::weight_of(const Element& g) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), g);
  if (it == support_.end() || !(*it == g)) return 0;
  return weights_[it - support_.begin()];
}

nlohmann::json Measure::to_json() const {
  nlohmann::json sup = nlohmann::json::array();
  for (std::size_t i = 0; i < support_.size(); ++i) {
    sup.push_back({{"element", group_.element_to_json(support_[i])},
                   {"weight", weights_[i].get_str()}});
  }
  return {{"label", label_}, {"support", sup}};
}

Measure srw_measure(const Group& group, const GeneratingSet& gens) {
  if (gens.elements.empty()) throw PreconditionError("srw: empty generating set");
  ElementMap<bool> set;
  for (const auto& s : gens.elements) {
    if (group.is_identity(s)) throw PreconditionError("srw: identity is not allowed as a generator");
    if (!set.emplace(s, true).second) {
      throw PreconditionError("srw: generator " + group.format(s) + " listed twice");
    }
  }
  for (const auto& s : gens.elements) {
    Element inv = group.inverse(s);
    if (!set.count(inv)) {
      throw PreconditionError("srw: generating set not symmetric: " + group.format(s) +
                              " present but its inverse " + group.format(inv) + " is missing");
    }
  }
  std::vector<std::pair<Element, mpq_class>> w;
  mpq_class each(1, gens.size());
  for (const auto& s : gens.elements) w.emplace_back(s, each);
  return Measure::from_weights(group, std::move(w), "srw");
}

Measure lazy_measure(const Group& group, const GeneratingSet& gens, const mpq_class& hold) {
  if (hold <= 0 || hold >= 1) throw PreconditionError("lazy: holding probability must lie in (0,1)");
  Measure base = srw_measure(group, gens);
  std::vector<std::pair<Element, mpq_class>> w{{group.identity(), hold}};
  mpq_class each = (1 - hold) / mpq_class(gens.size());
  each.canonicalize();
  for (const auto& s : gens.elements) w.emplace_back(s, each);
  return Measure::from_weights(group, std::move(w), "lazy");
}

Measure uniform_measure(const Group& group, std::span<const Element> elements) {
  auto set = canonical_set(elements);
  if (set.size() != elements.size()) throw PreconditionError("uniform: repeated elements");
  std::vector<std::pair<Element, mpq_class>> w;
  mpq_class each(1, set.size());
  for (const auto& s : set) w.emplace_back(s, each);
  return Measure::from_weights(group, std::move(w), "uniform");
}

Measure measure_from_json(const Group& group, const nlohmann::json& j) {
  std::string kind = j.value("kind", "srw");
  GeneratingSet gens = group.standard_generators();
  if (j.contains("generators")) {
    gens.elements.clear();
    for (const auto& e : j.at("generators")) gens.elements.push_back(group.element_from_json(e));
    gens.symmetric = group.is_symmetric(gens.elements);
  }
  if (kind == "srw") return srw_measure(group, gens);
  if (kind == "lazy") {
    return lazy_measure(group, gens, parse_rational(j.value("hold", nlohmann::json("1/2"))));
  }
  if (kind == "uniform") {
    std::vector<Element> el;
    for (const auto& e : j.at("elements")) el.push_back(group.element_from_json(e));
    return uniform_measure(group, el);
  }
  if (kind == "weights") {
    std::vector<std::pair<Element, mpq_class>> w;
    for (const auto& e : j.at("support")) {
      w.emplace_back(group.element_from_json(e.at("element")), parse_rational(e.at("weight")));
    }
    return Measure::from_weights(group, std::move(w));
  }
  throw PreconditionError("measure: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Distributions

mpq_class ExactDistribution::at(const Element& g) const {
  auto it = std::lower_bound(support.begin(), support.end(), g);
  if (it == support.end() || !(*it == g)) return 0;
  mpq_class q(numerators[it - support.begin()], denominator);
  q.canonicalize();
  return q;
}

mpq_class ExactDistribution::mass() const {
  mpz_class s = 0;
  for (const auto& n : numerators) s += n;
  mpq_class q(s, denominator);
  q.canonicalize();
  return q;
}

double FloatDistribution::at(const Element& g) const {
  auto it = std::lower_bound(support.begin(), support.end(), g);
  if (it == support.end() || !(*it == g)) return 0;
  return values[it - support.begin()];
}

double FloatDistribution::mass() const { return kernels::serial::pairwise_sum(values); }

ExactDistribution delta_exact(const Group& group) {
  ExactDistribution d;
  d.support = {group.identity()};
  d.numerators = {1};
  return d;
}

FloatDistribution delta_float(const Group& group) {
  FloatDistribution d;
  d.support = {group.identity()};
  d.values = {1.0};
  return d;
}

namespace {

struct SparseStep {
  std::vector<Element> targets;
  kernels::Stencil stencil;
};

SparseStep sparse_step(const std::vector<Element>& support, const Measure& mu,
                       std::size_t cap) {
  const Group& g = mu.group();
  ElementMap<std::int64_t> index;
  index.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) index.emplace(support[i], static_cast<std::int64_t>(i));
  ElementMap<bool> seen;
  SparseStep st;
  for (const auto& x : support) {
    for (const auto& s : mu.support()) {
      Element y = g.multiply(x, s);
      if (seen.emplace(y, true).second) {
        st.targets.push_back(std::move(y));
        if (st.targets.size() > cap) {
          throw ResourceError("convolve: support cap " + std::to_string(cap) + " exceeded", 0);
        }
      }
    }
  }
  std::sort(st.targets.begin(), st.targets.end());
  std::vector<Element> inv;
  for (const auto& s : mu.support()) inv.push_back(g.inverse(s));
  st.stencil.targets = st.targets.size();
  st.stencil.width = inv.size();
  st.stencil.source.resize(st.targets.size() * inv.size());
  for (std::size_t i = 0; i < st.targets.size(); ++i) {
    for (std::size_t k = 0; k < inv.size(); ++k) {
      auto it = index.find(g.multiply(st.targets[i], inv[k]));
      st.stencil.source[i * inv.size() + k] = it == index.end() ? -1 : it->second;
    }
  }
  return st;
}

// Drop zero entries so supports stay tight (exact cancellation cannot occur
// with positive weights, but float underflow can).
template <class V>
void prune(std::vector<Element>& support, std::vector<V>& values) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (values[i] != 0) {
      if (i != j) {
        support[j] = std::move(support[i]);
        values[j] = std::move(values[i]);
      }
      ++j;
    }
  }
  support.resize(j);
  values.resize(j);
}

}  // namespace

ExactDistribution convolve(const ExactDistribution& dist, const Measure& mu,
                           const ConvolveOptions& options) {
  SparseStep st = sparse_step(dist.support, mu, options.support_cap);
  ExactDistribution r;
  r.step = dist.step + 1;
  r.denominator = dist.denominator * mu.denominator();
  r.numerators.resize(st.targets.size());
  if (options.parallel) {
    kernels::omp::gather(st.stencil, mu.scaled_weights(), dist.numerators, r.numerators);
  } else {
    kernels::serial::gather(st.stencil, mu.scaled_weights(), dist.numerators, r.numerators);
  }
  r.support = std::move(st.targets);
  prune(r.support, r.numerators);
  return r;
}

FloatDistribution convolve(const FloatDistribution& dist, const Measure& mu,
                           const ConvolveOptions& options) {
  SparseStep st = sparse_step(dist.support, mu, options.support_cap);
  FloatDistribution r;
  r.step = dist.step + 1;
  r.values.resize(st.targets.size());
  auto w = mu.float_weights();
  if (options.parallel) {
    kernels::omp::gather(st.stencil, w, dist.values, r.values);
  } else {
    kernels::serial::gather(st.stencil, w, dist.values, r.values);
  }
  r.support = std::move(st.targets);
  prune(r.support, r.values);
  return r;
}

Arithmetic arithmetic_from_string(const std::string& s) {
  if (s == "exact") return Arithmetic::exact;
  if (s == "float") return Arithmetic::floating;
  if (s == "auto") return Arithmetic::automatic;
  throw PreconditionError("mode must be exact, float or auto (got '" + s + "')");
}

std::string to_string(Arithmetic a) {
  switch (a) {
    case Arithmetic::exact:
      return "exact";
    case Arithmetic::floating:
      return "float";
    case Arithmetic::automatic:
      return "auto";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Return probabilities

namespace {

// Accumulates p(2s) and p(2s+1) from consecutive distributions.
class ExactSeriesBuilder {
 public:
  ExactSeriesBuilder(ReturnSeries& out, int T) : out_(out), T_(T) {}
  // dot = sum a(x) b(x) over numerators, scaled by den
  void put(int t, const mpz_class& dot, const mpz_class& den) {
    if (t > T_) return;
    mpq_class q(dot, den);
    q.canonicalize();
    out_.exact[t] = q;
    out_.values[t] = q.get_d();
    out_.achieved = std::max(out_.achieved, t);
  }

 private:
  ReturnSeries& out_;
  int T_;
};

std::int64_t measure_reach(const Measure& mu) {
  std::int64_t m = 0;
  for (const auto& g : mu.support()) {
    for (auto c : g.code) m = std::max<std::int64_t>(m, std::llabs(c));
  }
  return m;
}

void lattice_series(const Measure& mu, int T, bool exact, const ReturnOptions& opt,
                    ReturnSeries& out) {
  const int d = mu.group().spec().rank;
  const int S = (T + 1) / 2;
  const std::int64_t m = std::max<std::int64_t>(1, measure_reach(mu));
  kernels::Lattice L = kernels::make_lattice(d, S * m + m);
  kernels::LatticeStep step;
  step.lattice = &L;
  for (const auto& g : mu.support()) step.shifts.push_back(g.code);
  out.kernel = "lattice";

  // products of matching cells over the active cube of half-width `a`
  auto active_cells = [&](std::int64_t a) {
    std::vector<std::int64_t> cells;
    std::vector<std::int64_t> x(d, -a);
    if (d == 1) {
      for (std::int64_t c = 0; c < 2 * a + 1; ++c) cells.push_back(L.offset(x) + c);
      return cells;
    }
    while (true) {
      std::int64_t base = L.offset(x);
      for (std::int64_t c = 0; c < 2 * a + 1; ++c) cells.push_back(base + c);
      int j = d - 2;
      while (j >= 0 && x[j] == a) x[j--] = -a;
      if (j < 0) break;
      ++x[j];
    }
    return cells;
  };

  if (exact) {
    ExactSeriesBuilder b(out, T);
    std::vector<mpz_class> cur(L.cells()), nxt(L.cells());
    std::vector<std::int64_t> origin(d, 0);
    cur[L.offset(origin)] = 1;
    mpz_class den = 1;
    b.put(0, 1, 1);
    for (int s = 0; s < S; ++s) {
      step.active = (s + 1) * m;
      if (opt.parallel) {
        kernels::omp::lattice_step(step, mu.scaled_weights(), cur, nxt);
      } else {
        kernels::serial::lattice_step(step, mu.scaled_weights(), cur, nxt);
      }
      mpz_class sq = 0, cross = 0;
      for (auto c : active_cells(step.active)) {
        if (sgn(nxt[c]) == 0) continue;
        mpz_addmul(sq.get_mpz_t(), nxt[c].get_mpz_t(), nxt[c].get_mpz_t());
        if (sgn(cur[c]) != 0) mpz_addmul(cross.get_mpz_t(), cur[c].get_mpz_t(), nxt[c].get_mpz_t());
      }
      mpz_class den_next = den * mu.denominator();
      b.put(2 * s + 1, cross, den * den_next);
      b.put(2 * s + 2, sq, den_next * den_next);
      den = den_next;
      std::swap(cur, nxt);
    }
    return;
  }

  std::vector<double> cur(L.cells(), 0.0), nxt(L.cells(), 0.0);
  std::vector<std::int64_t> origin(d, 0);
  cur[L.offset(origin)] = 1;
  auto w = mu.float_weights();
  out.values[0] = 1;
  std::vector<double> sq_terms, cross_terms;
  for (int s = 0; s < S; ++s) {
    step.active = (s + 1) * m;
    if (opt.parallel) {
      kernels::omp::lattice_step(step, w, cur, nxt);
    } else {
      kernels::serial::lattice_step(step, w, cur, nxt);
    }
    sq_terms.clear();
    cross_terms.clear();
    for (auto c : active_cells(step.active)) {
      sq_terms.push_back(nxt[c] * nxt[c]);
      cross_terms.push_back(cur[c] * nxt[c]);
    }
    auto sum = [&](const std::vector<double>& v) {
      return opt.parallel ? kernels::omp::pairwise_sum(v) : kernels::serial::pairwise_sum(v);
    };
    if (2 * s + 1 <= T) out.values[2 * s + 1] = sum(cross_terms);
    if (2 * s + 2 <= T) out.values[2 * s + 2] = sum(sq_terms);
    out.achieved = std::min(T, 2 * s + 2);
    std::swap(cur, nxt);
  }
}

void heisenberg_series(const Measure& mu, int T, const ReturnOptions& opt, ReturnSeries& out) {
  const int S = (T + 1) / 2;
  kernels::TwistedWalk walk;
  walk.steps = S;
  auto w = mu.float_weights();
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto& c = mu.support()[k].code;
    walk.moves.push_back({c[0], c[1], c[2]});
    walk.weights.push_back(w[k]);
    walk.reach = std::max<std::int64_t>({walk.reach, std::llabs(c[0]), std::llabs(c[1])});
  }
  // the integrand varies on the scale 1/S near theta = 0 and pi
  int levels = std::max(3, static_cast<int>(std::ceil(std::log2(20.0 * M_PI * std::max(S, 1)))));
  auto rule = kernels::graded_theta_rule(levels, opt.fourier_nodes);
  auto series = opt.parallel ? kernels::omp::twisted_integral(walk, rule)
                             : kernels::serial::twisted_integral(walk, rule);
  out.kernel = "central-fourier";
  out.values[0] = 1;
  for (int s = 0; s < S; ++s) {
    if (2 * s + 1 <= T) out.values[2 * s + 1] = series.cross[s] / M_PI;
    if (2 * s + 2 <= T) out.values[2 * s + 2] = series.norm[s + 1] / M_PI;
  }
  out.achieved = T;
}

void sparse_series(const Measure& mu, int T, bool exact, const ReturnOptions& opt,
                   ReturnSeries& out) {
  const int S = (T + 1) / 2;
  ConvolveOptions copt;
  copt.support_cap = opt.support_cap;
  copt.parallel = opt.parallel;
  out.kernel = "sparse";
  out.values[0] = 1;
  if (exact) out.exact[0] = 1;
  out.achieved = 0;

  auto dot_exact = [](const ExactDistribution& a, const ExactDistribution& b) {
    mpz_class s = 0;
    std::size_t i = 0, j = 0;
    while (i < a.support.size() && j < b.support.size()) {
      if (a.support[i] < b.support[j]) {
        ++i;
      } else if (b.support[j] < a.support[i]) {
        ++j;
      } else {
        mpz_addmul(s.get_mpz_t(), a.numerators[i].get_mpz_t(), b.numerators[j].get_mpz_t());
        ++i;
        ++j;
      }
    }
    return s;
  };
  auto dot_float = [&](const FloatDistribution& a, const FloatDistribution& b) {
    std::vector<double> terms;
    std::size_t i = 0, j = 0;
    while (i < a.support.size() && j < b.support.size()) {
      if (a.support[i] < b.support[j]) {
        ++i;
      } else if (b.support[j] < a.support[i]) {
        ++j;
      } else {
        terms.push_back(a.values[i] * b.values[j]);
        ++i;
        ++j;
      }
    }
    return opt.parallel ? kernels::omp::pairwise_sum(terms) : kernels::serial::pairwise_sum(terms);
  };

  try {
    if (exact) {
      ExactSeriesBuilder b(out, T);
      ExactDistribution cur = delta_exact(mu.group());
      for (int s = 0; s < S; ++s) {
        ExactDistribution nxt = convolve(cur, mu, copt);
        b.put(2 * s + 1, dot_exact(cur, nxt), cur.denominator * nxt.denominator);
        b.put(2 * s + 2, dot_exact(nxt, nxt), nxt.denominator * nxt.denominator);
        cur = std::move(nxt);
      }
    } else {
      FloatDistribution cur = delta_float(mu.group());
      for (int s = 0; s < S; ++s) {
        FloatDistribution nxt = convolve(cur, mu, copt);
        if (2 * s + 1 <= T) out.values[2 * s + 1] = dot_float(cur, nxt);
        if (2 * s + 2 <= T) out.values[2 * s + 2] = dot_float(nxt, nxt);
        out.achieved = std::min(T, 2 * s + 2);
        cur = std::move(nxt);
      }
    }
  } catch (const ResourceError&) {
    out.truncated = true;
  }
}

}  // namespace

ReturnSeries return_probability(const Measure& mu, int T, const ReturnOptions& opt) {
  if (T < 0) throw PreconditionError("return_probability: T must be >= 0");
  const GroupSpec& spec = mu.group().spec();
  const int S = (T + 1) / 2;
  const bool lattice_ok = opt.structured && spec.family == Family::free_abelian && spec.rank <= 3;

  bool exact = opt.mode == Arithmetic::exact;
  if (opt.mode == Arithmetic::automatic) {
    exact = T <= opt.exact_step_limit;
    if (lattice_ok) {
      double side = 2.0 * S * std::max<std::int64_t>(1, measure_reach(mu)) + 1;
      exact = exact && std::pow(side, spec.rank) <= static_cast<double>(opt.exact_support_limit);
    }
  }

  ReturnSeries out;
  out.mode = exact ? Arithmetic::exact : Arithmetic::floating;
  out.requested = T;
  out.values.assign(T + 1, 0.0);
  if (exact) out.exact.assign(T + 1, mpq_class(0));
  if (T == 0) {
    out.values[0] = 1;
    if (exact) out.exact[0] = 1;
    out.kernel = "trivial";
    return out;
  }

  if (lattice_ok) {
    lattice_series(mu, T, exact, opt, out);
  } else if (!exact && opt.structured && spec.family == Family::heisenberg) {
    heisenberg_series(mu, T, opt, out);
  } else {
    sparse_series(mu, T, exact, opt, out);
  }
  out.values.resize(out.achieved + 1);
  if (exact) out.exact.resize(out.achieved + 1);
  return out;
}

McEstimate mc_return_probability(const Measure& mu, int t, std::size_t samples,
                                 std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("mc: samples must be >= 1");
  if (t < 0) throw PreconditionError("mc: t must be >= 0");
  const Group& g = mu.group();
  std::vector<double> cdf;
  double acc = 0;
  for (double w : mu.float_weights()) cdf.push_back(acc += w);
  cdf.back() = 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  McEstimate e;
  e.samples = samples;
  for (std::size_t n = 0; n < samples; ++n) {
    Element x = g.identity();
    for (int s = 0; s < t; ++s) {
      auto k = std::upper_bound(cdf.begin(), cdf.end(), u(rng)) - cdf.begin();
      if (k >= static_cast<std::ptrdiff_t>(cdf.size())) k = cdf.size() - 1;
      x = g.multiply(x, mu.support()[k]);
    }
    if (g.is_identity(x)) ++e.hits;
  }
  const double n = static_cast<double>(samples);
  const double p = e.hits / n;
  const double z = 1.959963984540054;
  e.estimate = p;
  e.std_error = std::sqrt(p * (1 - p) / n);
  const double den = 1 + z * z / n;
  const double mid = (p + z * z / (2 * n)) / den;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den;
  e.ci_low = std::max(0.0, mid - half);
  e.ci_high = std::min(1.0, mid + half);
  return e;
}

std::string decimal_string(const mpq_class& q, int digits) {
  if (q == 0) return "0";
  mpq_class a = abs(q);
  // exponent e with 10^e <= a < 10^(e+1)
  long e = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 10));
  auto pow10 = [](long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(k));
    return r;
  };
  auto scaled = [&](long ex) {
    mpq_class s = a;
    if (ex >= 0) {
      s /= pow10(ex);
    } else {
      s *= pow10(-ex);
    }
    return s;
  };
  while (scaled(e) >= 10) ++e;
  while (scaled(e) < 1) --e;
  // round(a * 10^(digits-1-e)), half away from zero
  mpq_class s = scaled(e - (digits - 1));
  mpz_class n = s.get_num() / s.get_den();
  mpz_class rem = s.get_num() - n * s.get_den();
  if (2 * rem >= s.get_den()) ++n;
  if (n == pow10(digits)) {
    n = pow10(digits - 1);
    ++e;
  }
  std::string m = n.get_str();
  std::string out = q < 0 ? "-" : "";
  out += m.substr(0, 1);
  if (digits > 1) out += "." + m.substr(1);
  char buf[32];
  std::snprintf(buf, sizeof buf, "e%+03ld", e);
  return out + buf;
}

}  // namespace isospec
