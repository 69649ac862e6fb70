#include "isospec/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "isospec/errors.hpp"
#include "isospec/lamp_box.hpp"
#include "isospec/spectral.hpp"

namespace isospec {

namespace {

// Cayley graph discovered on demand; vertex 0 is the identity.
class LazyGraph {
 public:
  LazyGraph(const Group& g, std::span<const Element> gens) : group_(g), gens_(gens.begin(), gens.end()) {
    id(group_.identity());
  }
  int id(const Element& x) {
    auto [it, fresh] = index_.emplace(x, static_cast<int>(elements_.size()));
    if (fresh) {
      elements_.push_back(x);
      adj_.emplace_back();
      expanded_.push_back(false);
    }
    return it->second;
  }
  const std::vector<int>& neighbors(int v) {
    if (!expanded_[v]) {
      std::vector<int> n;
      for (const auto& s : gens_) n.push_back(id(group_.multiply(elements_[v], s)));
      adj_[v] = std::move(n);
      expanded_[v] = true;
    }
    return adj_[v];
  }
  const Element& element(int v) const { return elements_[v]; }
  std::size_t size() const { return elements_.size(); }

 private:
  const Group& group_;
  std::vector<Element> gens_;
  std::vector<Element> elements_;
  std::vector<std::vector<int>> adj_;
  std::vector<bool> expanded_;
  ElementMap<int> index_;
};

struct Redelmeier {
  LazyGraph& graph;
  int max_size;
  std::function<bool(int)> allowed;
  std::function<bool(const std::vector<int>&)> visit;
  std::vector<char> seen;
  std::vector<int> poly;
  std::size_t count = 0;
  bool stop = false;

  void mark(int v) {
    if (static_cast<std::size_t>(v) >= seen.size()) seen.resize(graph.size() * 2 + 16, 0);
    seen[v] = 1;
  }
  bool is_seen(int v) const { return static_cast<std::size_t>(v) < seen.size() && seen[v]; }

  void grow(std::vector<int> untried) {
    while (!untried.empty() && !stop) {
      int v = untried.back();
      untried.pop_back();
      poly.push_back(v);
      ++count;
      if (!visit(poly)) stop = true;
      if (!stop && static_cast<int>(poly.size()) < max_size) {
        std::vector<int> next = untried, added;
        for (int w : std::vector<int>(graph.neighbors(v))) {
          if (!is_seen(w) && allowed(w)) {
            mark(w);
            next.push_back(w);
            added.push_back(w);
          }
        }
        grow(std::move(next));
        for (int w : added) seen[w] = 0;
      }
      poly.pop_back();
    }
  }
};

std::vector<Element> support_generators(const Measure& mu) {
  std::vector<Element> s;
  for (const auto& g : mu.support()) {
    if (!mu.group().is_identity(g)) s.push_back(g);
  }
  return s;
}

double lambda1_of(const Measure& mu, std::vector<Element> set, std::size_t dense_cap = 4000) {
  return lambda1(DirichletOperator(mu, std::move(set)), dense_cap).value;
}

bool set_less(std::vector<Element> a, std::vector<Element> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a < b;
}

// |{x in set : x s outside set for some s}| for small sets.
std::size_t small_boundary(const Group& G, std::span<const Element> gens,
                           const std::vector<Element>& set) {
  std::size_t b = 0;
  for (const auto& x : set) {
    for (const auto& s : gens) {
      Element y = G.multiply(x, s);
      if (std::find(set.begin(), set.end(), y) == set.end()) {
        ++b;
        break;
      }
    }
  }
  return b;
}

std::vector<Element> box_elements(const Group& G, const std::vector<std::int64_t>& lo,
                                  const std::vector<std::int64_t>& hi) {
  std::vector<Element> out;
  std::vector<std::int64_t> x = lo;
  const std::size_t d = lo.size();
  while (true) {
    out.push_back(G.make_vector(x));
    std::size_t j = d;
    while (j-- > 0) {
      if (x[j] < hi[j]) {
        ++x[j];
        break;
      }
      x[j] = lo[j];
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

// Z_q wr Z: lamps supported in [lo, hi], cursor in [c_lo, c_hi].
std::vector<Element> lamp_window(const Group& G, std::int64_t lo, std::int64_t hi,
                                 std::int64_t c_lo, std::int64_t c_hi) {
  const int q = G.spec().lamp->order;
  Group base = G.base_group(), lamp = G.lamp_group();
  const std::size_t w = static_cast<std::size_t>(hi - lo + 1);
  std::vector<int> cfg(w, 0);
  std::vector<Element> out;
  while (true) {
    std::vector<std::pair<Element, Element>> lamps;
    for (std::size_t i = 0; i < w; ++i) {
      if (cfg[i]) {
        std::int64_t p = lo + static_cast<std::int64_t>(i), v = cfg[i];
        lamps.emplace_back(base.make_vector({&p, 1}), lamp.make_vector({&v, 1}));
      }
    }
    for (std::int64_t c = c_lo; c <= c_hi; ++c) out.push_back(G.make_wreath(lamps, base.make_vector({&c, 1})));
    std::size_t i = w;
    while (i-- > 0) {
      if (cfg[i] + 1 < q) {
        ++cfg[i];
        break;
      }
      cfg[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

bool lamp_compatible(const Measure& mu) {
  try {
    LampBox::lambda1(mu, 1);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

bool is_lamplighter(const GroupSpec& s) {
  return s.family == Family::wreath && s.rank == 1 && s.lamp && s.lamp->family == Family::cyclic;
}

std::vector<std::int64_t> side_ladder(std::size_t limit, int max_count) {
  std::vector<std::int64_t> out;
  double n = 1;
  while (static_cast<int>(out.size()) < max_count && n <= double(limit)) {
    auto k = static_cast<std::int64_t>(std::llround(n));
    if (out.empty() || k > out.back()) out.push_back(k);
    n = n < 12 ? n + 1 : n * 1.2;
  }
  return out;
}

// Largest ball within the cap and a geometric ladder of radii inside it.
Ball capped_ball(const Group& G, const GeneratingSet& S, std::size_t cap) {
  try {
    return make_ball(G, S, 1 << 20, {cap});
  } catch (const ResourceError& e) {
    return make_ball(G, S, static_cast<int>(e.reached()), {cap});
  }
}

std::vector<int> radius_ladder(int R) {
  std::vector<int> out;
  for (double r = 0; r <= R; r = r < 8 ? r + 1 : r * 1.25) {
    int k = static_cast<int>(std::lround(r));
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  if (out.empty() || out.back() != R) out.push_back(R);
  return out;
}

}  // namespace

bool translation_classes_available(const Group& group) {
  return group.spec().family == Family::free_abelian;
}

std::size_t enumerate_connected(const Group& group, std::span<const Element> gens, int max_size,
                                const std::function<bool(const std::vector<Element>&)>& visit,
                                bool translation_classes) {
  if (max_size < 1) return 0;
  if (translation_classes && !translation_classes_available(group)) {
    throw PreconditionError("connected sets: translation classes need a free abelian group");
  }
  LazyGraph graph(group, gens);
  const Element e = group.identity();
  std::vector<Element> buf;
  Redelmeier r{graph, max_size,
               [&](int v) { return !translation_classes || e < graph.element(v); },
               [&](const std::vector<int>& poly) {
                 buf.clear();
                 for (int v : poly) buf.push_back(graph.element(v));
                 return visit(buf);
               },
               {}, {}};
  r.mark(0);
  r.grow({0});
  return r.count;
}

nlohmann::json ProfileEstimate::to_json(const Group& group) const {
  auto arr = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j{{"v", p.v}, {"method", p.method}, {"witness_label", p.witness_label}};
    j["exact"] = p.exact ? nlohmann::json(*p.exact) : nlohmann::json(nullptr);
    j["upper"] = p.upper ? nlohmann::json(*p.upper) : nlohmann::json(nullptr);
    auto w = nlohmann::json::array();
    for (const auto& x : p.witness) w.push_back(group.element_to_json(x));
    j["witness"] = w;
    arr.push_back(j);
  }
  return {{"points", arr}};
}

ProfileEstimate profile_bruteforce(const Measure& mu, int v_max) {
  if (v_max < 1) throw PreconditionError("profile: v_max must be positive");
  const Group& G = mu.group();
  auto gens = support_generators(mu);
  const bool classes = translation_classes_available(G);
  std::vector<double> best(v_max + 1, INFINITY);
  std::vector<std::vector<Element>> arg(v_max + 1);
  enumerate_connected(
      G, gens, v_max,
      [&](const std::vector<Element>& set) {
        double l = lambda1_of(mu, set);
        std::size_t k = set.size();
        if (l < best[k] - 1e-12 || (std::abs(l - best[k]) <= 1e-12 && set_less(set, arg[k]))) {
          best[k] = std::min(best[k], l);
          arg[k] = set;
        }
        return true;
      },
      classes);
  ProfileEstimate est;
  double run = INFINITY;
  std::vector<Element> run_arg;
  for (int v = 1; v <= v_max; ++v) {
    if (best[v] < run - 1e-12) {
      run = best[v];
      run_arg = arg[v];
    }
    ProfilePoint p;
    p.v = v;
    p.exact = run;
    p.method = classes ? "bruteforce-connected-translation-classes" : "bruteforce-connected";
    p.witness = canonical_set(run_arg);
    p.witness_label = "connected set of size " + std::to_string(run_arg.size());
    est.points.push_back(std::move(p));
  }
  return est;
}

ProfileEstimate profile_bruteforce_unrestricted(const Measure& mu, int v_max,
                                                std::span<const Element> window) {
  const std::size_t n = window.size();
  if (v_max < 1 || static_cast<std::size_t>(v_max) > n) {
    throw PreconditionError("profile: v_max must lie in [1, |window|]");
  }
  std::vector<double> best(v_max + 1, INFINITY);
  std::vector<std::vector<Element>> arg(v_max + 1);
  std::vector<std::size_t> idx;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!idx.empty()) {
      std::vector<Element> set;
      for (auto i : idx) set.push_back(window[i]);
      double l = lambda1_of(mu, set);
      if (l < best[idx.size()]) {
        best[idx.size()] = l;
        arg[idx.size()] = set;
      }
    }
    if (idx.size() == static_cast<std::size_t>(v_max)) return;
    for (std::size_t i = start; i < n; ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
  ProfileEstimate est;
  double run = INFINITY;
  std::vector<Element> run_arg;
  for (int v = 1; v <= v_max; ++v) {
    if (best[v] < run) {
      run = best[v];
      run_arg = arg[v];
    }
    ProfilePoint p;
    p.v = v;
    p.exact = run;
    p.method = "bruteforce-all-subsets";
    p.witness = canonical_set(run_arg);
    p.witness_label = "subset of the window";
    est.points.push_back(std::move(p));
  }
  return est;
}

std::vector<Candidate> profile_candidate_sets(const Measure& mu, std::size_t v_max,
                                              const CandidateOptions& options) {
  const Group& G = mu.group();
  const GroupSpec& spec = G.spec();
  std::vector<Candidate> out;
  const std::size_t explicit_limit = std::min(v_max, options.max_size);
  auto add_explicit = [&](std::string label, std::vector<Element> set) {
    Candidate c;
    c.label = std::move(label);
    c.size = set.size();
    c.lambda1 = lambda1_of(mu, std::move(set), options.dense_cap);
    out.push_back(std::move(c));
  };
  if (spec.family == Family::free_abelian) {
    const int d = spec.rank;
    for (auto n : side_ladder(explicit_limit, options.max_count)) {
      for (int k = 0; k < d; ++k) {
        std::vector<std::int64_t> lo(d, 0), hi(d, n - 1);
        for (int j = 0; j < k; ++j) hi[j] = n;
        double size = 1;
        for (int j = 0; j < d; ++j) size *= double(hi[j] + 1);
        if (size > double(explicit_limit)) continue;
        std::string label = "box";
        for (int j = 0; j < d; ++j) label += (j ? "x" : " ") + std::to_string(hi[j] + 1);
        add_explicit(label, box_elements(G, lo, hi));
      }
    }
  } else if (spec.family == Family::heisenberg) {
    for (std::int64_t n = 1;; ++n) {
      double size = double(2 * n + 1) * double(2 * n + 1) * double(2 * n * n + 1);
      if (size > double(explicit_limit)) break;
      add_explicit("heisenberg box n=" + std::to_string(n),
                   box_elements(G, {-n, -n, -n * n}, {n, n, n * n}));
    }
  } else if (is_lamplighter(spec)) {
    const bool analytic = lamp_compatible(mu);
    const int q = spec.lamp->order;
    for (int m = 1; m < 200; ++m) {
      double size = std::pow(double(q), m) * m;
      if (size > double(v_max)) break;
      if (analytic) {
        out.push_back({"lamp box m=" + std::to_string(m), static_cast<std::size_t>(size),
                       LampBox::lambda1(mu, m)});
      } else {
        if (size > double(explicit_limit)) break;
        add_explicit("lamp box m=" + std::to_string(m), lamp_window(G, 0, m - 1, 0, m - 1));
      }
    }
  } else {
    auto S = G.standard_generators();
    Ball b = capped_ball(G, S, explicit_limit);
    for (int r : radius_ladder(b.radius())) {
      const auto& el = b.elements();
      add_explicit("ball r=" + std::to_string(r),
                   std::vector<Element>(el.begin(), el.begin() + b.ball_size(r)));
    }
  }
  return out;
}

ProfileEstimate profile_candidates(const Measure& mu, std::span<const std::size_t> v_grid,
                                   const CandidateOptions& options) {
  if (v_grid.empty()) throw PreconditionError("profile: empty v grid");
  std::size_t v_max = *std::max_element(v_grid.begin(), v_grid.end());
  auto cands = profile_candidate_sets(mu, v_max, options);
  ProfileEstimate est;
  for (auto v : v_grid) {
    ProfilePoint p;
    p.v = v;
    p.method = "candidates";
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
      if (c.size <= v && (!best || c.lambda1 < best->lambda1)) best = &c;
    }
    if (best) {
      p.upper = best->lambda1;
      p.witness_label = best->label;
    }
    est.points.push_back(std::move(p));
  }
  return est;
}

CheegerBound cheeger_lower(const Group& group, const GeneratingSet& gens,
                           std::span<const Element> omega, std::size_t max_sets) {
  if (omega.empty()) throw PreconditionError("cheeger: Omega is empty");
  const std::size_t n = omega.size();
  const double S = static_cast<double>(gens.size());
  CheegerBound out;
  ElementMap<int> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(omega[i], static_cast<int>(i));
  if (index.size() != n) throw PreconditionError("cheeger: duplicate elements in Omega");
  // nb[i][s]: index of omega[i] * s in Omega or -1
  std::vector<std::vector<int>> nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : gens.elements) {
      auto it = index.find(group.multiply(omega[i], s));
      nb[i].push_back(it == index.end() ? -1 : it->second);
    }
  }
  double best = INFINITY;
  std::vector<int> best_set;
  if (n <= 20) {
    out.method = "all subsets";
    std::vector<std::uint32_t> inside(n, 0);
    std::vector<bool> leaks(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      for (int j : nb[i]) {
        if (j < 0) {
          leaks[i] = true;
        } else {
          inside[i] |= 1u << j;
        }
      }
    }
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      int size = 0, bnd = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(mask >> i & 1u)) continue;
        ++size;
        if (leaks[i] || (mask & inside[i]) != inside[i]) ++bnd;
      }
      double ratio = double(bnd) / size;
      if (ratio < best) {
        best = ratio;
        best_set.clear();
        for (std::size_t i = 0; i < n; ++i) {
          if (mask >> i & 1u) best_set.push_back(static_cast<int>(i));
        }
      }
    }
  } else {
    out.method = "connected subsets";
    // Redelmeier on the induced graph, each set rooted at its smallest index.
    std::size_t visited = 0;
    std::vector<char> seen(n, 0), in(n, 0);
    std::vector<int> poly;
    std::function<void(std::vector<int>, int)> grow = [&](std::vector<int> untried, int root) {
      while (!untried.empty() && visited < max_sets) {
        int v = untried.back();
        untried.pop_back();
        poly.push_back(v);
        in[v] = 1;
        ++visited;
        int bnd = 0;
        for (int x : poly) {
          for (int j : nb[x]) {
            if (j < 0 || !in[j]) {
              ++bnd;
              break;
            }
          }
        }
        double ratio = double(bnd) / poly.size();
        if (ratio < best) {
          best = ratio;
          best_set = poly;
        }
        std::vector<int> next = untried, added;
        for (int w : nb[v]) {
          if (w > root && !seen[w]) {
            seen[w] = 1;
            next.push_back(w);
            added.push_back(w);
          }
        }
        grow(std::move(next), root);
        for (int w : added) seen[w] = 0;
        in[v] = 0;
        poly.pop_back();
      }
    };
    for (std::size_t root = 0; root < n && visited < max_sets; ++root) {
      std::fill(seen.begin(), seen.end(), 0);
      seen[root] = 1;
      grow({static_cast<int>(root)}, static_cast<int>(root));
    }
    out.exhaustive = visited < max_sets;
  }
  out.h = best;
  out.value = best * best / (2 * S * S);
  for (int i : best_set) out.argmin.push_back(omega[i]);
  out.argmin = canonical_set(out.argmin);
  return out;
}

std::vector<FolnerValue> folner_function(const Group& group, const GeneratingSet& gens,
                                         std::span<const int> radii,
                                         const FolnerOptions& options) {
  for (int r : radii) {
    if (r < 1) throw PreconditionError("folner: r must be positive");
  }
  const bool classes = translation_classes_available(group);
  const int kmax = options.exact_max_size;
  std::vector<std::size_t> min_bnd(kmax + 1, std::numeric_limits<std::size_t>::max());
  enumerate_connected(
      group, gens.elements, kmax,
      [&](const std::vector<Element>& set) {
        min_bnd[set.size()] = std::min(min_bnd[set.size()], small_boundary(group, gens.elements, set));
        return true;
      },
      classes);

  // family candidates for the estimate path, as (size, boundary, label)
  struct Cand {
    std::size_t size, bnd;
    std::string label;
    std::vector<std::int64_t> sides;  // analytic boxes, checked explicitly when chosen
  };
  std::vector<Cand> cands;
  bool cands_built = false;
  auto build_cands = [&] {
    cands_built = true;
    const GroupSpec& spec = group.spec();
    const std::size_t cap = options.candidate_max_size;
    auto push = [&](std::string label, const std::vector<Element>& set) {
      cands.push_back({set.size(), boundary(group, gens, set).size(), std::move(label), {}});
    };
    if (spec.family == Family::free_abelian &&
        canonical_set(gens.elements) == canonical_set(group.standard_generators().elements)) {
      // boxes with sides in {n, n + 1}; |boundary| = sum_i 2 |box| / side_i
      const int d = spec.rank;
      for (std::int64_t n = 1;; ++n) {
        if (std::pow(double(n), d) > double(cap)) break;
        for (int j = 0; j < d; ++j) {
          std::vector<std::int64_t> sides(d, n);
          for (int i = 0; i < j; ++i) sides[i] = n + 1;
          double size = 1;
          for (auto x : sides) size *= double(x);
          if (size > double(cap)) break;
          double bnd = 0;
          for (auto x : sides) bnd += 2 * size / double(x);
          std::string label = "box";
          for (int i = 0; i < d; ++i) label += (i ? "x" : " ") + std::to_string(sides[i]);
          cands.push_back({static_cast<std::size_t>(size), static_cast<std::size_t>(bnd), label, sides});
        }
      }
    } else if (spec.family == Family::free_abelian) {
      const int d = spec.rank;
      for (auto n : side_ladder(cap, 60)) {
        if (std::pow(double(n), d) > double(cap)) break;
        push("cube side " + std::to_string(n),
             box_elements(group, std::vector<std::int64_t>(d, 0), std::vector<std::int64_t>(d, n - 1)));
      }
    } else if (spec.family == Family::heisenberg) {
      for (std::int64_t n = 1; double(2 * n + 1) * (2 * n + 1) * (2 * n * n + 1) <= double(cap); ++n) {
        push("heisenberg box n=" + std::to_string(n),
             box_elements(group, {-n, -n, -n * n}, {n, n, n * n}));
      }
    } else if (is_lamplighter(spec)) {
      for (int m = 1; std::pow(double(spec.lamp->order), m) * m <= double(cap); ++m) {
        push("lamp box m=" + std::to_string(m), lamp_window(group, 0, m - 1, 0, m - 1));
      }
    }
    if (cands.empty()) {
      Ball b = capped_ball(group, gens, cap);
      for (int r : radius_ladder(b.radius())) {
        const auto& el = b.elements();
        push("ball r=" + std::to_string(r),
             std::vector<Element>(el.begin(), el.begin() + b.ball_size(r)));
      }
    }
  };

  std::vector<FolnerValue> out;
  for (int r : radii) {
    FolnerValue f;
    f.r = r;
    for (int k = 1; k <= kmax; ++k) {
      if (min_bnd[k] != std::numeric_limits<std::size_t>::max() &&
          static_cast<std::size_t>(r) * min_bnd[k] < static_cast<std::size_t>(k)) {
        f.value = k;
        f.exact = true;
        f.method = "exhaustive connected search";
        f.witness_label = "connected set of size " + std::to_string(k);
        break;
      }
    }
    if (!f.exact) {
      if (!cands_built) build_cands();
      f.method = "candidate upper bound";
      for (const auto& c : cands) {
        if (static_cast<std::size_t>(r) * c.bnd < c.size && (f.value == 0 || c.size < f.value)) {
          f.value = c.size;
          f.witness_label = c.label;
        }
      }
      if (f.value == 0) {
        f.method = "no candidate within the size cap";
      } else {
        auto it = std::find_if(cands.begin(), cands.end(), [&](const Cand& c) {
          return c.size == f.value && c.label == f.witness_label;
        });
        if (!it->sides.empty() && it->size <= 200'000) {
          std::vector<std::int64_t> hi(it->sides);
          for (auto& x : hi) --x;
          auto box = box_elements(group, std::vector<std::int64_t>(hi.size(), 0), hi);
          if (boundary(group, gens, box).size() != it->bnd) {
            throw InvariantError("folner: box boundary differs from its closed form");
          }
        }
      }
    }
    out.push_back(f);
  }
  return out;
}

BallFolnerBound ball_folner_lower(const Ball& ball, int r) {
  if (r < 0) throw PreconditionError("ball bound: r must be nonnegative");
  BallFolnerBound b;
  b.r = r;
  b.radius = r / (4 * static_cast<int>(ball.degree()));
  if (b.radius > ball.radius()) {
    throw PreconditionError("ball bound: needs |B(" + std::to_string(b.radius) +
                            ")| but the ball stops at radius " + std::to_string(ball.radius()));
  }
  b.ball_size = ball.ball_size(b.radius);
  b.value = std::ceil(double(b.ball_size) / 2);
  return b;
}

GrowthTemplate folner_growth_template(const Ball& ball) {
  if (ball.radius() < 1) throw PreconditionError("growth template: ball radius must be >= 1");
  GrowthTemplate g;
  g.radius = ball.radius();
  g.kappa = INFINITY;
  for (int k = 1; k <= ball.radius(); ++k) {
    g.kappa = std::min(g.kappa, std::log(double(ball.ball_size(k))) / k);
  }
  const double S4 = 4.0 * double(ball.degree());
  using namespace expr;
  auto e = mul(constant(0.5 * std::exp(-g.kappa)), exp(mul(constant(g.kappa / S4), var())));
  g.F = MonotoneFn::expression(e, Monotonicity::increasing, 0.0, 1e6, "growth minorant of Fo");
  return g;
}

nlohmann::json FolnerCouple::to_json() const {
  return {{"n", n},
          {"family", family},
          {"outer_size", outer_size},
          {"inner_size", inner_size},
          {"distance", distance},
          {"distance_measured", distance_measured},
          {"C", C},
          {"epsilon", epsilon},
          {"lambda1", lambda1},
          {"alpha", alpha}};
}

int couple_distance(const Group& group, const GeneratingSet& gens,
                    std::span<const Element> outer, std::span<const Element> inner) {
  ElementMap<int> dist;
  dist.reserve(outer.size() * 2);
  for (const auto& x : outer) dist.emplace(x, -1);
  std::deque<Element> queue;
  for (const auto& x : inner) {
    auto it = dist.find(x);
    if (it == dist.end()) throw PreconditionError("couple: inner set not contained in outer set");
    if (it->second < 0) {
      it->second = 0;
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    Element x = std::move(queue.front());
    queue.pop_front();
    const int dx = dist.at(x);
    for (const auto& s : gens.elements) {
      Element y = group.multiply(x, s);
      auto it = dist.find(y);
      if (it == dist.end()) return dx + 1;
      if (it->second < 0) {
        it->second = dx + 1;
        queue.push_back(std::move(y));
      }
    }
  }
  throw PreconditionError("couple: outer set has no exit (finite group?)");
}

FolnerCouple folner_couple(const Measure& mu, int n, const CoupleOptions& options) {
  if (n < 1) throw PreconditionError("couple: n must be positive");
  const Group& G = mu.group();
  const GroupSpec& spec = G.spec();
  FolnerCouple c;
  c.n = n;
  c.epsilon = 1;
  c.distance = n + 1;
  const std::int64_t N = n;
  std::function<std::vector<Element>()> outer_fn, inner_fn;
  if (spec.family == Family::free_abelian) {
    const int d = spec.rank;
    c.family = "free_abelian";
    c.C = std::pow(2.0, d);
    c.outer_size = static_cast<std::size_t>(std::pow(4.0 * n + 1, d));
    c.inner_size = static_cast<std::size_t>(std::pow(2.0 * n + 1, d));
    outer_fn = [&] { return box_elements(G, std::vector<std::int64_t>(d, -2 * N), std::vector<std::int64_t>(d, 2 * N)); };
    inner_fn = [&] { return box_elements(G, std::vector<std::int64_t>(d, -N), std::vector<std::int64_t>(d, N)); };
  } else if (spec.family == Family::heisenberg) {
    c.family = "heisenberg";
    c.C = 16;
    c.outer_size = static_cast<std::size_t>((4 * N + 1) * (4 * N + 1) * (8 * N * N + 1));
    c.inner_size = static_cast<std::size_t>((2 * N + 1) * (2 * N + 1) * (2 * N * N + 1));
    outer_fn = [&] { return box_elements(G, {-2 * N, -2 * N, -4 * N * N}, {2 * N, 2 * N, 4 * N * N}); };
    inner_fn = [&] { return box_elements(G, {-N, -N, -N * N}, {N, N, N * N}); };
  } else if (is_lamplighter(spec)) {
    c.family = "lamplighter";
    c.C = 2;
    const double lamps = std::pow(double(spec.lamp->order), 4 * n + 1);
    if (lamps * (4 * n + 1) > 1e18) throw ResourceError("couple: size overflows", n);
    c.outer_size = static_cast<std::size_t>(lamps * (4 * n + 1));
    c.inner_size = static_cast<std::size_t>(lamps * (2 * n + 1));
    outer_fn = [&] { return lamp_window(G, -2 * N, 2 * N, -2 * N, 2 * N); };
    inner_fn = [&] { return lamp_window(G, -2 * N, 2 * N, -N, N); };
  } else {
    throw PreconditionError("couple: no construction for " + spec.name());
  }

  const bool explicit_sets = c.outer_size <= options.explicit_cap;
  if (explicit_sets) {
    auto outer = outer_fn();
    auto inner = inner_fn();
    c.distance = couple_distance(G, G.standard_generators(), outer, inner);
    c.distance_measured = true;
    if (c.family == "lamplighter" && lamp_compatible(mu)) {
      c.lambda1 = LampBox::lambda1(mu, 4 * n + 1);
    } else {
      c.lambda1 = lambda1_of(mu, outer);
    }
    if (options.keep_sets) {
      c.outer = std::move(outer);
      c.inner = std::move(inner);
    }
  } else if (c.family == "lamplighter" && lamp_compatible(mu)) {
    c.lambda1 = LampBox::lambda1(mu, 4 * n + 1);
  } else {
    throw ResourceError("couple: Omega_n has " + std::to_string(c.outer_size) +
                            " elements, above the explicit cap",
                        n - 1);
  }
  c.alpha = c.lambda1 * double(n) * n;
  if (double(c.outer_size) > c.C * double(c.inner_size)) {
    throw InvariantError("couple: |Omega_n| > C |omega_n| at n = " + std::to_string(n));
  }
  if (!(c.distance > c.epsilon * n)) {
    throw InvariantError("couple: distance " + std::to_string(c.distance) + " <= eps n at n = " +
                         std::to_string(n));
  }
  return c;
}

SquaringCheck squaring_condition(const LogFn& log_F, double r_lo, double r_hi, double C_max) {
  SquaringCheck out;
  for (int k = 1; 1 + 0.05 * k <= C_max + 1e-12; ++k) {
    const double C = 1 + 0.05 * k;
    if (r_hi / C < r_lo) break;
    bool ok = true;
    for (double r : log_grid(r_lo, r_hi / C, 50, 100)) {
      if (log_F(C * r) < 2 * log_F(r) - 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.pass = true;
      out.C = C;
      out.detail = "F(Cr) >= F(r)^2 on [" + std::to_string(r_lo) + ", " + std::to_string(r_hi / C) + "]";
      return out;
    }
  }
  out.detail = "no C in (1, " + std::to_string(C_max) + "] with F(Cr) >= F(r)^2 on the range";
  return out;
}

nlohmann::json BoundTemplate::to_json() const {
  return {{"accepted", accepted},
          {"reason", reason},
          {"squaring_pass", squaring.pass},
          {"squaring_C", squaring.C},
          {"squaring_detail", squaring.detail},
          {"alpha", alpha},
          {"template", fn ? fn->describe() : std::string()}};
}

BoundTemplate n_lower_from_couples(std::span<const FolnerCouple> couples, double alpha,
                                   const TemplateOptions& options) {
  BoundTemplate t;
  if (couples.size() < 2) {
    t.reason = "at least two couples are needed to check F(Cr) >= F(r)^2";
    return t;
  }
  std::vector<double> logF;
  double measured = 0;
  for (std::size_t i = 0; i < couples.size(); ++i) {
    if (couples[i].n != static_cast<int>(i + 1)) {
      throw PreconditionError("couples must be given for n = 1, 2, ... in order");
    }
    if (i > 0 && couples[i].outer_size <= couples[i - 1].outer_size) {
      t.reason = "|Omega_n| is not strictly increasing";
      return t;
    }
    logF.push_back(std::log(double(couples[i].outer_size)));
    measured = std::max(measured, couples[i].alpha);
  }
  t.alpha = alpha > 0 ? alpha : measured;
  if (t.alpha < measured * (1 - 1e-12)) {
    t.reason = "lambda_1(Omega_n) <= alpha / n^2 fails for the given alpha";
    return t;
  }
  const double n_max = double(couples.size());
  auto log_F = [logF, n_max](double r) -> double {
    if (r < 1 || r > n_max) return NAN;
    std::size_t i = std::min(static_cast<std::size_t>(r) - 1, logF.size() - 2);
    const double th = r - double(i + 1);
    // log((1 - th) F_i + th F_{i+1}) without overflow
    const double a = logF[i], b = logF[i + 1];
    if (th <= 0) return a;
    return b + std::log(th + (1 - th) * std::exp(a - b));
  };
  t.squaring = squaring_condition(log_F, 1.0, n_max, options.C_max);
  if (!t.squaring.pass && options.require_squaring) {
    t.reason = "squaring condition fails: " + t.squaring.detail;
    return t;
  }
  t.accepted = true;
  t.reason = t.squaring.pass ? "conditions hold on the measured range"
                             : "squaring condition fails, template produced on request";
  auto f = [log_F](double l) { return std::exp(-log_F(1 / std::sqrt(l))); };
  auto lf = [log_F](double l) { return -log_F(1 / std::sqrt(l)); };
  t.fn = MonotoneFn::callable(f, Monotonicity::increasing, 1 / (n_max * n_max), 1.0,
                              "1/F(lambda^-1/2), F from couples", lf);
  return t;
}

BoundTemplate n_upper_from_folner(const MonotoneFn& F, Window radii, const TemplateOptions& options) {
  BoundTemplate t;
  if (!F.increasing()) throw PreconditionError("upper template: F must be increasing");
  if (!(radii.lo > 0 && radii.hi > radii.lo)) throw PreconditionError("upper template: bad window");
  t.alpha = 1;
  LogFn log_F = [&F](double r) { return F.log_value(r); };
  t.squaring = squaring_condition(log_F, radii.lo, radii.hi, options.C_max);
  if (!t.squaring.pass && options.require_squaring) {
    t.reason = "squaring condition fails: " + t.squaring.detail;
    return t;
  }
  t.accepted = true;
  t.reason = t.squaring.pass ? "squaring condition holds on the window"
                             : "squaring condition fails, template produced on request";
  MonotoneFn Fc = F;
  auto f = [Fc](double l) { return std::exp(-Fc.log_value(1 / std::sqrt(l))); };
  auto lf = [Fc](double l) { return -Fc.log_value(1 / std::sqrt(l)); };
  t.fn = MonotoneFn::callable(f, Monotonicity::increasing, 1 / (radii.hi * radii.hi),
                              1 / (radii.lo * radii.lo), "1/F(lambda^-1/2), F = " + F.name(), lf);
  return t;
}

}  // namespace isospec
