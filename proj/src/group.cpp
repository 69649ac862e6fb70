#include "isospec/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "isospec/errors.hpp"

namespace isospec {

using Code = std::vector<std::int64_t>;

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::free_abelian(int d) {
  if (d < 1) throw PreconditionError("free_abelian: d must be >= 1");
  GroupSpec s;
  s.family = Family::free_abelian;
  s.rank = d;
  return s;
}

GroupSpec GroupSpec::heisenberg() {
  GroupSpec s;
  s.family = Family::heisenberg;
  s.rank = 0;
  return s;
}

GroupSpec GroupSpec::cyclic(int q) {
  if (q < 2) throw PreconditionError("cyclic: order must be >= 2");
  GroupSpec s;
  s.family = Family::cyclic;
  s.rank = 0;
  s.order = q;
  return s;
}

GroupSpec GroupSpec::wreath(const GroupSpec& lamp, int base_rank) {
  bool ok = lamp.family == Family::cyclic ||
            (lamp.family == Family::free_abelian && lamp.rank == 1);
  if (!ok) {
    throw PreconditionError(
        "wreath: lamp group must be finite cyclic or free_abelian with d=1");
  }
  if (base_rank < 1) throw PreconditionError("wreath: base rank must be >= 1");
  GroupSpec s;
  s.family = Family::wreath;
  s.rank = base_rank;
  s.lamp = std::make_shared<GroupSpec>(lamp);
  return s;
}

GroupSpec GroupSpec::iterated_wreath(int depth, int q) {
  if (depth < 1 || depth > 2) {
    throw PreconditionError("iterated_wreath: depth must be 1 or 2");
  }
  if (q < 2) throw PreconditionError("iterated_wreath: order must be >= 2");
  GroupSpec s;
  s.family = Family::iterated_wreath;
  s.rank = 1;
  s.order = q;
  s.depth = depth;
  return s;
}

std::string GroupSpec::name() const {
  switch (family) {
    case Family::free_abelian:
      return rank == 1 ? "Z" : "Z^" + std::to_string(rank);
    case Family::heisenberg:
      return "H3(Z)";
    case Family::cyclic:
      return "Z_" + std::to_string(order);
    case Family::wreath:
      return lamp->name() + " wr " +
             (rank == 1 ? std::string("Z") : "Z^" + std::to_string(rank));
    case Family::iterated_wreath: {
      std::string q = "Z_" + std::to_string(order);
      std::string s = q + " wr Z";
      for (int k = 1; k < depth; ++k) s = q + " wr (" + s + ")";
      return s;
    }
  }
  return "?";
}

bool operator==(const GroupSpec& a, const GroupSpec& b) {
  if (a.family != b.family) return false;
  switch (a.family) {
    case Family::free_abelian:
      return a.rank == b.rank;
    case Family::heisenberg:
      return true;
    case Family::cyclic:
      return a.order == b.order;
    case Family::wreath:
      return a.rank == b.rank && *a.lamp == *b.lamp;
    case Family::iterated_wreath:
      return a.order == b.order && a.depth == b.depth;
  }
  return false;
}

nlohmann::json to_json(const GroupSpec& s) {
  using nlohmann::json;
  switch (s.family) {
    case Family::free_abelian:
      return json{{"family", "free_abelian"}, {"d", s.rank}};
    case Family::heisenberg:
      return json{{"family", "heisenberg"}};
    case Family::cyclic:
      return json{{"family", "cyclic"}, {"q", s.order}};
    case Family::wreath:
      return json{{"family", "wreath"}, {"lamp", to_json(*s.lamp)}, {"d", s.rank}};
    case Family::iterated_wreath:
      return json{{"family", "iterated_wreath"}, {"depth", s.depth}, {"q", s.order}};
  }
  return {};
}

namespace {

int json_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw PreconditionError(std::string("group spec: missing integer field '") +
                            key + "'");
  }
  return j.at(key).get<int>();
}

}  // namespace

GroupSpec group_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw PreconditionError("group spec: expected an object with a 'family' string");
  }
  const std::string f = j.at("family").get<std::string>();
  if (f == "free_abelian") return GroupSpec::free_abelian(json_int(j, "d"));
  if (f == "heisenberg") return GroupSpec::heisenberg();
  if (f == "cyclic") return GroupSpec::cyclic(json_int(j, "q"));
  if (f == "wreath") {
    if (!j.contains("lamp")) throw PreconditionError("group spec: wreath needs 'lamp'");
    int d = j.contains("d") ? json_int(j, "d") : 1;
    return GroupSpec::wreath(group_spec_from_json(j.at("lamp")), d);
  }
  if (f == "iterated_wreath") {
    return GroupSpec::iterated_wreath(json_int(j, "depth"), json_int(j, "q"));
  }
  throw PreconditionError("group spec: unknown family '" + f + "'");
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ e.code.size();
  for (std::int64_t v : e.code) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// Family implementations

class GroupImpl {
 public:
  virtual ~GroupImpl() = default;
  virtual Code identity() const = 0;
  virtual Code multiply(const Code& g, const Code& h) const = 0;
  virtual Code inverse(const Code& g) const = 0;
  virtual void validate(const Code& g) const = 0;
  virtual std::vector<Code> generators() const = 0;
  virtual std::string format(const Code& g) const = 0;
  virtual nlohmann::json to_json(const Code& g) const = 0;
  virtual Code from_json(const nlohmann::json& j) const = 0;
};

namespace {

std::string join_codes(const Code& c) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

Code int_array(const nlohmann::json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw StructuralError(std::string(what) + ": expected an array of " +
                          std::to_string(n) + " integers");
  }
  Code c;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw StructuralError(std::string(what) + ": non-integer entry");
    c.push_back(v.get<std::int64_t>());
  }
  return c;
}

class FreeAbelian final : public GroupImpl {
 public:
  explicit FreeAbelian(int d) : d_(d) {}
  Code identity() const override { return Code(d_, 0); }
  Code multiply(const Code& g, const Code& h) const override {
    Code r(d_);
    for (int i = 0; i < d_; ++i) r[i] = g[i] + h[i];
    return r;
  }
  Code inverse(const Code& g) const override {
    Code r(d_);
    for (int i = 0; i < d_; ++i) r[i] = -g[i];
    return r;
  }
  void validate(const Code& g) const override {
    if (static_cast<int>(g.size()) != d_) {
      throw StructuralError("Z^" + std::to_string(d_) + ": element has " +
                            std::to_string(g.size()) + " coordinates");
    }
  }
  std::vector<Code> generators() const override {
    std::vector<Code> s;
    for (int i = 0; i < d_; ++i) {
      Code p(d_, 0), m(d_, 0);
      p[i] = 1;
      m[i] = -1;
      s.push_back(p);
      s.push_back(m);
    }
    return s;
  }
  std::string format(const Code& g) const override { return join_codes(g); }
  nlohmann::json to_json(const Code& g) const override { return g; }
  Code from_json(const nlohmann::json& j) const override {
    return int_array(j, d_, "free_abelian element");
  }

 private:
  int d_;
};

// (a,b,c) <-> [[1,a,c],[0,1,b],[0,0,1]]
class Heisenberg final : public GroupImpl {
 public:
  Code identity() const override { return {0, 0, 0}; }
  Code multiply(const Code& g, const Code& h) const override {
    return {g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]};
  }
  Code inverse(const Code& g) const override {
    return {-g[0], -g[1], g[0] * g[1] - g[2]};
  }
  void validate(const Code& g) const override {
    if (g.size() != 3) throw StructuralError("heisenberg: element must be a triple");
  }
  std::vector<Code> generators() const override {
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  }
  std::string format(const Code& g) const override { return join_codes(g); }
  nlohmann::json to_json(const Code& g) const override { return g; }
  Code from_json(const nlohmann::json& j) const override {
    return int_array(j, 3, "heisenberg element");
  }
};

class Cyclic final : public GroupImpl {
 public:
  explicit Cyclic(int q) : q_(q) {}
  Code identity() const override { return {0}; }
  Code multiply(const Code& g, const Code& h) const override {
    return {(g[0] + h[0]) % q_};
  }
  Code inverse(const Code& g) const override { return {(q_ - g[0]) % q_}; }
  void validate(const Code& g) const override {
    if (g.size() != 1 || g[0] < 0 || g[0] >= q_) {
      throw StructuralError("Z_" + std::to_string(q_) + ": element must be k with 0 <= k < q");
    }
  }
  std::vector<Code> generators() const override {
    if (q_ == 2) return {{1}};
    return {{1}, {q_ - 1}};
  }
  std::string format(const Code& g) const override { return std::to_string(g[0]); }
  nlohmann::json to_json(const Code& g) const override { return g[0]; }
  Code from_json(const nlohmann::json& j) const override {
    if (!j.is_number_integer()) throw StructuralError("cyclic element must be an integer");
    Code c{j.get<std::int64_t>()};
    validate(c);
    return c;
  }

 private:
  int q_;
};

// Lamp configurations are sorted (position, value) lists without identity values.
struct WreathParts {
  Code cursor;
  std::vector<std::pair<Code, Code>> lamps;
};

class Wreath final : public GroupImpl {
 public:
  Wreath(std::shared_ptr<const GroupImpl> lamp, std::shared_ptr<const GroupImpl> base)
      : lamp_(std::move(lamp)), base_(std::move(base)),
        lamp_e_(lamp_->identity()), base_e_(base_->identity()) {}

  static WreathParts decode(const Code& g) {
    WreathParts p;
    std::size_t i = 0;
    auto take = [&](Code& out) {
      if (i >= g.size()) throw StructuralError("wreath: truncated element code");
      auto n = g[i++];
      if (n < 0 || i + static_cast<std::size_t>(n) > g.size()) {
        throw StructuralError("wreath: malformed element code");
      }
      out.assign(g.begin() + static_cast<std::ptrdiff_t>(i),
                 g.begin() + static_cast<std::ptrdiff_t>(i + n));
      i += static_cast<std::size_t>(n);
    };
    take(p.cursor);
    while (i < g.size()) {
      Code pos, val;
      take(pos);
      take(val);
      p.lamps.emplace_back(std::move(pos), std::move(val));
    }
    return p;
  }

  static Code encode(const WreathParts& p) {
    Code c;
    auto put = [&](const Code& x) {
      c.push_back(static_cast<std::int64_t>(x.size()));
      c.insert(c.end(), x.begin(), x.end());
    };
    put(p.cursor);
    for (const auto& [pos, val] : p.lamps) {
      put(pos);
      put(val);
    }
    return c;
  }

  Code identity() const override { return encode({base_e_, {}}); }

  // (f,x)(g,y) = (f + x.g, xy) with (x.g)(z) = g(x^{-1} z)
  Code multiply(const Code& a, const Code& b) const override {
    WreathParts f = decode(a), g = decode(b);
    std::map<Code, Code> lamps(f.lamps.begin(), f.lamps.end());
    for (auto& [pos, val] : g.lamps) {
      Code z = base_->multiply(f.cursor, pos);
      auto it = lamps.find(z);
      if (it == lamps.end()) {
        lamps.emplace(std::move(z), val);
      } else {
        it->second = lamp_->multiply(it->second, val);
        if (it->second == lamp_e_) lamps.erase(it);
      }
    }
    WreathParts r;
    r.cursor = base_->multiply(f.cursor, g.cursor);
    r.lamps.assign(lamps.begin(), lamps.end());
    return encode(r);
  }

  // (f,x)^{-1} = (x^{-1}.f^{-1}, x^{-1})
  Code inverse(const Code& a) const override {
    WreathParts f = decode(a);
    WreathParts r;
    r.cursor = base_->inverse(f.cursor);
    for (auto& [pos, val] : f.lamps) {
      r.lamps.emplace_back(base_->multiply(r.cursor, pos), lamp_->inverse(val));
    }
    std::sort(r.lamps.begin(), r.lamps.end());
    return encode(r);
  }

  void validate(const Code& a) const override {
    WreathParts p = decode(a);
    base_->validate(p.cursor);
    for (std::size_t i = 0; i < p.lamps.size(); ++i) {
      base_->validate(p.lamps[i].first);
      lamp_->validate(p.lamps[i].second);
      if (p.lamps[i].second == lamp_e_) {
        throw StructuralError("wreath: lamp configuration stores an identity value");
      }
      if (i > 0 && !(p.lamps[i - 1].first < p.lamps[i].first)) {
        throw StructuralError("wreath: lamp positions not strictly sorted");
      }
    }
  }

  std::vector<Code> generators() const override {
    std::vector<Code> s;
    for (auto& l : lamp_->generators()) s.push_back(encode({base_e_, {{base_e_, l}}}));
    for (auto& b : base_->generators()) s.push_back(encode({b, {}}));
    return s;
  }

  std::string format(const Code& a) const override {
    WreathParts p = decode(a);
    std::ostringstream os;
    os << '[' << base_->format(p.cursor) << ';';
    for (std::size_t i = 0; i < p.lamps.size(); ++i) {
      os << (i ? ", " : " ") << base_->format(p.lamps[i].first) << ':'
         << lamp_->format(p.lamps[i].second);
    }
    os << ']';
    return os.str();
  }

  nlohmann::json to_json(const Code& a) const override {
    WreathParts p = decode(a);
    nlohmann::json lamps = nlohmann::json::array();
    for (auto& [pos, val] : p.lamps) {
      lamps.push_back({base_->to_json(pos), lamp_->to_json(val)});
    }
    return {{"cursor", base_->to_json(p.cursor)}, {"lamps", lamps}};
  }

  Code from_json(const nlohmann::json& j) const override {
    if (!j.is_object() || !j.contains("cursor")) {
      throw StructuralError("wreath element: expected {\"cursor\":..., \"lamps\":[...]}");
    }
    WreathParts p;
    p.cursor = base_->from_json(j.at("cursor"));
    if (j.contains("lamps")) {
      for (const auto& e : j.at("lamps")) {
        if (!e.is_array() || e.size() != 2) {
          throw StructuralError("wreath element: lamp entries are [position, value]");
        }
        Code val = lamp_->from_json(e[1]);
        if (val != lamp_e_) p.lamps.emplace_back(base_->from_json(e[0]), std::move(val));
      }
    }
    std::sort(p.lamps.begin(), p.lamps.end());
    for (std::size_t i = 1; i < p.lamps.size(); ++i) {
      if (p.lamps[i - 1].first == p.lamps[i].first) {
        throw StructuralError("wreath element: repeated lamp position");
      }
    }
    return encode(p);
  }

  const std::shared_ptr<const GroupImpl>& lamp() const { return lamp_; }
  const std::shared_ptr<const GroupImpl>& base() const { return base_; }

 private:
  std::shared_ptr<const GroupImpl> lamp_, base_;
  Code lamp_e_, base_e_;
};

std::shared_ptr<const GroupImpl> make_impl(const GroupSpec& s) {
  switch (s.family) {
    case Family::free_abelian:
      return std::make_shared<FreeAbelian>(s.rank);
    case Family::heisenberg:
      return std::make_shared<Heisenberg>();
    case Family::cyclic:
      return std::make_shared<Cyclic>(s.order);
    case Family::wreath:
      return std::make_shared<Wreath>(make_impl(*s.lamp),
                                      std::make_shared<FreeAbelian>(s.rank));
    case Family::iterated_wreath: {
      auto lamp = std::make_shared<Cyclic>(s.order);
      std::shared_ptr<const GroupImpl> g =
          std::make_shared<Wreath>(lamp, std::make_shared<FreeAbelian>(1));
      for (int k = 1; k < s.depth; ++k) g = std::make_shared<Wreath>(lamp, g);
      return g;
    }
  }
  throw PreconditionError("unknown group family");
}

GroupSpec lamp_spec_of(const GroupSpec& s) {
  if (s.family == Family::wreath) return *s.lamp;
  if (s.family == Family::iterated_wreath) return GroupSpec::cyclic(s.order);
  throw StructuralError(s.name() + " is not a wreath product");
}

}  // namespace

// ---------------------------------------------------------------------------
// Group

Group::Group(const GroupSpec& spec) : spec_(spec), impl_(make_impl(spec)) {}

Group::Group(GroupSpec spec, std::shared_ptr<const GroupImpl> impl)
    : spec_(std::move(spec)), impl_(std::move(impl)) {}

Element Group::identity() const { return {impl_->identity()}; }

Element Group::multiply(const Element& g, const Element& h) const {
  return {impl_->multiply(g.code, h.code)};
}

Element Group::inverse(const Element& g) const { return {impl_->inverse(g.code)}; }

bool Group::is_identity(const Element& g) const { return g.code == impl_->identity(); }

void Group::validate(const Element& g) const { impl_->validate(g.code); }

GeneratingSet Group::standard_generators() const {
  GeneratingSet s;
  for (auto& c : impl_->generators()) s.elements.push_back({std::move(c)});
  s.symmetric = true;
  return s;
}

GeneratingSet Group::symmetrize(std::span<const Element> elements) const {
  GeneratingSet s;
  ElementMap<bool> seen;
  auto add = [&](const Element& g) {
    if (is_identity(g) || seen.count(g)) return;
    seen.emplace(g, true);
    s.elements.push_back(g);
  };
  for (const auto& g : elements) {
    validate(g);
    add(g);
    add(inverse(g));
  }
  s.symmetric = true;
  return s;
}

bool Group::is_symmetric(std::span<const Element> elements) const {
  ElementMap<bool> set;
  for (const auto& g : elements) set.emplace(g, true);
  for (const auto& g : elements) {
    if (!set.count(inverse(g))) return false;
  }
  return true;
}

Element Group::evaluate_word(std::span<const Element> letters) const {
  Element r = identity();
  for (const auto& l : letters) r = multiply(r, l);
  return r;
}

std::string Group::format(const Element& g) const { return impl_->format(g.code); }

nlohmann::json Group::element_to_json(const Element& g) const {
  return impl_->to_json(g.code);
}

Element Group::element_from_json(const nlohmann::json& j) const {
  Element g{impl_->from_json(j)};
  validate(g);
  return g;
}

Element Group::make_vector(std::span<const std::int64_t> coords) const {
  if (spec_.family != Family::free_abelian && spec_.family != Family::heisenberg &&
      spec_.family != Family::cyclic) {
    throw StructuralError(spec_.name() + ": make_vector needs a coordinate family");
  }
  Element g{Code(coords.begin(), coords.end())};
  validate(g);
  return g;
}

Element Group::make_wreath(const std::vector<std::pair<Element, Element>>& lamps,
                           const Element& cursor) const {
  Group lamp = lamp_group(), base = base_group();
  WreathParts p;
  base.validate(cursor);
  p.cursor = cursor.code;
  for (const auto& [pos, val] : lamps) {
    base.validate(pos);
    lamp.validate(val);
    if (!lamp.is_identity(val)) p.lamps.emplace_back(pos.code, val.code);
  }
  std::sort(p.lamps.begin(), p.lamps.end());
  for (std::size_t i = 1; i < p.lamps.size(); ++i) {
    if (p.lamps[i - 1].first == p.lamps[i].first) {
      throw StructuralError("make_wreath: repeated lamp position");
    }
  }
  return {Wreath::encode(p)};
}

Element Group::wreath_cursor(const Element& g) const {
  lamp_spec_of(spec_);
  return {Wreath::decode(g.code).cursor};
}

std::vector<std::pair<Element, Element>> Group::wreath_lamps(const Element& g) const {
  lamp_spec_of(spec_);
  std::vector<std::pair<Element, Element>> r;
  for (auto& [pos, val] : Wreath::decode(g.code).lamps) r.push_back({{pos}, {val}});
  return r;
}

Group Group::lamp_group() const {
  GroupSpec ls = lamp_spec_of(spec_);
  auto w = std::static_pointer_cast<const Wreath>(impl_);
  return Group(ls, w->lamp());
}

Group Group::base_group() const {
  lamp_spec_of(spec_);
  auto w = std::static_pointer_cast<const Wreath>(impl_);
  if (spec_.family == Family::wreath) {
    return Group(GroupSpec::free_abelian(spec_.rank), w->base());
  }
  GroupSpec bs = spec_.depth > 1 ? GroupSpec::iterated_wreath(spec_.depth - 1, spec_.order)
                                 : GroupSpec::free_abelian(1);
  return Group(bs, w->base());
}

// ---------------------------------------------------------------------------
// Balls and boundaries

std::optional<std::size_t> Ball::find(const Element& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Ball make_ball(const Group& group, const GeneratingSet& gens, int radius,
               const BallOptions& options) {
  if (radius < 0) throw PreconditionError("ball: radius must be >= 0");
  if (!group.is_symmetric(gens.elements)) {
    throw PreconditionError("ball: generating set is not symmetric");
  }
  Ball b;
  b.radius_ = radius;
  b.degree_ = gens.size();
  b.elements_.push_back(group.identity());
  b.index_.emplace(group.identity(), 0);
  b.layer_start_ = {0, 1};
  for (int k = 1; k <= radius; ++k) {
    std::size_t lo = b.layer_start_[k - 1], hi = b.layer_start_[k];
    std::vector<Element> layer;
    ElementMap<bool> fresh;
    for (std::size_t i = lo; i < hi; ++i) {
      for (const auto& s : gens.elements) {
        Element x = group.multiply(b.elements_[i], s);
        if (b.index_.count(x) || fresh.count(x)) continue;
        fresh.emplace(x, true);
        layer.push_back(std::move(x));
      }
    }
    if (b.elements_.size() + layer.size() > options.max_elements) {
      throw ResourceError("ball: element cap " + std::to_string(options.max_elements) +
                              " exceeded at layer " + std::to_string(k),
                          k - 1);
    }
    std::sort(layer.begin(), layer.end());
    for (auto& x : layer) {
      b.index_.emplace(x, b.elements_.size());
      b.elements_.push_back(std::move(x));
    }
    b.layer_start_.push_back(b.elements_.size());
  }
  b.adjacency_.assign(b.elements_.size() * b.degree_, Ball::kOutside);
  for (std::size_t i = 0; i < b.elements_.size(); ++i) {
    for (std::size_t s = 0; s < b.degree_; ++s) {
      auto it = b.index_.find(group.multiply(b.elements_[i], gens.elements[s]));
      if (it != b.index_.end()) {
        b.adjacency_[i * b.degree_ + s] = static_cast<std::int64_t>(it->second);
      }
    }
  }
  return b;
}

std::vector<Element> canonical_set(std::span<const Element> elements) {
  std::vector<Element> r(elements.begin(), elements.end());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

std::vector<Element> boundary(const Group& group, const GeneratingSet& gens,
                              std::span<const Element> omega) {
  ElementMap<bool> in;
  for (const auto& x : omega) in.emplace(x, true);
  std::vector<Element> r;
  for (const auto& [x, _] : in) {
    for (const auto& s : gens.elements) {
      if (!in.count(group.multiply(x, s))) {
        r.push_back(x);
        break;
      }
    }
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace isospec
