#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace isospec {

enum class Family { free_abelian, heisenberg, cyclic, wreath, iterated_wreath };

/// Concrete finitely generated group family.
///
/// Wreath products take a lamp group (finite cyclic or Z) over the base Z^d.
/// Iterated wreath products Z_q wr (Z_q wr Z) are limited to depth 2.
struct GroupSpec {
  Family family = Family::free_abelian;
  int rank = 1;   // free_abelian: d; wreath: rank of the base Z^d
  int order = 0;  // cyclic: q; iterated_wreath: lamp order q
  int depth = 0;  // iterated_wreath only
  std::shared_ptr<const GroupSpec> lamp;  // wreath only

  static GroupSpec free_abelian(int d);
  static GroupSpec heisenberg();
  static GroupSpec cyclic(int q);
  static GroupSpec wreath(const GroupSpec& lamp, int base_rank);
  static GroupSpec iterated_wreath(int depth, int q);

  bool is_infinite() const { return family != Family::cyclic; }
  std::string name() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b);
};

nlohmann::json to_json(const GroupSpec& spec);
GroupSpec group_spec_from_json(const nlohmann::json& j);

/// Canonical normal form of a group element as a flat integer code.
///
/// Equality of elements is equality of codes; the lexicographic order on
/// codes is the canonical order used for BFS layers and sparse supports.
///   free_abelian: (x_1, ..., x_d)
///   heisenberg:   (a, b, c) for the matrix [[1,a,c],[0,1,b],[0,0,1]]
///   cyclic:       (k) with 0 <= k < q
///   wreath:       (|cursor|, cursor..., then per non-identity lamp sorted by
///                  position: |pos|, pos..., |value|, value...)
struct Element {
  std::vector<std::int64_t> code;

  friend bool operator==(const Element&, const Element&) = default;
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
    return a.code <=> b.code;
  }
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

template <class V>
using ElementMap = std::unordered_map<Element, V, ElementHash>;

struct GeneratingSet {
  std::vector<Element> elements;
  bool symmetric = false;

  std::size_t size() const { return elements.size(); }
};

class GroupImpl;

/// Value handle on a group family: exact multiplication, inversion and the
/// canonical generating set. Immutable and cheap to copy.
class Group {
 public:
  explicit Group(const GroupSpec& spec);

  const GroupSpec& spec() const { return spec_; }

  Element identity() const;
  Element multiply(const Element& g, const Element& h) const;
  Element inverse(const Element& g) const;
  bool is_identity(const Element& g) const;

  /// Throws StructuralError when `g` is not a normal form of this family.
  void validate(const Element& g) const;

  GeneratingSet standard_generators() const;
  /// Adds missing inverses, drops the identity and duplicates; keeps the
  /// first-occurrence order.
  GeneratingSet symmetrize(std::span<const Element> elements) const;
  bool is_symmetric(std::span<const Element> elements) const;

  /// Product of the letters from left to right.
  Element evaluate_word(std::span<const Element> letters) const;

  std::string format(const Element& g) const;
  nlohmann::json element_to_json(const Element& g) const;
  Element element_from_json(const nlohmann::json& j) const;

  // Family-specific constructors used by tests, candidate families and
  // the CLI. They throw StructuralError for the wrong family.
  Element make_vector(std::span<const std::int64_t> coords) const;  // Z^d, Heisenberg (a,b,c), cyclic (k)
  /// Wreath element from lamp entries (position code, value code) and cursor.
  Element make_wreath(
      const std::vector<std::pair<Element, Element>>& lamps,
      const Element& cursor) const;
  /// Wreath accessors.
  Element wreath_cursor(const Element& g) const;
  std::vector<std::pair<Element, Element>> wreath_lamps(const Element& g) const;
  Group lamp_group() const;
  Group base_group() const;

 private:
  Group(GroupSpec spec, std::shared_ptr<const GroupImpl> impl);
  GroupSpec spec_;
  std::shared_ptr<const GroupImpl> impl_;
};

struct BallOptions {
  std::size_t max_elements = 50'000'000;
};

/// Indexed metric ball B(r) in BFS order: layer by layer, lexicographic on
/// the normal form inside a layer. Element 0 is the identity.
class Ball {
 public:
  static constexpr std::int64_t kOutside = -1;

  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t degree() const { return degree_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  /// Layer k occupies [layer_begin(k), layer_begin(k + 1)).
  std::size_t layer_begin(int k) const { return layer_start_.at(k); }
  std::size_t layer_size(int k) const {
    return layer_start_.at(k + 1) - layer_start_.at(k);
  }
  /// Prefix of the ball holding B(k).
  std::size_t ball_size(int k) const { return layer_start_.at(k + 1); }

  std::optional<std::size_t> find(const Element& g) const;
  /// Index of elements()[i] * S[s], or kOutside.
  std::int64_t neighbor(std::size_t i, std::size_t s) const {
    return adjacency_[i * degree_ + s];
  }

 private:
  friend Ball make_ball(const Group&, const GeneratingSet&, int,
                        const BallOptions&);
  int radius_ = 0;
  std::size_t degree_ = 0;
  std::vector<Element> elements_;
  std::vector<std::size_t> layer_start_;
  std::vector<std::int64_t> adjacency_;
  ElementMap<std::size_t> index_;
};

/// BFS enumeration of {g : |g|_S <= r}. Throws ResourceError carrying the
/// last completed layer when the element cap is exceeded.
Ball make_ball(const Group& group, const GeneratingSet& gens, int radius,
               const BallOptions& options = {});

/// {x in omega : x s not in omega for some s in S}, sorted canonically.
std::vector<Element> boundary(const Group& group, const GeneratingSet& gens,
                              std::span<const Element> omega);

/// Canonically sorted, duplicate-free copy.
std::vector<Element> canonical_set(std::span<const Element> elements);

}  // namespace isospec
