#pragma once

// Automorphism and isomorphism search for graphs and posets, and the
// permutation-group arithmetic used to compare group actions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alexrealize/graph.hpp"
#include "alexrealize/poset.hpp"

namespace alexrealize {

/// Bijection of a finite domain {0, ..., n-1}; the labelled domain lives in
/// the owning PermGroup or ActionMap.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Index> images);
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return images_.size(); }
  Index operator()(Index x) const { return images_[x]; }
  const std::vector<Index>& images() const noexcept { return images_; }
  bool is_identity() const;

  /// (a * b)(x) = a(b(x)).
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  Permutation inverse() const;
  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  /// Cycle notation over the given labels, e.g. "(a b)(c d e)"; "()" for the
  /// identity.
  std::string cycles(std::span<const std::string> labels) const;

 private:
  std::vector<Index> images_;
};

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept;
};

/// Parses cycle notation "(a b)(c d)" over `labels`. Whitespace separates
/// labels inside a cycle.
Permutation parse_cycles(std::string_view text, std::span<const std::string> labels);

/// Permutation group on a labelled domain, given by generators.
class PermGroup {
 public:
  PermGroup() = default;
  PermGroup(std::vector<std::string> domain, std::vector<Permutation> generators);

  const std::vector<std::string>& domain() const noexcept { return domain_; }
  const std::vector<Permutation>& generators() const noexcept { return gens_; }
  std::size_t degree() const noexcept { return domain_.size(); }

  /// Order certified by the automorphism search that produced this group.
  std::optional<std::uint64_t> certified_order;

 private:
  std::vector<std::string> domain_;
  std::vector<Permutation> gens_;
};

struct SearchOptions {
  std::size_t max_vertices = 2000;
};

/// Full (colour-preserving) automorphism group of a graph. Generators form a
/// strong generating set; the search-certified order is attached.
PermGroup aut_graph(const SimpleGraph& g, const std::vector<int>* colors = nullptr,
                    const SearchOptions& opts = {});

/// Order automorphism group of a poset.
PermGroup aut_poset(const Poset& p, const SearchOptions& opts = {.max_vertices = 200000});

/// A bijection a -> b (indices) or nothing.
std::optional<std::vector<Index>> isomorphic(const Poset& a, const Poset& b,
                                             const SearchOptions& opts = {.max_vertices = 200000});
std::optional<std::vector<Index>> isomorphic(const SimpleGraph& a, const SimpleGraph& b,
                                             const SearchOptions& opts = {});

/// Canonical adjacency word of a small graph (isomorphism invariant, equal
/// iff isomorphic).
std::string canonical_form(const SimpleGraph& g);

bool is_graph_automorphism(const SimpleGraph& g, const Permutation& p);
bool is_poset_automorphism(const Poset& p, const Permutation& f);

struct GroupElements {
  std::vector<Permutation> elements;  ///< elements[0] is the identity
  /// BFS tree over generators: elements[i] = elements[parent[i]] * gen[via[i]].
  std::vector<std::size_t> parent;
  std::vector<std::size_t> via;
};

/// Closure enumeration. Throws CapExceeded above `cap` elements.
GroupElements enumerate_elements(const PermGroup& g, std::size_t cap = 1000000);

std::uint64_t group_order(const PermGroup& g, std::size_t cap = 1000000);

/// Orbits of the group on `subset`, which must be a union of orbits
/// (NotInvariant otherwise). Orbits and their members are sorted.
std::vector<std::vector<Index>> orbits(const PermGroup& g, std::span<const Index> subset);
std::vector<std::vector<Index>> orbits(const PermGroup& g);

/// Homomorphism from a source group into Sym(target), given by the images
/// of the source generators.
struct ActionMap {
  PermGroup source;
  std::vector<std::string> target;
  std::vector<Permutation> images;

  /// Checks that generator relations are respected (the assignment extends
  /// to a homomorphism) by a multiplication check over the source closure.
  bool is_homomorphism(std::size_t cap = 1000000) const;
  /// Image of an arbitrary element of the source group.
  Permutation image_of(const Permutation& source_element, std::size_t cap = 1000000) const;
};

/// Restriction of a group acting on a poset/graph to an invariant subset.
/// The target domain is labelled by the source labels of the subset, in the
/// given order. Throws NotInvariant naming the generator and element.
ActionMap restrict_action(const PermGroup& g, std::span<const Index> subset);

/// Abstract isomorphism between two permutation groups.
struct GroupIsomorphism {
  /// Image in B of each generator of A.
  std::vector<Permutation> generator_images;
  /// Full element correspondence, A's closure order -> element of B.
  std::vector<std::pair<Permutation, Permutation>> table;
};

/// Backtracking over generator images filtered by element orders and
/// conjugacy class sizes; the result is verified on the full multiplication
/// table. Throws CapExceeded if either order exceeds `cap`.
std::optional<GroupIsomorphism> groups_isomorphic(const PermGroup& a, const PermGroup& b,
                                                  std::size_t cap = 512);

/// Identity isomorphism of a group onto itself.
GroupIsomorphism identity_isomorphism(const PermGroup& g, std::size_t cap = 512);

/// True iff phi(g) = rho(iso(g)) for every generator g of phi's source.
/// Throws InvalidInput when the target domains differ.
bool actions_equal(const ActionMap& phi, const ActionMap& rho, const GroupIsomorphism& iso);

}  // namespace alexrealize
