#pragma once

// Finite T0 Alexandroff spaces, represented as finite posets given by their
// Hasse diagram.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace alexrealize {

using Index = std::uint32_t;

/// Immutable finite poset. Elements carry opaque string identifiers; the
/// order is stored as its irredundant cover relation.
class Poset {
 public:
  using CoverPair = std::pair<std::string, std::string>;

  Poset() = default;

  /// Validates: unique identifiers, covers reference known elements, no
  /// self-covers, acyclic, irredundant.
  Poset(std::vector<std::string> elements, const std::vector<CoverPair>& covers);

  /// Same validation as the string constructor, with covers by index.
  static Poset from_index_covers(std::vector<std::string> elements,
                                 std::vector<std::pair<Index, Index>> covers);

  /// Builds the poset generated by an arbitrary set of strict relations
  /// (a < b). Runs transitive reduction; throws if the relations are cyclic.
  static Poset from_relations(std::vector<std::string> elements,
                              const std::vector<std::pair<Index, Index>>& relations);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& elements() const noexcept { return ids_; }
  const std::string& id(Index i) const { return ids_.at(i); }
  Index index(std::string_view id) const;
  std::optional<Index> find(std::string_view id) const;

  std::span<const Index> upper_covers(Index i) const { return up_[i]; }
  std::span<const Index> lower_covers(Index i) const { return down_[i]; }
  std::size_t cover_count() const noexcept { return cover_count_; }
  std::vector<std::pair<Index, Index>> cover_indices() const;
  std::vector<CoverPair> cover_pairs() const;

  /// Elements in a fixed linear extension (bottom to top, ties by index).
  const std::vector<Index>& linear_extension() const noexcept { return topo_; }
  /// Position of each element inside linear_extension().
  const std::vector<Index>& linear_position() const noexcept { return topo_pos_; }

  bool leq(Index x, Index y) const;
  bool leq(std::string_view x, std::string_view y) const;
  bool less(Index x, Index y) const { return x != y && leq(x, y); }

  /// Longest chain ending at each element, in edges.
  const std::vector<std::size_t>& depth_below() const noexcept { return below_; }
  /// Longest chain starting at each element, in edges.
  const std::vector<std::size_t>& depth_above() const noexcept { return above_; }

  bool is_minimal_element(Index i) const { return down_[i].empty(); }
  bool is_maximal_element(Index i) const { return up_[i].empty(); }

  friend bool operator==(const Poset& a, const Poset& b);

 private:
  void build(std::vector<std::string> elements, std::vector<std::pair<Index, Index>> covers,
             bool check_redundancy);

  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
  std::vector<std::vector<Index>> up_;
  std::vector<std::vector<Index>> down_;
  std::vector<Index> topo_;
  std::vector<Index> topo_pos_;
  std::vector<std::size_t> below_;
  std::vector<std::size_t> above_;
  std::size_t cover_count_ = 0;
};

/// Strictly increasing sequence of elements.
struct Chain {
  std::vector<std::string> elements;
  std::size_t length() const { return elements.empty() ? 0 : elements.size() - 1; }
};

/// Height in edges of the longest chain. Throws EmptyInput on the empty poset.
std::size_t height(const Poset& p);

/// Elements covered by exactly one element or covering exactly one element.
std::vector<Index> beat_points(const Poset& p);
bool is_minimal_space(const Poset& p);

/// Iterated beat point removal, always removing the identifier-least beat
/// point first.
Poset core(const Poset& p);

/// Induced subposet on the given elements (order restricted, covers recomputed).
Poset induced_subposet(const Poset& p, std::span<const Index> keep);

/// Strict up-set of every element (sorted indices).
std::vector<std::vector<Index>> strict_up_sets(const Poset& p);

/// Hasse diagram connected as an undirected graph.
bool is_connected(const Poset& p);

std::vector<Index> minimal_elements(const Poset& p);
std::vector<Index> maximal_elements(const Poset& p);

/// Renames elements; `rename` must be injective.
Poset relabel(const Poset& p, const std::vector<std::string>& new_ids);

/// Same elements, reversed order.
Poset opposite(const Poset& p);

struct ChainStats {
  std::vector<std::size_t> below;    ///< longest chain ending at x
  std::vector<std::size_t> above;    ///< longest chain starting at x
  std::vector<std::size_t> through;  ///< longest chain containing x
  std::size_t height = 0;
};

ChainStats chain_stats(const Poset& p);

/// Chains of length height(p). Stops after `limit` chains.
std::vector<Chain> maximum_chains(const Poset& p, std::size_t limit = 1000);

/// Maximal chains (non-extendable), bottom to top as index lists.
std::vector<std::vector<Index>> maximal_chains(const Poset& p, std::size_t limit = 100000);

struct Embedding {
  /// For every element of the source, its index in the result.
  std::vector<Index> map;
};

struct JoinResult {
  Poset poset;
  Embedding left;
  Embedding right;
};

struct JoinOptions {
  std::string left_prefix = "left/";
  std::string right_prefix = "right/";
};

/// Non-Hausdorff join: disjoint union with every element of `p` below every
/// element of `q`.
JoinResult non_hausdorff_join(const Poset& p, const Poset& q, const JoinOptions& opts = {});

struct WedgeResult {
  Poset poset;
  Embedding left;
  Embedding right;
  Index glued = 0;
  std::string glued_id;
};

/// One-point union identifying `p_point` of `p` with `q_point` of `q`. The
/// glued element keeps the left identifier.
WedgeResult wedge(const Poset& p, std::string_view p_point, const Poset& q,
                  std::string_view q_point, const JoinOptions& opts = {});

/// Antichain on n points named prefix0, prefix1, ...
Poset antichain(std::size_t n, std::string_view prefix = "a");

}  // namespace alexrealize
