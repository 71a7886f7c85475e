#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alexrealize/poset.hpp"

namespace alexrealize {

/// Finite simple undirected graph with string vertex identifiers.
class SimpleGraph {
 public:
  using Edge = std::pair<Index, Index>;

  SimpleGraph() = default;
  /// Throws InvalidInput on loops, duplicate edges or unknown endpoints.
  SimpleGraph(std::vector<std::string> vertices,
              const std::vector<std::pair<std::string, std::string>>& edges);
  static SimpleGraph from_index_edges(std::vector<std::string> vertices,
                                      const std::vector<Edge>& edges);

  std::size_t order() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::string>& vertices() const noexcept { return ids_; }
  const std::string& id(Index v) const { return ids_.at(v); }
  Index index(std::string_view id) const;
  std::optional<Index> find(std::string_view id) const;

  std::span<const Index> neighbors(Index v) const { return adj_[v]; }
  std::size_t degree(Index v) const { return adj_[v].size(); }
  bool adjacent(Index a, Index b) const;
  /// Edges with a < b, sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  void build(std::vector<std::string> vertices, std::vector<Edge> edges);

  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
  std::vector<std::vector<Index>> adj_;
  std::vector<Edge> edges_;
};

SimpleGraph complete_graph(std::size_t n);
SimpleGraph path_graph(std::size_t n);
SimpleGraph cycle_graph(std::size_t n);

/// Vertex set V(G) x V(H); (g,h) ~ (g',h') iff they differ in exactly one
/// coordinate and are adjacent there. Vertex ids are "(g,h)".
SimpleGraph cartesian_product(const SimpleGraph& g, const SimpleGraph& h);

/// Identifier of the product vertex built from `a` and `b`.
std::string product_vertex_id(std::string_view a, std::string_view b);

std::size_t min_degree(const SimpleGraph& g);
bool is_connected(const SimpleGraph& g);

struct FactorizationOptions {
  std::size_t max_vertices = 30;
};

/// Prime factors under the Cartesian product, canonically ordered (by vertex
/// count, then canonical form). Throws CapExceeded above the size bound and
/// InvalidInput on disconnected input. K1 factors to the empty list.
std::vector<SimpleGraph> prime_factorization(const SimpleGraph& g,
                                             const FactorizationOptions& opts = {});
bool is_prime(const SimpleGraph& g, const FactorizationOptions& opts = {});

struct RigidPrimeOptions {
  std::size_t max_vertices = 7;
};

/// The first `count` connected asymmetric prime graphs, ordered by vertex
/// count and then canonical form. Throws CapExceeded if fewer exist within
/// the vertex bound.
std::vector<SimpleGraph> enumerate_rigid_primes(std::size_t count,
                                                const RigidPrimeOptions& opts = {});

struct IncidencePoset {
  Poset poset;
  /// Vertex index of the graph -> element index in the poset.
  std::vector<Index> vertex_embedding;
  /// Edge position (in SimpleGraph::edges()) -> element index.
  std::vector<Index> edge_embedding;
};

/// Height-1 poset on V(G) and E(G), v < e iff v is an endpoint of e.
/// Vertex elements keep the vertex id; edge elements are "{a|b}".
IncidencePoset incidence_poset(const SimpleGraph& g);

std::string edge_element_id(std::string_view a, std::string_view b);

/// Upper-triangle adjacency bit string of the graph under the given vertex order.
std::string adjacency_word(const SimpleGraph& g, std::span<const Index> order);

}  // namespace alexrealize
