#include "alexrealize/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "alexrealize/errors.hpp"
#include "alexrealize/symmetry.hpp"

namespace alexrealize {

SimpleGraph::SimpleGraph(std::vector<std::string> vertices,
                         const std::vector<std::pair<std::string, std::string>>& edges) {
  std::unordered_map<std::string, Index> tmp;
  for (Index i = 0; i < vertices.size(); ++i)
    if (!tmp.emplace(vertices[i], i).second)
      throw InvalidInput("duplicate vertex identifier '" + vertices[i] + "'");
  std::vector<Edge> idx;
  idx.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    auto ia = tmp.find(a);
    if (ia == tmp.end()) throw UnknownElement(a);
    auto ib = tmp.find(b);
    if (ib == tmp.end()) throw UnknownElement(b);
    idx.emplace_back(ia->second, ib->second);
  }
  build(std::move(vertices), std::move(idx));
}

SimpleGraph SimpleGraph::from_index_edges(std::vector<std::string> vertices,
                                          const std::vector<Edge>& edges) {
  SimpleGraph g;
  g.build(std::move(vertices), edges);
  return g;
}

void SimpleGraph::build(std::vector<std::string> vertices, std::vector<Edge> edges) {
  ids_ = std::move(vertices);
  const std::size_t n = ids_.size();
  lookup_.clear();
  lookup_.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (!lookup_.emplace(ids_[i], i).second)
      throw InvalidInput("duplicate vertex identifier '" + ids_[i] + "'");
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n) throw InvalidInput("edge references unknown vertex index");
    if (a == b) throw InvalidInput("loop at '" + ids_[a] + "'");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end())
    throw InvalidInput("duplicate edge {" + ids_[it->first] + ", " + ids_[it->second] + "}");
  edges_ = std::move(edges);
  adj_.assign(n, {});
  for (auto [a, b] : edges_) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

Index SimpleGraph::index(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) throw UnknownElement(std::string(id));
  return it->second;
}

std::optional<Index> SimpleGraph::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool SimpleGraph::adjacent(Index a, Index b) const {
  const auto& n = adj_[a];
  return std::binary_search(n.begin(), n.end(), b);
}

namespace {

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

}  // namespace

SimpleGraph complete_graph(std::size_t n) {
  std::vector<SimpleGraph::Edge> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return SimpleGraph::from_index_edges(numbered(n), e);
}

SimpleGraph path_graph(std::size_t n) {
  std::vector<SimpleGraph::Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return SimpleGraph::from_index_edges(numbered(n), e);
}

SimpleGraph cycle_graph(std::size_t n) {
  if (n < 3) throw InvalidInput("cycle needs at least 3 vertices");
  std::vector<SimpleGraph::Edge> e;
  for (Index i = 0; i < n; ++i) e.emplace_back(i, static_cast<Index>((i + 1) % n));
  return SimpleGraph::from_index_edges(numbered(n), e);
}

std::string product_vertex_id(std::string_view a, std::string_view b) {
  std::string s = "(";
  s += a;
  s += ',';
  s += b;
  s += ')';
  return s;
}

SimpleGraph cartesian_product(const SimpleGraph& g, const SimpleGraph& h) {
  if (g.order() == 0 || h.order() == 0) throw EmptyInput("cartesian product of an empty graph");
  const Index nh = static_cast<Index>(h.order());
  std::vector<std::string> ids;
  ids.reserve(g.order() * h.order());
  for (Index a = 0; a < g.order(); ++a)
    for (Index b = 0; b < nh; ++b) ids.push_back(product_vertex_id(g.id(a), h.id(b)));
  std::vector<SimpleGraph::Edge> e;
  for (auto [a, a2] : g.edges())
    for (Index b = 0; b < nh; ++b) e.emplace_back(a * nh + b, a2 * nh + b);
  for (Index a = 0; a < g.order(); ++a)
    for (auto [b, b2] : h.edges()) e.emplace_back(a * nh + b, a * nh + b2);
  return SimpleGraph::from_index_edges(std::move(ids), e);
}

std::size_t min_degree(const SimpleGraph& g) {
  if (g.order() == 0) throw EmptyInput("min_degree of the empty graph");
  std::size_t m = g.degree(0);
  for (Index v = 1; v < g.order(); ++v) m = std::min(m, g.degree(v));
  return m;
}

bool is_connected(const SimpleGraph& g) {
  if (g.order() == 0) throw EmptyInput("connectivity of the empty graph");
  std::vector<char> seen(g.order(), 0);
  std::vector<Index> st{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!st.empty()) {
    Index v = st.back();
    st.pop_back();
    for (Index w : g.neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        st.push_back(w);
      }
  }
  return count == g.order();
}

namespace {

std::vector<std::vector<std::size_t>> all_distances(const SimpleGraph& g) {
  const std::size_t n = g.order();
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, SIZE_MAX));
  for (Index s = 0; s < n; ++s) {
    std::queue<Index> q;
    q.push(s);
    d[s][s] = 0;
    while (!q.empty()) {
      Index v = q.front();
      q.pop();
      for (Index w : g.neighbors(v))
        if (d[s][w] == SIZE_MAX) {
          d[s][w] = d[s][v] + 1;
          q.push(w);
        }
    }
  }
  return d;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Layer of edge class `cls` through vertex 0, as a standalone graph keeping
// the original vertex ids.
SimpleGraph layer(const SimpleGraph& g, const std::vector<std::size_t>& edge_class,
                  std::size_t cls) {
  const auto& edges = g.edges();
  std::vector<std::vector<Index>> adj(g.order());
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edge_class[i] == cls) {
      adj[edges[i].first].push_back(edges[i].second);
      adj[edges[i].second].push_back(edges[i].first);
    }
  std::vector<Index> local(g.order(), UINT32_MAX);
  std::vector<Index> members{0};
  local[0] = 0;
  for (std::size_t k = 0; k < members.size(); ++k)
    for (Index w : adj[members[k]])
      if (local[w] == UINT32_MAX) {
        local[w] = static_cast<Index>(members.size());
        members.push_back(w);
      }
  std::vector<Index> order(members);
  std::sort(order.begin(), order.end());
  for (Index k = 0; k < order.size(); ++k) local[order[k]] = k;
  std::vector<std::string> ids;
  for (Index v : order) ids.push_back(g.id(v));
  std::vector<SimpleGraph::Edge> e;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edge_class[i] == cls && local[edges[i].first] != UINT32_MAX &&
        local[edges[i].second] != UINT32_MAX)
      e.emplace_back(local[edges[i].first], local[edges[i].second]);
  return SimpleGraph::from_index_edges(std::move(ids), e);
}

}  // namespace

std::vector<SimpleGraph> prime_factorization(const SimpleGraph& g,
                                             const FactorizationOptions& opts) {
  if (g.order() > opts.max_vertices)
    throw CapExceeded("factorization bound of " + std::to_string(opts.max_vertices) +
                      " vertices exceeded (" + std::to_string(g.order()) + ")");
  if (!is_connected(g)) throw InvalidInput("prime factorization needs a connected graph");
  if (g.order() == 1) return {};

  // Product relation: transitive closure of Djokovic-Winkler Theta and tau.
  const auto d = all_distances(g);
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  UnionFind uf(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto [x, y] = edges[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      auto [u, v] = edges[j];
      if (d[x][u] + d[y][v] != d[x][v] + d[y][u]) uf.unite(i, j);
    }
  }
  std::map<SimpleGraph::Edge, std::size_t> edge_pos;
  for (std::size_t i = 0; i < m; ++i) edge_pos[edges[i]] = i;
  auto pos = [&](Index a, Index b) { return edge_pos.at({std::min(a, b), std::max(a, b)}); };
  for (Index x = 0; x < g.order(); ++x) {
    auto nb = g.neighbors(x);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        bool square = false;
        for (Index w : g.neighbors(nb[a]))
          if (w != x && g.adjacent(w, nb[b])) {
            square = true;
            break;
          }
        if (!square) uf.unite(pos(x, nb[a]), pos(x, nb[b]));
      }
  }
  std::vector<std::size_t> cls(m);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < m; ++i) {
    cls[i] = uf.find(i);
    if (std::find(reps.begin(), reps.end(), cls[i]) == reps.end()) reps.push_back(cls[i]);
  }

  std::vector<SimpleGraph> factors;
  for (std::size_t r : reps) factors.push_back(layer(g, cls, r));
  if (factors.size() == 1) return factors;

  std::vector<std::pair<std::string, std::size_t>> keys;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    // canonical forms only for small factors; large ones keep discovery order
    std::string k = std::to_string(1000000 + factors[i].order()) +
                    (factors[i].order() <= 64 ? canonical_form(factors[i]) : "~");
    keys.emplace_back(std::move(k), i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<SimpleGraph> sorted;
  for (auto& [k, i] : keys) sorted.push_back(factors[i]);

  SimpleGraph prod = sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) prod = cartesian_product(prod, sorted[i]);
  if (prod.order() != g.order() || !isomorphic(prod, g, {.max_vertices = opts.max_vertices}))
    throw VerificationFailure("factorization", "product of layers is not isomorphic to input");
  return sorted;
}

bool is_prime(const SimpleGraph& g, const FactorizationOptions& opts) {
  return prime_factorization(g, opts).size() == 1;
}

std::vector<SimpleGraph> enumerate_rigid_primes(std::size_t count, const RigidPrimeOptions& opts) {
  if (count == 0) throw InvalidInput("count must be positive");
  std::vector<SimpleGraph> out;
  for (std::size_t n = 6; n <= opts.max_vertices && out.size() < count; ++n) {
    std::vector<SimpleGraph::Edge> slots;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    if (slots.size() >= 40) throw CapExceeded("rigid prime enumeration too large");
    std::map<std::string, SimpleGraph> found;
    const std::uint64_t total = std::uint64_t{1} << slots.size();
    std::vector<SimpleGraph::Edge> e;
    std::vector<int> deg(n);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      e.clear();
      std::fill(deg.begin(), deg.end(), 0);
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1) {
          e.push_back(slots[s]);
          ++deg[slots[s].first];
          ++deg[slots[s].second];
        }
      if (e.size() < n - 1) continue;
      if (std::find(deg.begin(), deg.end(), 0) != deg.end()) continue;
      SimpleGraph g = SimpleGraph::from_index_edges(numbered(n), e);
      if (!is_connected(g)) continue;
      PermGroup a = aut_graph(g);
      if (!a.generators().empty()) continue;
      std::string cf = canonical_form(g);
      if (found.count(cf)) continue;
      found.emplace(std::move(cf), std::move(g));
    }
    for (auto& [cf, g] : found) {
      if (out.size() == count) break;
      if (!is_prime(g)) continue;
      out.push_back(g);
    }
  }
  if (out.size() < count)
    throw CapExceeded("only " + std::to_string(out.size()) + " rigid primes within " +
                      std::to_string(opts.max_vertices) + " vertices");
  return out;
}

std::string edge_element_id(std::string_view a, std::string_view b) {
  std::string s = "{";
  s += a;
  s += '|';
  s += b;
  s += '}';
  return s;
}

IncidencePoset incidence_poset(const SimpleGraph& g) {
  if (g.order() == 0) throw EmptyInput("incidence poset of the empty graph");
  const Index n = static_cast<Index>(g.order());
  std::vector<std::string> ids(g.vertices());
  std::vector<std::pair<Index, Index>> covers;
  IncidencePoset r;
  r.vertex_embedding.resize(n);
  std::iota(r.vertex_embedding.begin(), r.vertex_embedding.end(), 0);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    auto [a, b] = g.edges()[i];
    Index e = n + static_cast<Index>(i);
    ids.push_back(edge_element_id(g.id(a), g.id(b)));
    covers.emplace_back(a, e);
    covers.emplace_back(b, e);
    r.edge_embedding.push_back(e);
  }
  r.poset = Poset::from_index_covers(std::move(ids), std::move(covers));
  return r;
}

std::string adjacency_word(const SimpleGraph& g, std::span<const Index> order) {
  std::string w;
  w.reserve(order.size() * order.size() / 2);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      w.push_back(g.adjacent(order[i], order[j]) ? '1' : '0');
  return w;
}

}  // namespace alexrealize
