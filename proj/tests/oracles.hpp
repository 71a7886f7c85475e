#pragma once

// Slow reference implementations used to cross-check the library. They only
// read element lists and cover pairs and share no code with src/.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "alexrealize/graph.hpp"
#include "alexrealize/homology.hpp"
#include "alexrealize/poset.hpp"

namespace oracle {

using alexrealize::AbelianGroup;
using alexrealize::Index;
using alexrealize::Poset;
using alexrealize::SimpleGraph;

// Reflexive order relation, closed with Floyd-Warshall.
struct Rel {
  int n = 0;
  std::vector<std::vector<char>> le;
  bool lt(int a, int b) const { return a != b && le[a][b]; }
};

inline Rel relation(const Poset& p) {
  Rel r;
  r.n = static_cast<int>(p.size());
  r.le.assign(r.n, std::vector<char>(r.n, 0));
  for (int i = 0; i < r.n; ++i) r.le[i][i] = 1;
  std::map<std::string, int> pos;
  for (int i = 0; i < r.n; ++i) pos[p.elements()[i]] = i;
  for (const auto& [a, b] : p.cover_pairs()) r.le[pos[a]][pos[b]] = 1;
  for (int k = 0; k < r.n; ++k)
    for (int i = 0; i < r.n; ++i)
      if (r.le[i][k])
        for (int j = 0; j < r.n; ++j)
          if (r.le[k][j]) r.le[i][j] = 1;
  return r;
}

inline bool covers(const Rel& r, int a, int b) {
  if (!r.lt(a, b)) return false;
  for (int c = 0; c < r.n; ++c)
    if (r.lt(a, c) && r.lt(c, b)) return false;
  return true;
}

inline int height(const Rel& r) {
  std::vector<int> memo(r.n, -1);
  std::function<int(int)> up = [&](int x) {
    if (memo[x] >= 0) return memo[x];
    int best = 0;
    for (int y = 0; y < r.n; ++y)
      if (r.lt(x, y)) best = std::max(best, 1 + up(y));
    return memo[x] = best;
  };
  int h = 0;
  for (int x = 0; x < r.n; ++x) h = std::max(h, up(x));
  return h;
}

inline std::vector<int> beat_points(const Rel& r) {
  std::vector<int> out;
  for (int x = 0; x < r.n; ++x) {
    int ups = 0, downs = 0;
    for (int y = 0; y < r.n; ++y) {
      if (covers(r, x, y)) ++ups;
      if (covers(r, y, x)) ++downs;
    }
    if (ups == 1 || downs == 1) out.push_back(x);
  }
  return out;
}

// All nonempty chains, as increasing index lists.
inline std::vector<std::vector<int>> chains(const Rel& r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> grow = [&](int last) {
    for (int y = 0; y < r.n; ++y)
      if (r.lt(last, y)) {
        cur.push_back(y);
        out.push_back(cur);
        grow(y);
        cur.pop_back();
      }
  };
  for (int x = 0; x < r.n; ++x) {
    cur = {x};
    out.push_back(cur);
    grow(x);
  }
  return out;
}

// Nonzero diagonal of any diagonalization by integer row/column operations.
inline std::vector<mpz_class> dense_diagonal(std::vector<std::vector<mpz_class>> a) {
  std::vector<mpz_class> diag;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // smallest nonzero entry in the trailing block
    std::size_t pi = rows, pj = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pi == rows || abs(a[i][j]) < abs(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
    if (pi == rows) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool clean = true;
    for (std::size_t i = t + 1; i < rows; ++i) {
      if (a[i][t] == 0) continue;
      mpz_class q = a[i][t] / a[t][t];
      for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
      if (a[i][t] != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < cols; ++j) {
      if (a[t][j] == 0) continue;
      mpz_class q = a[t][j] / a[t][t];
      for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
      if (a[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  return diag;
}

// Reduced homology through the augmented chain complex of all chains.
inline std::map<int, AbelianGroup> reduced_homology(const Poset& p) {
  const Rel r = relation(p);
  auto cs = chains(r);
  int top = 0;
  for (const auto& c : cs) top = std::max(top, static_cast<int>(c.size()) - 1);
  // cells by dimension; dimension -1 is the empty chain
  std::map<int, std::vector<std::vector<int>>> cells;
  cells[-1].push_back({});
  for (auto& c : cs) cells[static_cast<int>(c.size()) - 1].push_back(c);
  std::map<int, std::size_t> rank_d;
  std::map<int, std::vector<std::int64_t>> tors;
  for (int d = 0; d <= top; ++d) {
    const auto& hi = cells[d];
    const auto& lo = cells[d - 1];
    std::map<std::vector<int>, std::size_t> pos;
    for (std::size_t i = 0; i < lo.size(); ++i) pos[lo[i]] = i;
    std::vector<std::vector<mpz_class>> m(lo.size(), std::vector<mpz_class>(hi.size(), 0));
    for (std::size_t j = 0; j < hi.size(); ++j)
      for (std::size_t k = 0; k < hi[j].size(); ++k) {
        auto face = hi[j];
        face.erase(face.begin() + static_cast<long>(k));
        m[pos.at(face)][j] += (k % 2 == 0) ? 1 : -1;
      }
    auto diag = dense_diagonal(std::move(m));
    rank_d[d] = diag.size();
    for (const auto& x : diag)
      if (x > 1) tors[d - 1].push_back(x.get_si());
  }
  std::map<int, AbelianGroup> out;
  for (int d = 0; d <= top; ++d) {
    const std::size_t free = cells[d].size() - rank_d[d] - (d + 1 <= top ? rank_d[d + 1] : 0);
    out[d] = AbelianGroup(free, tors[d]);
  }
  return out;
}

inline std::size_t chain_count(const Poset& p) { return chains(relation(p)).size(); }

// Every order automorphism, by backtracking.
inline std::vector<std::vector<int>> automorphisms(const Rel& r) {
  std::vector<std::vector<int>> out;
  std::vector<int> img(r.n, -1);
  std::vector<char> used(r.n, 0);
  std::function<void(int)> go = [&](int x) {
    if (x == r.n) {
      out.push_back(img);
      return;
    }
    for (int y = 0; y < r.n; ++y) {
      if (used[y]) continue;
      bool ok = true;
      for (int z = 0; z < x && ok; ++z) ok = r.le[z][x] == r.le[img[z]][y] && r.le[x][z] == r.le[y][img[z]];
      if (!ok) continue;
      used[y] = 1;
      img[x] = y;
      go(x + 1);
      used[y] = 0;
    }
  };
  go(0);
  return out;
}

inline std::vector<std::vector<int>> automorphisms(const SimpleGraph& g) {
  const int n = static_cast<int>(g.order());
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (auto [a, b] : g.edges()) adj[a][b] = adj[b][a] = 1;
  std::vector<std::vector<int>> out;
  std::vector<int> img(n, -1);
  std::vector<char> used(n, 0);
  std::function<void(int)> go = [&](int x) {
    if (x == n) {
      out.push_back(img);
      return;
    }
    for (int y = 0; y < n; ++y) {
      if (used[y] || g.degree(x) != g.degree(y)) continue;
      bool ok = true;
      for (int z = 0; z < x && ok; ++z) ok = adj[z][x] == adj[img[z]][y];
      if (!ok) continue;
      used[y] = 1;
      img[x] = y;
      go(x + 1);
      used[y] = 0;
    }
  };
  go(0);
  return out;
}

inline Poset random_poset(std::mt19937& rng, int n, double p, const std::string& prefix = "x") {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  std::vector<std::pair<Index, Index>> rel;
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) rel.emplace_back(i, j);
  return Poset::from_relations(ids, rel);
}

inline SimpleGraph random_connected_graph(std::mt19937& rng, int n, double p) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
  std::vector<SimpleGraph::Edge> e;
  // random spanning tree, then extra edges
  for (int i = 1; i < n; ++i) e.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool present = false;
      for (auto [a, b] : e) present = present || (a == static_cast<Index>(i) && b == static_cast<Index>(j));
      if (!present && coin(rng)) e.emplace_back(i, j);
    }
  return SimpleGraph::from_index_edges(ids, e);
}

// Poset from an undirected Hasse drawing: each edge points up by y coordinate.
inline Poset from_drawing(const std::vector<std::pair<std::string, int>>& nodes,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, int> y;
  std::vector<std::string> ids;
  for (const auto& [id, level] : nodes) {
    y[id] = level;
    ids.push_back(id);
  }
  std::vector<std::pair<std::string, std::string>> cov;
  for (const auto& [a, b] : edges) cov.push_back(y.at(a) < y.at(b) ? std::make_pair(a, b) : std::make_pair(b, a));
  return Poset(ids, cov);
}

}  // namespace oracle
