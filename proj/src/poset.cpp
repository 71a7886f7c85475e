#include "alexrealize/poset.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

#include "alexrealize/errors.hpp"

namespace alexrealize {

Poset::Poset(std::vector<std::string> elements, const std::vector<CoverPair>& covers) {
  std::unordered_map<std::string, Index> tmp;
  tmp.reserve(elements.size());
  for (Index i = 0; i < elements.size(); ++i) {
    if (!tmp.emplace(elements[i], i).second)
      throw InvalidInput("duplicate element identifier '" + elements[i] + "'");
  }
  std::vector<std::pair<Index, Index>> idx;
  idx.reserve(covers.size());
  for (const auto& [a, b] : covers) {
    auto ia = tmp.find(a);
    if (ia == tmp.end()) throw UnknownElement(a);
    auto ib = tmp.find(b);
    if (ib == tmp.end()) throw UnknownElement(b);
    idx.emplace_back(ia->second, ib->second);
  }
  build(std::move(elements), std::move(idx), true);
}

Poset Poset::from_index_covers(std::vector<std::string> elements,
                               std::vector<std::pair<Index, Index>> covers) {
  Poset p;
  p.build(std::move(elements), std::move(covers), true);
  return p;
}

Poset Poset::from_relations(std::vector<std::string> elements,
                            const std::vector<std::pair<Index, Index>>& relations) {
  const std::size_t n = elements.size();
  std::vector<std::vector<Index>> out(n);
  for (auto [a, b] : relations) {
    if (a >= n || b >= n) throw InvalidInput("relation references unknown index");
    if (a == b) throw InvalidInput("self relation on '" + elements[a] + "'");
    out[a].push_back(b);
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  // Topological order (Kahn); a leftover means a cycle.
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& v : out)
    for (Index b : v) ++indeg[b];
  std::vector<Index> order;
  order.reserve(n);
  std::vector<Index> stack;
  for (Index i = 0; i < n; ++i)
    if (indeg[i] == 0) stack.push_back(i);
  while (!stack.empty()) {
    Index a = stack.back();
    stack.pop_back();
    order.push_back(a);
    for (Index b : out[a])
      if (--indeg[b] == 0) stack.push_back(b);
  }
  if (order.size() != n) throw AntisymmetryViolation("relations contain a cycle");

  // Transitive reduction: a -> b is a cover iff b is not reachable from a
  // through another successor.
  std::vector<std::pair<Index, Index>> covers;
  std::vector<Index> stamp(n, UINT32_MAX);
  std::vector<Index> dfs;
  for (Index a = 0; a < n; ++a) {
    dfs.clear();
    for (Index c : out[a])
      for (Index d : out[c])
        if (stamp[d] != a) {
          stamp[d] = a;
          dfs.push_back(d);
        }
    while (!dfs.empty()) {
      Index x = dfs.back();
      dfs.pop_back();
      for (Index y : out[x])
        if (stamp[y] != a) {
          stamp[y] = a;
          dfs.push_back(y);
        }
    }
    for (Index b : out[a])
      if (stamp[b] != a) covers.emplace_back(a, b);
  }
  Poset p;
  p.build(std::move(elements), std::move(covers), false);
  return p;
}

void Poset::build(std::vector<std::string> elements, std::vector<std::pair<Index, Index>> covers,
                  bool check_redundancy) {
  ids_ = std::move(elements);
  const std::size_t n = ids_.size();
  lookup_.clear();
  lookup_.reserve(n);
  for (Index i = 0; i < n; ++i) {
    if (!lookup_.emplace(ids_[i], i).second)
      throw InvalidInput("duplicate element identifier '" + ids_[i] + "'");
  }
  up_.assign(n, {});
  down_.assign(n, {});
  for (auto [a, b] : covers) {
    if (a >= n || b >= n) throw InvalidInput("cover references unknown index");
    if (a == b) throw InvalidInput("self cover on '" + ids_[a] + "'");
    up_[a].push_back(b);
    down_[b].push_back(a);
  }
  cover_count_ = 0;
  for (Index i = 0; i < n; ++i) {
    auto& u = up_[i];
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end())
      throw InvalidInput("duplicate cover above '" + ids_[i] + "'");
    std::sort(down_[i].begin(), down_[i].end());
    cover_count_ += u.size();
  }

  // Kahn with a min-heap so that the linear extension is deterministic.
  std::vector<std::size_t> indeg(n);
  for (Index i = 0; i < n; ++i) indeg[i] = down_[i].size();
  std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
  for (Index i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  topo_.clear();
  topo_.reserve(n);
  while (!ready.empty()) {
    Index a = ready.top();
    ready.pop();
    topo_.push_back(a);
    for (Index b : up_[a])
      if (--indeg[b] == 0) ready.push(b);
  }
  if (topo_.size() != n) throw AntisymmetryViolation("cover relation contains a cycle");
  topo_pos_.assign(n, 0);
  for (Index k = 0; k < n; ++k) topo_pos_[topo_[k]] = k;

  below_.assign(n, 0);
  for (Index a : topo_)
    for (Index b : up_[a]) below_[b] = std::max(below_[b], below_[a] + 1);
  above_.assign(n, 0);
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it)
    for (Index b : up_[*it]) above_[*it] = std::max(above_[*it], above_[b] + 1);

  if (check_redundancy) {
    std::vector<Index> stamp(n, UINT32_MAX);
    std::vector<Index> dfs;
    for (Index a = 0; a < n; ++a) {
      if (up_[a].size() < 2) continue;
      dfs.clear();
      for (Index c : up_[a])
        for (Index d : up_[c])
          if (stamp[d] != a) {
            stamp[d] = a;
            dfs.push_back(d);
          }
      while (!dfs.empty()) {
        Index x = dfs.back();
        dfs.pop_back();
        for (Index y : up_[x])
          if (stamp[y] != a) {
            stamp[y] = a;
            dfs.push_back(y);
          }
      }
      for (Index b : up_[a])
        if (stamp[b] == a)
          throw InvalidInput("redundant cover ('" + ids_[a] + "', '" + ids_[b] + "')");
    }
  }
}

Index Poset::index(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) throw UnknownElement(std::string(id));
  return it->second;
}

std::optional<Index> Poset::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<Index, Index>> Poset::cover_indices() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(cover_count_);
  for (Index a = 0; a < size(); ++a)
    for (Index b : up_[a]) out.emplace_back(a, b);
  return out;
}

std::vector<Poset::CoverPair> Poset::cover_pairs() const {
  std::vector<CoverPair> out;
  out.reserve(cover_count_);
  for (Index a = 0; a < size(); ++a)
    for (Index b : up_[a]) out.emplace_back(ids_[a], ids_[b]);
  return out;
}

bool Poset::leq(Index x, Index y) const {
  if (x >= size() || y >= size()) throw InvalidInput("element index out of range");
  if (x == y) return true;
  // Chains below y are at most below_[y] long, which bounds the search.
  if (below_[x] >= below_[y]) return false;
  std::vector<Index> stack{x};
  std::vector<char> seen(size(), 0);
  seen[x] = 1;
  while (!stack.empty()) {
    Index a = stack.back();
    stack.pop_back();
    for (Index b : up_[a]) {
      if (b == y) return true;
      if (!seen[b] && below_[b] < below_[y]) {
        seen[b] = 1;
        stack.push_back(b);
      }
    }
  }
  return false;
}

bool Poset::leq(std::string_view x, std::string_view y) const { return leq(index(x), index(y)); }

bool operator==(const Poset& a, const Poset& b) {
  return a.ids_ == b.ids_ && a.up_ == b.up_;
}

std::size_t height(const Poset& p) {
  if (p.empty()) throw EmptyInput("height of the empty poset");
  const auto& b = p.depth_below();
  return *std::max_element(b.begin(), b.end());
}

std::vector<Index> beat_points(const Poset& p) {
  std::vector<Index> out;
  for (Index i = 0; i < p.size(); ++i)
    if (p.upper_covers(i).size() == 1 || p.lower_covers(i).size() == 1) out.push_back(i);
  return out;
}

bool is_minimal_space(const Poset& p) {
  for (Index i = 0; i < p.size(); ++i)
    if (p.upper_covers(i).size() == 1 || p.lower_covers(i).size() == 1) return false;
  return true;
}

Poset induced_subposet(const Poset& p, std::span<const Index> keep) {
  std::vector<Index> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Index> local(p.size(), UINT32_MAX);
  std::vector<std::string> ids;
  ids.reserve(sorted.size());
  for (Index k = 0; k < sorted.size(); ++k) {
    local[sorted[k]] = k;
    ids.push_back(p.id(sorted[k]));
  }
  // Relations between kept elements: walk up through removed elements only.
  std::vector<std::pair<Index, Index>> rel;
  std::vector<Index> stamp(p.size(), UINT32_MAX);
  std::vector<Index> stack;
  for (Index a : sorted) {
    stack.assign(p.upper_covers(a).begin(), p.upper_covers(a).end());
    for (Index b : stack) stamp[b] = a;
    while (!stack.empty()) {
      Index x = stack.back();
      stack.pop_back();
      if (local[x] != UINT32_MAX) {
        rel.emplace_back(local[a], local[x]);
        continue;
      }
      for (Index y : p.upper_covers(x))
        if (stamp[y] != a) {
          stamp[y] = a;
          stack.push_back(y);
        }
    }
  }
  return Poset::from_relations(std::move(ids), rel);
}

Poset core(const Poset& p) {
  if (p.empty()) throw EmptyInput("core of the empty poset");
  Poset cur = p;
  for (;;) {
    auto beats = beat_points(cur);
    if (beats.empty()) return cur;
    Index victim = *std::min_element(beats.begin(), beats.end(), [&](Index a, Index b) {
      return cur.id(a) < cur.id(b);
    });
    std::vector<Index> keep;
    keep.reserve(cur.size() - 1);
    for (Index i = 0; i < cur.size(); ++i)
      if (i != victim) keep.push_back(i);
    cur = induced_subposet(cur, keep);
  }
}

std::vector<std::vector<Index>> strict_up_sets(const Poset& p) {
  std::vector<std::vector<Index>> up(p.size());
  const auto& topo = p.linear_extension();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    Index a = *it;
    std::vector<Index> acc;
    for (Index b : p.upper_covers(a)) {
      acc.push_back(b);
      acc.insert(acc.end(), up[b].begin(), up[b].end());
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    up[a] = std::move(acc);
  }
  return up;
}

bool is_connected(const Poset& p) {
  if (p.empty()) return false;
  std::vector<char> seen(p.size(), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Index a = stack.back();
    stack.pop_back();
    for (auto nbrs : {p.upper_covers(a), p.lower_covers(a)})
      for (Index b : nbrs)
        if (!seen[b]) {
          seen[b] = 1;
          ++count;
          stack.push_back(b);
        }
  }
  return count == p.size();
}

std::vector<Index> minimal_elements(const Poset& p) {
  std::vector<Index> out;
  for (Index i = 0; i < p.size(); ++i)
    if (p.lower_covers(i).empty()) out.push_back(i);
  return out;
}

std::vector<Index> maximal_elements(const Poset& p) {
  std::vector<Index> out;
  for (Index i = 0; i < p.size(); ++i)
    if (p.upper_covers(i).empty()) out.push_back(i);
  return out;
}

Poset relabel(const Poset& p, const std::vector<std::string>& new_ids) {
  if (new_ids.size() != p.size()) throw InvalidInput("relabel: wrong number of identifiers");
  return Poset::from_index_covers(new_ids, p.cover_indices());
}

Poset opposite(const Poset& p) {
  auto covers = p.cover_indices();
  for (auto& [a, b] : covers) std::swap(a, b);
  return Poset::from_index_covers(p.elements(), std::move(covers));
}

ChainStats chain_stats(const Poset& p) {
  ChainStats s;
  s.below = p.depth_below();
  s.above = p.depth_above();
  s.through.resize(p.size());
  for (Index i = 0; i < p.size(); ++i) {
    s.through[i] = s.below[i] + s.above[i];
    s.height = std::max(s.height, s.through[i]);
  }
  return s;
}

std::vector<Chain> maximum_chains(const Poset& p, std::size_t limit) {
  std::vector<Chain> out;
  if (p.empty()) return out;
  const std::size_t h = height(p);
  const auto& above = p.depth_above();
  std::vector<Index> path;
  std::function<void(Index)> rec = [&](Index x) {
    if (out.size() >= limit) return;
    path.push_back(x);
    if (above[x] == 0) {
      Chain c;
      for (Index y : path) c.elements.push_back(p.id(y));
      out.push_back(std::move(c));
    } else {
      for (Index y : p.upper_covers(x))
        if (above[y] + 1 == above[x]) rec(y);
    }
    path.pop_back();
  };
  for (Index x = 0; x < p.size(); ++x)
    if (p.lower_covers(x).empty() && above[x] == h) rec(x);
  return out;
}

std::vector<std::vector<Index>> maximal_chains(const Poset& p, std::size_t limit) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> path;
  std::function<void(Index)> rec = [&](Index x) {
    if (out.size() >= limit) return;
    path.push_back(x);
    if (p.upper_covers(x).empty()) {
      out.push_back(path);
    } else {
      for (Index y : p.upper_covers(x)) rec(y);
    }
    path.pop_back();
  };
  for (Index x = 0; x < p.size(); ++x)
    if (p.lower_covers(x).empty()) rec(x);
  return out;
}

namespace {

std::vector<std::string> prefixed(const Poset& p, const std::string& prefix) {
  std::vector<std::string> out;
  out.reserve(p.size());
  for (const auto& s : p.elements()) out.push_back(prefix + s);
  return out;
}

}  // namespace

JoinResult non_hausdorff_join(const Poset& p, const Poset& q, const JoinOptions& opts) {
  const Index np = static_cast<Index>(p.size());
  auto ids = prefixed(p, opts.left_prefix);
  auto rid = prefixed(q, opts.right_prefix);
  ids.insert(ids.end(), rid.begin(), rid.end());
  auto covers = p.cover_indices();
  for (auto [a, b] : q.cover_indices()) covers.emplace_back(a + np, b + np);
  for (Index a : maximal_elements(p))
    for (Index b : minimal_elements(q)) covers.emplace_back(a, b + np);
  JoinResult r;
  r.poset = Poset::from_index_covers(std::move(ids), std::move(covers));
  r.left.map.resize(p.size());
  std::iota(r.left.map.begin(), r.left.map.end(), 0);
  r.right.map.resize(q.size());
  std::iota(r.right.map.begin(), r.right.map.end(), np);
  return r;
}

WedgeResult wedge(const Poset& p, std::string_view p_point, const Poset& q,
                  std::string_view q_point, const JoinOptions& opts) {
  const Index pp = p.index(p_point);
  const Index qq = q.index(q_point);
  const Index np = static_cast<Index>(p.size());
  auto ids = prefixed(p, opts.left_prefix);
  WedgeResult r;
  r.left.map.resize(p.size());
  std::iota(r.left.map.begin(), r.left.map.end(), 0);
  r.right.map.assign(q.size(), 0);
  Index next = np;
  for (Index j = 0; j < q.size(); ++j) {
    if (j == qq) {
      r.right.map[j] = pp;
    } else {
      r.right.map[j] = next++;
      ids.push_back(opts.right_prefix + q.id(j));
    }
  }
  auto covers = p.cover_indices();
  for (auto [a, b] : q.cover_indices()) covers.emplace_back(r.right.map[a], r.right.map[b]);
  try {
    r.poset = Poset::from_index_covers(std::move(ids), std::move(covers));
  } catch (const AntisymmetryViolation& e) {
    throw AntisymmetryViolation(std::string("wedge: ") + e.what());
  }
  r.glued = pp;
  r.glued_id = r.poset.id(pp);
  return r;
}

Poset antichain(std::size_t n, std::string_view prefix) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::string(prefix) + std::to_string(i));
  return Poset(std::move(ids), {});
}

}  // namespace alexrealize
