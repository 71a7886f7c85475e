#include "alexrealize/symmetry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "alexrealize/errors.hpp"

namespace alexrealize {

// ---------------------------------------------------------------- permutations

Permutation::Permutation(std::vector<Index> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (Index x : images_) {
    if (x >= images_.size() || seen[x]) throw InvalidInput("permutation images are not a bijection");
    seen[x] = 1;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<Index> im(n);
  std::iota(im.begin(), im.end(), 0);
  Permutation p;
  p.images_ = std::move(im);
  return p;
}

bool Permutation::is_identity() const {
  for (Index i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw InvalidInput("composing permutations of different degree");
  Permutation r;
  r.images_.resize(a.size());
  for (Index x = 0; x < a.size(); ++x) r.images_[x] = a.images_[b.images_[x]];
  return r;
}

Permutation Permutation::inverse() const {
  Permutation r;
  r.images_.resize(images_.size());
  for (Index x = 0; x < images_.size(); ++x) r.images_[images_[x]] = x;
  return r;
}

std::string Permutation::cycles(std::span<const std::string> labels) const {
  std::string s;
  std::vector<char> seen(images_.size(), 0);
  for (Index x = 0; x < images_.size(); ++x) {
    if (seen[x] || images_[x] == x) continue;
    s += '(';
    Index y = x;
    bool first = true;
    while (!seen[y]) {
      seen[y] = 1;
      if (!first) s += ' ';
      s += labels[y];
      first = false;
      y = images_[y];
    }
    s += ')';
  }
  return s.empty() ? "()" : s;
}

std::size_t PermutationHash::operator()(const Permutation& p) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (Index x : p.images()) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Permutation parse_cycles(std::string_view text, std::span<const std::string> labels) {
  std::unordered_map<std::string_view, Index> lookup;
  for (Index i = 0; i < labels.size(); ++i) lookup.emplace(labels[i], i);
  std::vector<Index> im(labels.size());
  std::iota(im.begin(), im.end(), 0);
  std::vector<char> used(labels.size(), 0);
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == ',' || c == '\t' || c == '\n'; };
  while (i < text.size()) {
    if (is_sep(text[i])) {
      ++i;
      continue;
    }
    if (text[i] != '(') throw InvalidInput("malformed cycle notation: '" + std::string(text) + "'");
    ++i;
    std::vector<Index> cyc;
    while (true) {
      while (i < text.size() && is_sep(text[i])) ++i;
      if (i >= text.size()) throw InvalidInput("unterminated cycle in '" + std::string(text) + "'");
      if (text[i] == ')') {
        ++i;
        break;
      }
      std::size_t j = i;
      while (j < text.size() && !is_sep(text[j]) && text[j] != ')' && text[j] != '(') ++j;
      auto tok = text.substr(i, j - i);
      if (tok.empty()) throw InvalidInput("malformed cycle notation: '" + std::string(text) + "'");
      auto it = lookup.find(tok);
      if (it == lookup.end()) throw UnknownElement(std::string(tok));
      if (used[it->second])
        throw InvalidInput("label '" + std::string(tok) + "' repeated in '" + std::string(text) + "'");
      used[it->second] = 1;
      cyc.push_back(it->second);
      i = j;
    }
    for (std::size_t k = 0; k < cyc.size(); ++k) im[cyc[k]] = cyc[(k + 1) % cyc.size()];
  }
  return Permutation(std::move(im));
}

PermGroup::PermGroup(std::vector<std::string> domain, std::vector<Permutation> generators)
    : domain_(std::move(domain)), gens_(std::move(generators)) {
  for (const auto& g : gens_)
    if (g.size() != domain_.size())
      throw InvalidInput("generator degree " + std::to_string(g.size()) +
                         " does not match domain size " + std::to_string(domain_.size()));
}

// ---------------------------------------------------------- refinement engine

namespace {

struct ColoredDigraph {
  std::size_t n = 0;
  bool directed = false;
  std::vector<std::vector<Index>> out;
  std::vector<std::vector<Index>> in;
  std::vector<std::uint64_t> color;
  std::size_t arcs = 0;
};

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Partition {
  std::vector<Index> elems;
  std::vector<Index> pos;
  std::vector<Index> cellof;
  std::vector<Index> len;  // valid at cell starts
  std::size_t ncells = 0;
  std::uint64_t trace = 0;

  bool discrete() const { return ncells == elems.size(); }
  Index first_nonsingleton() const {
    for (Index s = 0; s < elems.size(); s += len[s])
      if (len[s] > 1) return s;
    return static_cast<Index>(elems.size());
  }
};

struct Info {
  std::size_t ncells;
  std::uint64_t trace;
  bool operator==(const Info&) const = default;
};

class Refiner {
 public:
  explicit Refiner(const ColoredDigraph& g) : g_(g), cnt_(g.n, 0), inq_(g.n, 0) {}

  Partition initial() {
    Partition p;
    const std::size_t n = g_.n;
    p.elems.resize(n);
    std::iota(p.elems.begin(), p.elems.end(), 0);
    std::stable_sort(p.elems.begin(), p.elems.end(),
                     [&](Index a, Index b) { return g_.color[a] < g_.color[b]; });
    p.pos.resize(n);
    p.cellof.resize(n);
    p.len.assign(n, 0);
    std::vector<Index> starts;
    for (Index i = 0; i < n;) {
      Index j = i;
      while (j < n && g_.color[p.elems[j]] == g_.color[p.elems[i]]) ++j;
      for (Index k = i; k < j; ++k) {
        p.pos[p.elems[k]] = k;
        p.cellof[p.elems[k]] = i;
      }
      p.len[i] = j - i;
      p.trace = mix(mix(p.trace, g_.color[p.elems[i]]), j - i);
      starts.push_back(i);
      ++p.ncells;
      i = j;
    }
    refine(p, starts);
    return p;
  }

  void individualize(Partition& p, Index v) {
    const Index c = p.cellof[v];
    const Index L = p.len[c];
    p.trace = mix(mix(p.trace, 0xabcdefULL), c);
    if (L == 1) return;
    swap_pos(p, v, p.elems[c]);
    p.len[c] = 1;
    p.len[c + 1] = L - 1;
    for (Index k = c + 1; k < c + L; ++k) p.cellof[p.elems[k]] = c + 1;
    ++p.ncells;
    std::vector<Index> q{c};
    refine(p, q);
  }

 private:
  static void swap_pos(Partition& p, Index a, Index b) {
    Index pa = p.pos[a], pb = p.pos[b];
    p.elems[pa] = b;
    p.elems[pb] = a;
    p.pos[a] = pb;
    p.pos[b] = pa;
  }

  void push(Index s) {
    if (!inq_[s]) {
      inq_[s] = 1;
      queue_.push_back(s);
    }
  }

  void refine(Partition& p, const std::vector<Index>& starts) {
    for (Index s : starts) push(s);
    while (!queue_.empty()) {
      Index s = queue_.front();
      queue_.pop_front();
      inq_[s] = 0;
      if (p.discrete()) continue;
      members_.assign(p.elems.begin() + s, p.elems.begin() + s + p.len[s]);
      split_pass(p, true);
      if (g_.directed) split_pass(p, false);
    }
  }

  // Counts, for every vertex u, the arcs between u and the splitter, then
  // splits each touched cell by that count.
  void split_pass(Partition& p, bool predecessors) {
    touched_.clear();
    for (Index w : members_) {
      const auto& nb = predecessors ? g_.in[w] : g_.out[w];
      for (Index u : nb)
        if (cnt_[u]++ == 0) touched_.push_back(u);
    }
    if (touched_.empty()) return;
    p.trace = mix(p.trace, predecessors ? 0x11 : 0x22);
    std::sort(touched_.begin(), touched_.end(),
              [&](Index a, Index b) { return p.cellof[a] < p.cellof[b]; });
    for (std::size_t i = 0; i < touched_.size();) {
      const Index c = p.cellof[touched_[i]];
      std::size_t j = i;
      while (j < touched_.size() && p.cellof[touched_[j]] == c) ++j;
      split_cell(p, c, i, j);
      i = j;
    }
    for (Index u : touched_) cnt_[u] = 0;
  }

  void split_cell(Partition& p, Index c, std::size_t ti, std::size_t tj) {
    const Index L = p.len[c];
    if (L == 1) return;
    const std::size_t k = tj - ti;
    if (k == L) {
      bool uniform = true;
      for (std::size_t t = ti + 1; t < tj && uniform; ++t)
        uniform = cnt_[touched_[t]] == cnt_[touched_[ti]];
      if (uniform) {
        p.trace = mix(mix(p.trace, c), cnt_[touched_[ti]]);
        return;
      }
    }
    Index back = c + L;
    for (std::size_t t = ti; t < tj; ++t) {
      --back;
      swap_pos(p, touched_[t], p.elems[back]);
    }
    std::sort(p.elems.begin() + back, p.elems.begin() + c + L,
              [&](Index a, Index b) { return cnt_[a] < cnt_[b]; });
    for (Index q = back; q < c + L; ++q) p.pos[p.elems[q]] = q;

    frags_.clear();
    if (back > c) frags_.push_back({c, back - c, 0});
    for (Index q = back; q < c + L;) {
      Index r = q;
      while (r < c + L && cnt_[p.elems[r]] == cnt_[p.elems[q]]) ++r;
      frags_.push_back({q, r - q, cnt_[p.elems[q]]});
      q = r;
    }
    p.trace = mix(mix(p.trace, c), frags_.size());
    for (const auto& f : frags_) {
      p.len[f.start] = f.size;
      for (Index q = f.start; q < f.start + f.size; ++q) p.cellof[p.elems[q]] = f.start;
      p.trace = mix(mix(p.trace, f.size), f.count);
    }
    p.ncells += frags_.size() - 1;
    if (inq_[c]) {
      for (std::size_t f = 1; f < frags_.size(); ++f) push(frags_[f].start);
    } else {
      std::size_t big = 0;
      for (std::size_t f = 1; f < frags_.size(); ++f)
        if (frags_[f].size > frags_[big].size) big = f;
      for (std::size_t f = 0; f < frags_.size(); ++f)
        if (f != big) push(frags_[f].start);
    }
  }

  struct Frag {
    Index start;
    Index size;
    Index count;
  };

  const ColoredDigraph& g_;
  std::vector<Index> cnt_;
  std::vector<char> inq_;
  std::deque<Index> queue_;
  std::vector<Index> members_;
  std::vector<Index> touched_;
  std::vector<Frag> frags_;
};

bool has_arc(const ColoredDigraph& g, Index a, Index b) {
  const auto& o = g.out[a];
  return std::binary_search(o.begin(), o.end(), b);
}

// Checks that `map` (a -> b) is a colour- and arc-preserving bijection.
bool verify_map(const ColoredDigraph& a, const ColoredDigraph& b, const std::vector<Index>& map) {
  for (Index v = 0; v < a.n; ++v) {
    if (a.color[v] != b.color[map[v]]) return false;
    if (a.out[v].size() != b.out[map[v]].size()) return false;
    for (Index w : a.out[v])
      if (!has_arc(b, map[v], map[w])) return false;
  }
  return true;
}

struct Level {
  Partition part;
  Index target = 0;
  Index target_len = 0;
  Index chosen = 0;
};

struct FirstPath {
  std::vector<Level> levels;
  std::vector<Info> infos;  // infos[d]: after refinement at depth d
  std::vector<Index> leaf;
};

FirstPath first_path(const ColoredDigraph& g, Refiner& r) {
  FirstPath fp;
  Partition cur = r.initial();
  fp.infos.push_back({cur.ncells, cur.trace});
  while (!cur.discrete()) {
    Level lv;
    lv.target = cur.first_nonsingleton();
    lv.target_len = cur.len[lv.target];
    lv.chosen = *std::min_element(cur.elems.begin() + lv.target,
                                  cur.elems.begin() + lv.target + lv.target_len);
    lv.part = cur;
    r.individualize(cur, lv.chosen);
    fp.infos.push_back({cur.ncells, cur.trace});
    fp.levels.push_back(std::move(lv));
  }
  fp.leaf = cur.elems;
  (void)g;
  return fp;
}

// Depth-first search for a leaf equivalent to the first path, in `target`.
std::optional<std::vector<Index>> descend(const ColoredDigraph& source,
                                          const ColoredDigraph& target, Refiner& r,
                                          const FirstPath& fp, const Partition& p,
                                          std::size_t depth) {
  if (p.discrete()) {
    std::vector<Index> map(source.n);
    for (Index i = 0; i < source.n; ++i) map[fp.leaf[i]] = p.elems[i];
    if (verify_map(source, target, map)) return map;
    return std::nullopt;
  }
  if (depth >= fp.levels.size()) return std::nullopt;
  const Level& lv = fp.levels[depth];
  Index t = p.first_nonsingleton();
  if (t != lv.target || p.len[t] != lv.target_len) return std::nullopt;
  std::vector<Index> cell(p.elems.begin() + t, p.elems.begin() + t + p.len[t]);
  std::sort(cell.begin(), cell.end());
  for (Index u : cell) {
    Partition q = p;
    r.individualize(q, u);
    if (!(Info{q.ncells, q.trace} == fp.infos[depth + 1])) continue;
    if (auto m = descend(source, target, r, fp, q, depth + 1)) return m;
  }
  return std::nullopt;
}

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct AutResult {
  std::vector<Permutation> generators;
  std::optional<std::uint64_t> order;
};

AutResult automorphisms(const ColoredDigraph& g) {
  AutResult res;
  if (g.n == 0) {
    res.order = 1;
    return res;
  }
  Refiner r(g);
  FirstPath fp = first_path(g, r);
  UnionFind uf(g.n);
  std::uint64_t order = 1;
  bool overflow = false;
  std::vector<std::vector<Index>> gens;
  for (std::size_t d = fp.levels.size(); d-- > 0;) {
    const Level& lv = fp.levels[d];
    std::vector<Index> cell(lv.part.elems.begin() + lv.target,
                            lv.part.elems.begin() + lv.target + lv.target_len);
    std::sort(cell.begin(), cell.end());
    std::vector<Index> failed;
    for (Index w : cell) {
      if (w == lv.chosen || uf.find(w) == uf.find(lv.chosen)) continue;
      bool skip = false;
      for (Index f : failed)
        if (uf.find(f) == uf.find(w)) {
          skip = true;
          break;
        }
      if (skip) continue;
      Partition q = lv.part;
      r.individualize(q, w);
      std::optional<std::vector<Index>> m;
      if (Info{q.ncells, q.trace} == fp.infos[d + 1]) m = descend(g, g, r, fp, q, d + 1);
      if (m) {
        for (Index x = 0; x < g.n; ++x) uf.unite(x, (*m)[x]);
        gens.push_back(std::move(*m));
      } else {
        failed.push_back(w);
      }
    }
    std::uint64_t orbit = 0;
    for (Index w : cell)
      if (uf.find(w) == uf.find(lv.chosen)) ++orbit;
    if (__builtin_mul_overflow(order, orbit, &order)) overflow = true;
  }
  std::sort(gens.begin(), gens.end());
  for (auto& m : gens) res.generators.emplace_back(std::move(m));
  if (!overflow) res.order = order;
  return res;
}

std::optional<std::vector<Index>> find_isomorphism(const ColoredDigraph& a,
                                                   const ColoredDigraph& b) {
  if (a.n != b.n || a.arcs != b.arcs || a.directed != b.directed) return std::nullopt;
  if (a.n == 0) return std::vector<Index>{};
  Refiner ra(a);
  FirstPath fp = first_path(a, ra);
  Refiner rb(b);
  Partition root = rb.initial();
  if (!(Info{root.ncells, root.trace} == fp.infos[0])) return std::nullopt;
  return descend(a, b, rb, fp, root, 0);
}

void collect_leaves(const ColoredDigraph& g, Refiner& r, const Partition& p,
                    const SimpleGraph& sg, std::string& best) {
  if (p.discrete()) {
    std::string w = adjacency_word(sg, p.elems);
    if (best.empty() || w < best) best = std::move(w);
    return;
  }
  Index t = p.first_nonsingleton();
  for (Index k = t; k < t + p.len[t]; ++k) {
    Partition q = p;
    r.individualize(q, p.elems[k]);
    collect_leaves(g, r, q, sg, best);
  }
}

ColoredDigraph graph_digraph(const SimpleGraph& g, const std::vector<int>* colors,
                             std::size_t bound) {
  if (g.order() > bound)
    throw CapExceeded("graph has " + std::to_string(g.order()) + " vertices, bound is " +
                      std::to_string(bound));
  ColoredDigraph d;
  d.n = g.order();
  d.directed = false;
  d.out.resize(d.n);
  for (Index v = 0; v < d.n; ++v) d.out[v].assign(g.neighbors(v).begin(), g.neighbors(v).end());
  d.in = d.out;
  d.arcs = 2 * g.edge_count();
  d.color.assign(d.n, 0);
  if (colors) {
    if (colors->size() != d.n) throw InvalidInput("colour vector size does not match graph order");
    for (Index v = 0; v < d.n; ++v)
      d.color[v] = static_cast<std::uint64_t>(static_cast<std::int64_t>((*colors)[v]));
  }
  return d;
}

ColoredDigraph poset_digraph(const Poset& p, std::size_t bound) {
  if (p.size() > bound)
    throw CapExceeded("poset has " + std::to_string(p.size()) + " elements, bound is " +
                      std::to_string(bound));
  ColoredDigraph d;
  d.n = p.size();
  d.directed = true;
  d.out.resize(d.n);
  d.in.resize(d.n);
  d.color.resize(d.n);
  for (Index v = 0; v < d.n; ++v) {
    d.out[v].assign(p.upper_covers(v).begin(), p.upper_covers(v).end());
    d.in[v].assign(p.lower_covers(v).begin(), p.lower_covers(v).end());
    d.color[v] = (static_cast<std::uint64_t>(p.depth_below()[v]) << 32) | p.depth_above()[v];
  }
  d.arcs = p.cover_count();
  return d;
}

}  // namespace

PermGroup aut_graph(const SimpleGraph& g, const std::vector<int>* colors,
                    const SearchOptions& opts) {
  auto d = graph_digraph(g, colors, opts.max_vertices);
  auto r = automorphisms(d);
  PermGroup out(g.vertices(), std::move(r.generators));
  out.certified_order = r.order;
  return out;
}

PermGroup aut_poset(const Poset& p, const SearchOptions& opts) {
  auto d = poset_digraph(p, opts.max_vertices);
  auto r = automorphisms(d);
  PermGroup out(p.elements(), std::move(r.generators));
  out.certified_order = r.order;
  return out;
}

std::optional<std::vector<Index>> isomorphic(const Poset& a, const Poset& b,
                                             const SearchOptions& opts) {
  return find_isomorphism(poset_digraph(a, opts.max_vertices), poset_digraph(b, opts.max_vertices));
}

std::optional<std::vector<Index>> isomorphic(const SimpleGraph& a, const SimpleGraph& b,
                                             const SearchOptions& opts) {
  return find_isomorphism(graph_digraph(a, nullptr, opts.max_vertices),
                          graph_digraph(b, nullptr, opts.max_vertices));
}

std::string canonical_form(const SimpleGraph& g) {
  auto d = graph_digraph(g, nullptr, 64);
  if (d.n == 0) return "0:";
  Refiner r(d);
  Partition root = r.initial();
  std::string best;
  collect_leaves(d, r, root, g, best);
  return std::to_string(d.n) + ":" + best;
}

bool is_graph_automorphism(const SimpleGraph& g, const Permutation& p) {
  if (p.size() != g.order()) return false;
  for (auto [a, b] : g.edges())
    if (!g.adjacent(p(a), p(b))) return false;
  return true;
}

bool is_poset_automorphism(const Poset& p, const Permutation& f) {
  if (f.size() != p.size()) return false;
  std::size_t count = 0;
  for (Index a = 0; a < p.size(); ++a)
    for (Index b : p.upper_covers(a)) {
      auto up = p.upper_covers(f(a));
      if (!std::binary_search(up.begin(), up.end(), f(b))) return false;
      ++count;
    }
  return count == p.cover_count();
}

// -------------------------------------------------------------- group algebra

GroupElements enumerate_elements(const PermGroup& g, std::size_t cap) {
  GroupElements out;
  std::unordered_map<Permutation, std::size_t, PermutationHash> seen;
  Permutation id = Permutation::identity(g.degree());
  out.elements.push_back(id);
  out.parent.push_back(0);
  out.via.push_back(0);
  seen.emplace(id, 0);
  for (std::size_t i = 0; i < out.elements.size(); ++i) {
    for (std::size_t s = 0; s < g.generators().size(); ++s) {
      Permutation x = out.elements[i] * g.generators()[s];
      if (seen.count(x)) continue;
      if (out.elements.size() >= cap)
        throw CapExceeded("group closure exceeds cap of " + std::to_string(cap) + " elements");
      seen.emplace(x, out.elements.size());
      out.elements.push_back(std::move(x));
      out.parent.push_back(i);
      out.via.push_back(s);
    }
  }
  return out;
}

std::uint64_t group_order(const PermGroup& g, std::size_t cap) {
  return enumerate_elements(g, cap).elements.size();
}

std::vector<std::vector<Index>> orbits(const PermGroup& g, std::span<const Index> subset) {
  const std::size_t n = g.degree();
  std::vector<char> in(n, 0);
  for (Index x : subset) {
    if (x >= n) throw InvalidInput("orbit subset index out of range");
    in[x] = 1;
  }
  UnionFind uf(n);
  for (std::size_t k = 0; k < g.generators().size(); ++k) {
    const auto& s = g.generators()[k];
    for (Index x : subset) {
      if (!in[s(x)])
        throw NotInvariant("generator " + std::to_string(k) + " maps '" + g.domain()[x] +
                           "' to '" + g.domain()[s(x)] + "' outside the subset");
      uf.unite(x, s(x));
    }
  }
  std::unordered_map<Index, std::vector<Index>> groups;
  std::vector<Index> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::vector<Index>> out;
  std::unordered_map<Index, std::size_t> slot;
  for (Index x : sorted) {
    Index r = uf.find(x);
    auto it = slot.find(r);
    if (it == slot.end()) {
      slot.emplace(r, out.size());
      out.push_back({x});
    } else {
      out[it->second].push_back(x);
    }
  }
  return out;
}

std::vector<std::vector<Index>> orbits(const PermGroup& g) {
  std::vector<Index> all(g.degree());
  std::iota(all.begin(), all.end(), 0);
  return orbits(g, all);
}

bool ActionMap::is_homomorphism(std::size_t cap) const {
  if (images.size() != source.generators().size()) return false;
  for (const auto& im : images)
    if (im.size() != target.size()) return false;
  auto el = enumerate_elements(source, cap);
  std::unordered_map<Permutation, std::size_t, PermutationHash> index;
  for (std::size_t i = 0; i < el.elements.size(); ++i) index.emplace(el.elements[i], i);
  std::vector<Permutation> img(el.elements.size());
  img[0] = Permutation::identity(target.size());
  for (std::size_t i = 1; i < el.elements.size(); ++i) img[i] = img[el.parent[i]] * images[el.via[i]];
  for (std::size_t i = 0; i < el.elements.size(); ++i)
    for (std::size_t s = 0; s < images.size(); ++s) {
      std::size_t j = index.at(el.elements[i] * source.generators()[s]);
      if (!(img[j] == img[i] * images[s])) return false;
    }
  return true;
}

Permutation ActionMap::image_of(const Permutation& source_element, std::size_t cap) const {
  auto el = enumerate_elements(source, cap);
  std::vector<Permutation> img(el.elements.size());
  img[0] = Permutation::identity(target.size());
  for (std::size_t i = 0; i < el.elements.size(); ++i) {
    if (i > 0) img[i] = img[el.parent[i]] * images[el.via[i]];
    if (el.elements[i] == source_element) return img[i];
  }
  throw InvalidInput("element is not in the source group");
}

ActionMap restrict_action(const PermGroup& g, std::span<const Index> subset) {
  const std::size_t n = g.degree();
  std::vector<Index> local(n, UINT32_MAX);
  ActionMap a;
  a.source = g;
  for (Index k = 0; k < subset.size(); ++k) {
    if (subset[k] >= n) throw InvalidInput("subset index out of range");
    local[subset[k]] = k;
    a.target.push_back(g.domain()[subset[k]]);
  }
  for (std::size_t k = 0; k < g.generators().size(); ++k) {
    const auto& s = g.generators()[k];
    std::vector<Index> im(subset.size());
    for (Index i = 0; i < subset.size(); ++i) {
      Index y = s(subset[i]);
      if (local[y] == UINT32_MAX)
        throw NotInvariant("generator " + std::to_string(k) + " (" + s.cycles(g.domain()) +
                           ") maps '" + g.domain()[subset[i]] + "' to '" + g.domain()[y] +
                           "' outside the subset");
      im[i] = local[y];
    }
    a.images.emplace_back(std::move(im));
  }
  return a;
}

namespace {

struct GroupTable {
  std::vector<Permutation> el;
  std::vector<std::vector<std::uint32_t>> mul;
  std::vector<std::uint32_t> inv;
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> class_size;
};

GroupTable make_table(const PermGroup& g, std::size_t cap) {
  GroupTable t;
  auto e = enumerate_elements(g, cap + 1);
  if (e.elements.size() > cap)
    throw CapExceeded("group order exceeds cap of " + std::to_string(cap));
  t.el = std::move(e.elements);
  const std::size_t N = t.el.size();
  const std::size_t deg = g.degree();

  // A base: points whose images separate all elements.
  std::vector<Index> base;
  auto key_of = [&](const Permutation& p) {
    std::vector<Index> k;
    k.reserve(base.size());
    for (Index b : base) k.push_back(p(b));
    return k;
  };
  auto distinct = [&]() {
    std::set<std::vector<Index>> keys;
    for (const auto& p : t.el) keys.insert(key_of(p));
    return keys.size() == N;
  };
  for (Index x = 0; x < deg && !distinct(); ++x) {
    bool moves = false;
    for (const auto& p : t.el)
      if (p(x) != x) {
        moves = true;
        break;
      }
    if (moves) base.push_back(x);
  }
  std::map<std::vector<Index>, std::uint32_t> by_key;
  for (std::uint32_t i = 0; i < N; ++i) by_key.emplace(key_of(t.el[i]), i);

  t.mul.assign(N, std::vector<std::uint32_t>(N));
  std::vector<Index> k(base.size());
  for (std::uint32_t a = 0; a < N; ++a)
    for (std::uint32_t b = 0; b < N; ++b) {
      for (std::size_t i = 0; i < base.size(); ++i) k[i] = t.el[a](t.el[b](base[i]));
      t.mul[a][b] = by_key.at(k);
    }
  t.inv.resize(N);
  for (std::uint32_t a = 0; a < N; ++a)
    for (std::uint32_t b = 0; b < N; ++b)
      if (t.mul[a][b] == 0) t.inv[a] = b;
  t.order.resize(N);
  for (std::uint32_t a = 0; a < N; ++a) {
    std::uint32_t x = a, o = 1;
    while (x != 0) {
      x = t.mul[x][a];
      ++o;
    }
    t.order[a] = o;
  }
  t.class_size.resize(N);
  for (std::uint32_t a = 0; a < N; ++a) {
    std::set<std::uint32_t> cls;
    for (std::uint32_t g2 = 0; g2 < N; ++g2) cls.insert(t.mul[t.mul[t.inv[g2]][a]][g2]);
    t.class_size[a] = static_cast<std::uint32_t>(cls.size());
  }
  return t;
}

std::size_t subgroup_size(const GroupTable& t, const std::vector<std::uint32_t>& gens) {
  std::vector<char> in(t.el.size(), 0);
  std::vector<std::uint32_t> q{0};
  in[0] = 1;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (auto s : gens) {
      auto y = t.mul[q[i]][s];
      if (!in[y]) {
        in[y] = 1;
        q.push_back(y);
      }
    }
  return q.size();
}

// Extends a partial generator assignment to the generated subgroup; false on
// any inconsistency or collision.
bool extend(const GroupTable& a, const GroupTable& b, const std::vector<std::uint32_t>& gens,
            const std::vector<std::uint32_t>& imgs, std::vector<std::int64_t>& phi) {
  const std::size_t N = a.el.size();
  phi.assign(N, -1);
  std::vector<char> used(N, 0);
  phi[0] = 0;
  used[0] = 1;
  std::vector<std::uint32_t> q{0};
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto x = q[i];
    for (std::size_t k = 0; k < imgs.size(); ++k) {
      auto y = a.mul[x][gens[k]];
      auto fy = b.mul[static_cast<std::uint32_t>(phi[x])][imgs[k]];
      if (phi[y] < 0) {
        if (used[fy]) return false;
        phi[y] = fy;
        used[fy] = 1;
        q.push_back(y);
      } else if (phi[y] != fy) {
        return false;
      }
    }
  }
  return true;
}

bool backtrack(const GroupTable& a, const GroupTable& b, const std::vector<std::uint32_t>& gens,
               std::vector<std::uint32_t>& imgs, std::vector<std::int64_t>& phi) {
  if (imgs.size() == gens.size()) return extend(a, b, gens, imgs, phi);
  auto g = gens[imgs.size()];
  for (std::uint32_t c = 0; c < b.el.size(); ++c) {
    if (b.order[c] != a.order[g] || b.class_size[c] != a.class_size[g]) continue;
    imgs.push_back(c);
    if (extend(a, b, std::vector<std::uint32_t>(gens.begin(), gens.begin() + imgs.size()), imgs,
               phi) &&
        backtrack(a, b, gens, imgs, phi))
      return true;
    imgs.pop_back();
  }
  return false;
}

}  // namespace

std::optional<GroupIsomorphism> groups_isomorphic(const PermGroup& a, const PermGroup& b,
                                                  std::size_t cap) {
  GroupTable ta = make_table(a, cap);
  GroupTable tb = make_table(b, cap);
  const std::size_t N = ta.el.size();
  if (N != tb.el.size()) return std::nullopt;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> profile;
  for (std::size_t i = 0; i < N; ++i) {
    ++profile[{ta.order[i], ta.class_size[i]}];
    --profile[{tb.order[i], tb.class_size[i]}];
  }
  for (auto& [k, v] : profile)
    if (v != 0) return std::nullopt;

  std::vector<std::uint32_t> by_order(N);
  std::iota(by_order.begin(), by_order.end(), 0);
  std::stable_sort(by_order.begin(), by_order.end(),
                   [&](auto x, auto y) { return ta.order[x] > ta.order[y]; });
  std::vector<std::uint32_t> gens;
  for (auto x : by_order) {
    if (subgroup_size(ta, gens) == N) break;
    auto before = subgroup_size(ta, gens);
    gens.push_back(x);
    if (subgroup_size(ta, gens) == before) gens.pop_back();
  }
  std::vector<std::uint32_t> imgs;
  std::vector<std::int64_t> phi;
  if (!backtrack(ta, tb, gens, imgs, phi)) return std::nullopt;
  if (!extend(ta, tb, gens, imgs, phi)) return std::nullopt;
  for (std::size_t x = 0; x < N; ++x) {
    if (phi[x] < 0) return std::nullopt;
    for (std::size_t y = 0; y < N; ++y)
      if (phi[ta.mul[x][y]] != tb.mul[phi[x]][phi[y]]) return std::nullopt;
  }
  GroupIsomorphism iso;
  std::unordered_map<Permutation, std::size_t, PermutationHash> index;
  for (std::size_t i = 0; i < N; ++i) index.emplace(ta.el[i], i);
  for (const auto& g : a.generators()) iso.generator_images.push_back(tb.el[phi[index.at(g)]]);
  for (std::size_t i = 0; i < N; ++i) iso.table.emplace_back(ta.el[i], tb.el[phi[i]]);
  return iso;
}

GroupIsomorphism identity_isomorphism(const PermGroup& g, std::size_t cap) {
  GroupIsomorphism iso;
  iso.generator_images = g.generators();
  for (const auto& e : enumerate_elements(g, cap + 1).elements) {
    if (iso.table.size() >= cap) throw CapExceeded("group order exceeds cap");
    iso.table.emplace_back(e, e);
  }
  return iso;
}

bool actions_equal(const ActionMap& phi, const ActionMap& rho, const GroupIsomorphism& iso) {
  if (phi.target.size() != rho.target.size())
    throw InvalidInput("actions have target domains of different size");
  std::unordered_map<std::string, Index> rpos;
  for (Index i = 0; i < rho.target.size(); ++i) rpos.emplace(rho.target[i], i);
  std::vector<Index> to_rho(phi.target.size());
  for (Index i = 0; i < phi.target.size(); ++i) {
    auto it = rpos.find(phi.target[i]);
    if (it == rpos.end()) throw InvalidInput("target domains differ at '" + phi.target[i] + "'");
    to_rho[i] = it->second;
  }
  if (iso.generator_images.size() != phi.source.generators().size())
    throw InvalidInput("isomorphism does not match the source generators");
  for (std::size_t k = 0; k < phi.images.size(); ++k) {
    Permutation r = rho.image_of(iso.generator_images[k]);
    for (Index x = 0; x < phi.target.size(); ++x)
      if (to_rho[phi.images[k](x)] != r(to_rho[x])) return false;
  }
  return true;
}

}  // namespace alexrealize
