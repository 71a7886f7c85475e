#include "alexrealize/homology.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include "alexrealize/errors.hpp"

namespace alexrealize {

namespace {

std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("chain coefficient overflow");
  return r;
}

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("chain coefficient overflow");
  return r;
}

std::int64_t to_int64(const mpz_class& v) {
  if (!v.fits_slong_p()) throw ArithmeticOverflow("integer " + v.get_str() + " exceeds 64 bits");
  return v.get_si();
}

}  // namespace

// -------------------------------------------------------------- AbelianGroup

AbelianGroup::AbelianGroup(std::size_t rank, const std::vector<std::int64_t>& torsion)
    : rank_(rank) {
  std::map<std::int64_t, std::vector<int>> by_prime;
  for (std::int64_t t : torsion) {
    if (t <= 0) throw InvalidInput("torsion coefficient must be positive, got " + std::to_string(t));
    std::int64_t x = t;
    for (std::int64_t p = 2; p * p <= x; ++p) {
      int e = 0;
      while (x % p == 0) {
        x /= p;
        ++e;
      }
      if (e) by_prime[p].push_back(e);
    }
    if (x > 1) by_prime[x].push_back(1);
  }
  std::size_t k = 0;
  for (auto& [p, es] : by_prime) {
    std::sort(es.rbegin(), es.rend());
    k = std::max(k, es.size());
  }
  // Invariant factor i (counted from the largest) collects the i-th largest
  // prime power of every prime.
  std::vector<std::int64_t> inv(k, 1);
  for (auto& [p, es] : by_prime)
    for (std::size_t i = 0; i < es.size(); ++i)
      for (int e = 0; e < es[i]; ++e) inv[i] = mul_checked(inv[i], p);
  std::reverse(inv.begin(), inv.end());
  torsion_ = std::move(inv);
}

AbelianGroup operator+(const AbelianGroup& a, const AbelianGroup& b) {
  std::vector<std::int64_t> t(a.torsion_);
  t.insert(t.end(), b.torsion_.begin(), b.torsion_.end());
  return AbelianGroup(a.rank_ + b.rank_, t);
}

AbelianGroup AbelianGroup::power(std::size_t copies) const {
  AbelianGroup r;
  for (std::size_t i = 0; i < copies; ++i) r = r + *this;
  return r;
}

std::string AbelianGroup::to_string() const {
  if (is_zero()) return "0";
  std::string s;
  if (rank_ > 0) s = rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
  std::map<std::int64_t, int> mult;
  std::vector<std::int64_t> order;
  for (auto t : torsion_) {
    if (!mult[t]++) order.push_back(t);
  }
  for (auto t : order) {
    if (!s.empty()) s += " + ";
    s += "Z/" + std::to_string(t);
    if (mult[t] > 1) s += "^" + std::to_string(mult[t]);
  }
  return s;
}

// ----------------------------------------------------------------- matrices

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw InvalidInput("matrix dimension mismatch");
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

namespace {

class SmithWorker {
 public:
  explicit SmithWorker(const IntMatrix& m)
      : D(m),
        U(IntMatrix::identity(m.rows)),
        Ui(IntMatrix::identity(m.rows)),
        V(IntMatrix::identity(m.cols)),
        Vi(IntMatrix::identity(m.cols)) {}

  // row i += q * row j
  void add_row(std::size_t i, std::size_t j, const mpz_class& q) {
    for (std::size_t c = 0; c < D.cols; ++c) D(i, c) += q * D(j, c);
    for (std::size_t c = 0; c < U.cols; ++c) U(i, c) += q * U(j, c);
    for (std::size_t r = 0; r < Ui.rows; ++r) Ui(r, j) -= q * Ui(r, i);
  }
  // col i += q * col j
  void add_col(std::size_t i, std::size_t j, const mpz_class& q) {
    for (std::size_t r = 0; r < D.rows; ++r) D(r, i) += q * D(r, j);
    for (std::size_t r = 0; r < V.rows; ++r) V(r, i) += q * V(r, j);
    for (std::size_t c = 0; c < Vi.cols; ++c) Vi(j, c) -= q * Vi(i, c);
  }
  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < D.cols; ++c) std::swap(D(i, c), D(j, c));
    for (std::size_t c = 0; c < U.cols; ++c) std::swap(U(i, c), U(j, c));
    for (std::size_t r = 0; r < Ui.rows; ++r) std::swap(Ui(r, i), Ui(r, j));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < D.rows; ++r) std::swap(D(r, i), D(r, j));
    for (std::size_t r = 0; r < V.rows; ++r) std::swap(V(r, i), V(r, j));
    for (std::size_t c = 0; c < Vi.cols; ++c) std::swap(Vi(i, c), Vi(j, c));
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < D.cols; ++c) D(i, c) = -D(i, c);
    for (std::size_t c = 0; c < U.cols; ++c) U(i, c) = -U(i, c);
    for (std::size_t r = 0; r < Ui.rows; ++r) Ui(r, i) = -Ui(r, i);
  }

  std::size_t run() {
    const std::size_t m = D.rows, n = D.cols;
    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
      // smallest nonzero of the trailing block
      std::size_t bi = m, bj = n;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (D(i, j) != 0 && (bi == m || abs(D(i, j)) < abs(D(bi, bj)))) {
            bi = i;
            bj = j;
          }
      if (bi == m) break;
      swap_rows(t, bi);
      swap_cols(t, bj);
      while (true) {
        bool clean = true;
        for (std::size_t i = t + 1; i < m; ++i) {
          if (D(i, t) == 0) continue;
          mpz_class q = D(i, t) / D(t, t);
          if (q != 0) add_row(i, t, -q);
          if (D(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < n; ++j) {
          if (D(t, j) == 0) continue;
          mpz_class q = D(t, j) / D(t, t);
          if (q != 0) add_col(j, t, -q);
          if (D(t, j) != 0) clean = false;
        }
        if (!clean) {
          std::size_t bi2 = t, bj2 = t;
          for (std::size_t i = t + 1; i < m; ++i)
            if (D(i, t) != 0 && abs(D(i, t)) < abs(D(bi2, bj2))) {
              bi2 = i;
              bj2 = t;
            }
          for (std::size_t j = t + 1; j < n; ++j)
            if (D(t, j) != 0 && abs(D(t, j)) < abs(D(bi2, bj2))) {
              bi2 = t;
              bj2 = j;
            }
          swap_rows(t, bi2);
          swap_cols(t, bj2);
          continue;
        }
        bool divides = true;
        for (std::size_t i = t + 1; i < m && divides; ++i)
          for (std::size_t j = t + 1; j < n; ++j)
            if (D(i, j) % D(t, t) != 0) {
              add_row(t, i, 1);
              divides = false;
              break;
            }
        if (divides) break;
      }
      if (D(t, t) < 0) negate_row(t);
    }
    return t;
  }

  IntMatrix D, U, Ui, V, Vi;
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  SmithWorker w(m);
  SmithForm f;
  f.rank = w.run();
  f.D = std::move(w.D);
  f.U = std::move(w.U);
  f.U_inv = std::move(w.Ui);
  f.V = std::move(w.V);
  f.V_inv = std::move(w.Vi);
  return f;
}

std::vector<mpz_class> sparse_elimination_diagonal(std::size_t rows, std::size_t cols,
                                                   std::vector<SparseEntry> entries) {
  std::vector<std::map<std::uint32_t, mpz_class>> row(rows);
  std::vector<std::set<std::uint32_t>> col(cols);
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) throw InvalidInput("sparse entry out of range");
    if (e.value == 0) continue;
    mpz_class& v = row[e.row][e.col];
    v += e.value;
    if (v == 0) {
      row[e.row].erase(e.col);
      col[e.col].erase(e.row);
    } else {
      col[e.col].insert(e.row);
    }
  }
  auto set_entry = [&](std::uint32_t r, std::uint32_t c, const mpz_class& v) {
    if (v == 0) {
      row[r].erase(c);
      col[c].erase(r);
    } else {
      row[r][c] = v;
      col[c].insert(r);
    }
  };
  // row_i -= q * row_r
  auto row_sub = [&](std::uint32_t i, std::uint32_t r, const mpz_class& q) {
    for (const auto& [c, v] : row[r]) {
      auto it = row[i].find(c);
      mpz_class nv = (it == row[i].end() ? mpz_class(0) : it->second) - q * v;
      set_entry(i, c, nv);
    }
  };

  std::vector<mpz_class> diag;
  while (true) {
    bool found = false;
    std::uint32_t pr = 0, pc = 0;
    mpz_class best;
    std::size_t best_fill = 0;
    for (std::uint32_t r = 0; r < rows; ++r)
      for (const auto& [c, v] : row[r]) {
        std::size_t fill = (row[r].size() - 1) * (col[c].size() - 1);
        mpz_class a = abs(v);
        if (!found || a < best || (a == best && fill < best_fill)) {
          found = true;
          best = a;
          best_fill = fill;
          pr = r;
          pc = c;
        }
      }
    if (!found) break;
    while (true) {
      const mpz_class p = row[pr].at(pc);
      bool clean = true;
      std::vector<std::uint32_t> others(col[pc].begin(), col[pc].end());
      for (std::uint32_t i : others) {
        if (i == pr) continue;
        mpz_class q = row[i].at(pc) / p;
        if (q != 0) row_sub(i, pr, q);
        if (row[i].count(pc)) clean = false;
      }
      if (!clean) {
        for (std::uint32_t i : col[pc])
          if (abs(row[i].at(pc)) < abs(row[pr].at(pc))) pr = i;
        continue;
      }
      // Column pc is now only the pivot, so column operations against it
      // touch row pr alone.
      std::vector<std::pair<std::uint32_t, mpz_class>> rest;
      for (const auto& [c, v] : row[pr])
        if (c != pc) rest.emplace_back(c, v);
      bool row_clean = true;
      for (auto& [c, v] : rest) {
        mpz_class r = v % p;
        set_entry(pr, c, r);
        if (r != 0) row_clean = false;
      }
      if (!row_clean) {
        for (const auto& [c, v] : row[pr])
          if (abs(v) < abs(row[pr].at(pc))) pc = c;
        continue;
      }
      diag.push_back(abs(p));
      set_entry(pr, pc, 0);
      break;
    }
  }
  return diag;
}

// --------------------------------------------------------- simplicial complex

void validate_complex(const SimplicialComplex& k) {
  std::vector<char> used(k.vertices.size(), 0);
  for (const auto& f : k.facets) {
    if (f.empty()) throw InvalidInput("empty facet");
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] >= k.vertices.size()) throw InvalidInput("facet vertex out of range");
      if (i && f[i] <= f[i - 1]) throw InvalidInput("facet vertices not strictly sorted");
      used[f[i]] = 1;
    }
  }
  for (std::size_t v = 0; v < used.size(); ++v)
    if (!used[v]) throw InvalidInput("vertex '" + k.vertices[v] + "' lies in no facet");
  for (std::size_t a = 0; a < k.facets.size(); ++a)
    for (std::size_t b = 0; b < k.facets.size(); ++b)
      if (a != b && std::includes(k.facets[b].begin(), k.facets[b].end(), k.facets[a].begin(),
                                  k.facets[a].end()))
        throw InvalidInput("facet contained in another facet");
}

std::size_t dimension(const SimplicialComplex& k) {
  std::size_t d = 0;
  for (const auto& f : k.facets) d = std::max(d, f.size() - 1);
  return d;
}

SimplicialComplex order_complex(const Poset& p) {
  if (p.empty()) throw EmptyInput("order complex of the empty poset");
  SimplicialComplex k;
  k.vertices = p.elements();
  for (auto c : maximal_chains(p, SIZE_MAX)) {
    std::sort(c.begin(), c.end());
    k.facets.push_back(std::move(c));
  }
  std::sort(k.facets.begin(), k.facets.end());
  return k;
}

// ------------------------------------------------------------ poset homology

namespace {

enum : std::uint8_t { kAlive = 0, kCritical = 1, kUp = 2, kDown = 3 };

struct BasisData {
  HomologyBasis basis;
  IntMatrix P;  // U of the SNF of the incoming boundary
  std::size_t rB = 0;
  std::vector<mpz_class> dB;  // first rB diagonal entries
  IntMatrix VinvA;
  std::size_t rA = 0;
  std::vector<std::size_t> torsion_slots;  // indices j < rB with d_j > 1
};

}  // namespace

struct PosetHomology::Impl {
  Poset poset;
  HomologyOptions opts;
  int dim = 0;
  // Cells are grouped by dimension; level L holds dimension L - 1.
  std::vector<std::uint32_t> level_start;
  std::vector<std::uint64_t> vstart;
  std::vector<Index> verts;
  std::vector<std::uint32_t> face_start, faces;
  std::vector<std::uint32_t> coface_start, cofaces;
  std::vector<std::uint32_t> table;
  std::uint64_t table_mask = 0;

  std::vector<std::uint8_t> kind;
  std::vector<std::uint32_t> partner;
  std::vector<std::uint32_t> when;
  std::vector<std::vector<std::uint32_t>> critical;  // by level
  std::vector<std::uint32_t> crit_index;
  // Morse boundary of level L -> level L-1, as sparse columns.
  std::vector<std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>>> morse_bd;

  std::map<int, AbelianGroup> groups;
  std::map<int, BasisData> bases;

  std::size_t cells() const { return vstart.size() - 1; }
  int level_of(std::uint32_t c) const {
    auto it = std::upper_bound(level_start.begin(), level_start.end(), c);
    return static_cast<int>(it - level_start.begin()) - 1;
  }
  std::span<const Index> vertices(std::uint32_t c) const {
    return {verts.data() + vstart[c], verts.data() + vstart[c + 1]};
  }
  static std::uint64_t hash(std::span<const Index> v) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ v.size();
    for (Index x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return h;
  }
  std::optional<std::uint32_t> lookup(std::span<const Index> v) const {
    std::uint64_t h = hash(v) & table_mask;
    while (true) {
      std::uint32_t c = table[h];
      if (c == UINT32_MAX) return std::nullopt;
      auto cv = vertices(c);
      if (cv.size() == v.size() && std::equal(cv.begin(), cv.end(), v.begin())) return c;
      h = (h + 1) & table_mask;
    }
  }
  int sign(std::size_t k) const { return (k & 1) ? -1 : 1; }
  // Coefficient of face f in the boundary of c. Written as an early-exit
  // search: gcc 11 at -O3 miscompiled the last-match loop form.
  int incidence(std::uint32_t c, std::uint32_t f) const {
    for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k)
      if (faces[k] == f) return sign(k - face_start[c]);
    throw Error("internal: matched cell is not a face of its partner");
  }

  void enumerate();
  void build_incidence();
  void check_boundary_squared() const;
  void coreduce();
  void trivial_matching();
  std::vector<std::pair<std::uint32_t, std::int64_t>> project(
      const std::vector<std::pair<std::uint32_t, std::int64_t>>& chain) const;
  SparseChain lift(int level, const std::vector<std::int64_t>& morse) const;
  void compute_groups();
  BasisData& basis_data(int d);
};

void PosetHomology::Impl::enumerate() {
  const std::size_t n = poset.size();
  const auto up = strict_up_sets(poset);
  const std::size_t levels = static_cast<std::size_t>(dim) + 2;
  std::vector<std::vector<Index>> flat(levels);
  std::vector<std::size_t> count(levels, 0);
  count[0] = 1;
  std::size_t total = 0;
  std::vector<Index> chain;
  // Depth-first over chains; each chain is recorded at its level.
  std::function<void()> rec = [&]() {
    const std::size_t L = chain.size();
    flat[L].insert(flat[L].end(), chain.begin(), chain.end());
    ++count[L];
    if (++total > opts.simplex_budget)
      throw CapExceeded("order complex exceeds the simplex budget of " +
                        std::to_string(opts.simplex_budget) + " simplices (poset has " +
                        std::to_string(n) + " elements, height " + std::to_string(dim) +
                        "); raise the budget or reduce the poset to its core first");
    for (Index y : up[chain.back()]) {
      chain.push_back(y);
      rec();
      chain.pop_back();
    }
  };
  for (Index x : poset.linear_extension()) {
    chain.assign(1, x);
    rec();
  }
  // Chains are emitted bottom to top by construction; sort each level so
  // that cell numbering does not depend on traversal details.
  level_start.assign(levels + 1, 0);
  vstart.assign(1, 0);
  verts.clear();
  std::uint32_t id = 0;
  for (std::size_t L = 0; L < levels; ++L) {
    level_start[L] = id;
    if (L == 0) {
      vstart.push_back(0);
      ++id;
      continue;
    }
    const std::size_t c = count[L];
    std::vector<std::uint32_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    const auto& f = flat[L];
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(f.begin() + a * L, f.begin() + (a + 1) * L,
                                          f.begin() + b * L, f.begin() + (b + 1) * L);
    });
    for (auto o : order) {
      verts.insert(verts.end(), f.begin() + o * L, f.begin() + (o + 1) * L);
      vstart.push_back(verts.size());
      ++id;
    }
    flat[L].clear();
    flat[L].shrink_to_fit();
  }
  level_start[levels] = id;
}

void PosetHomology::Impl::build_incidence() {
  const std::size_t N = cells();
  std::size_t cap = 1;
  while (cap < 2 * N) cap <<= 1;
  table.assign(cap, UINT32_MAX);
  table_mask = cap - 1;
  for (std::uint32_t c = 0; c < N; ++c) {
    std::uint64_t h = hash(vertices(c)) & table_mask;
    while (table[h] != UINT32_MAX) h = (h + 1) & table_mask;
    table[h] = c;
  }
  face_start.assign(N + 1, 0);
  faces.clear();
  std::vector<Index> buf;
  for (std::uint32_t c = 0; c < N; ++c) {
    auto v = vertices(c);
    if (v.size() == 1) {
      faces.push_back(0);
    } else if (v.size() > 1) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        buf.assign(v.begin(), v.end());
        buf.erase(buf.begin() + k);
        auto f = lookup(buf);
        if (!f) throw Error("internal: face of a chain is missing from the complex");
        faces.push_back(*f);
      }
    }
    face_start[c + 1] = faces.size();
  }
  coface_start.assign(N + 1, 0);
  for (std::uint32_t f : faces) ++coface_start[f + 1];
  for (std::size_t c = 0; c < N; ++c) coface_start[c + 1] += coface_start[c];
  cofaces.assign(faces.size(), 0);
  std::vector<std::uint32_t> fill(coface_start.begin(), coface_start.end() - 1);
  for (std::uint32_t c = 0; c < N; ++c)
    for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k) cofaces[fill[faces[k]]++] = c;
}

void PosetHomology::Impl::check_boundary_squared() const {
  std::vector<std::pair<std::uint32_t, int>> acc;
  for (std::uint32_t c = 0; c < cells(); ++c) {
    acc.clear();
    for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k) {
      std::uint32_t f = faces[k];
      int s = sign(k - face_start[c]);
      for (std::uint32_t l = face_start[f]; l < face_start[f + 1]; ++l)
        acc.emplace_back(faces[l], s * sign(l - face_start[f]));
    }
    std::sort(acc.begin(), acc.end());
    for (std::size_t i = 0; i < acc.size();) {
      std::size_t j = i;
      int sum = 0;
      while (j < acc.size() && acc[j].first == acc[i].first) sum += acc[j++].second;
      if (sum != 0) throw Error("internal: boundary of a boundary is nonzero");
      i = j;
    }
  }
}

void PosetHomology::Impl::coreduce() {
  const std::size_t N = cells();
  kind.assign(N, kAlive);
  partner.assign(N, UINT32_MAX);
  when.assign(N, 0);
  std::uint32_t clock = 0;
  std::deque<std::uint32_t> queue;
  auto push_cofaces = [&](std::uint32_t c) {
    for (std::uint32_t k = coface_start[c]; k < coface_start[c + 1]; ++k)
      if (kind[cofaces[k]] == kAlive) queue.push_back(cofaces[k]);
  };
  auto match = [&](std::uint32_t a, std::uint32_t b) {
    kind[a] = kUp;
    kind[b] = kDown;
    partner[a] = b;
    partner[b] = a;
    when[a] = when[b] = clock++;
    push_cofaces(a);
    push_cofaces(b);
  };
  auto make_critical = [&](std::uint32_t c) {
    kind[c] = kCritical;
    when[c] = clock++;
    push_cofaces(c);
  };
  match(0, level_start[1]);
  std::uint32_t cursor = 0;
  while (true) {
    while (!queue.empty()) {
      std::uint32_t c = queue.front();
      queue.pop_front();
      if (kind[c] != kAlive) continue;
      std::size_t alive = 0;
      std::uint32_t last = 0;
      for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k)
        if (kind[faces[k]] == kAlive) {
          ++alive;
          last = faces[k];
        }
      if (alive == 1) match(last, c);
    }
    while (cursor < N && kind[cursor] != kAlive) ++cursor;
    if (cursor == N) break;
    make_critical(cursor);
  }
}

void PosetHomology::Impl::trivial_matching() {
  const std::size_t N = cells();
  kind.assign(N, kCritical);
  partner.assign(N, UINT32_MAX);
  when.resize(N);
  std::iota(when.begin(), when.end(), 0);
}

std::vector<std::pair<std::uint32_t, std::int64_t>> PosetHomology::Impl::project(
    const std::vector<std::pair<std::uint32_t, std::int64_t>>& chain) const {
  std::unordered_map<std::uint32_t, std::int64_t> coef;
  std::priority_queue<std::pair<std::uint32_t, std::uint32_t>> heap;
  for (auto [c, v] : chain) {
    if (v == 0) continue;
    coef[c] = add_checked(coef[c], v);
    heap.emplace(when[c], c);
  }
  std::vector<std::pair<std::uint32_t, std::int64_t>> out;
  while (!heap.empty()) {
    auto [t, a] = heap.top();
    heap.pop();
    auto it = coef.find(a);
    if (it == coef.end()) continue;
    std::int64_t z = it->second;
    coef.erase(it);
    if (z == 0) continue;
    if (kind[a] == kCritical) {
      out.emplace_back(crit_index[a], z);
    } else if (kind[a] == kUp) {
      std::uint32_t b = partner[a];
      const int eps = incidence(b, a);
      std::int64_t q = z * eps;
      for (std::uint32_t k = face_start[b]; k < face_start[b + 1]; ++k) {
        std::uint32_t f = faces[k];
        if (f == a) continue;
        auto& slot = coef[f];
        slot = add_checked(slot, -mul_checked(q, sign(k - face_start[b])));
        heap.emplace(when[f], f);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SparseChain PosetHomology::Impl::lift(int level, const std::vector<std::int64_t>& morse) const {
  std::unordered_map<std::uint32_t, std::int64_t> x;
  std::unordered_map<std::uint32_t, std::int64_t> bd;
  std::priority_queue<std::pair<std::uint32_t, std::uint32_t>> heap;
  auto add_boundary = [&](std::uint32_t c, std::int64_t s) {
    for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k) {
      std::uint32_t f = faces[k];
      auto& slot = bd[f];
      slot = add_checked(slot, mul_checked(s, sign(k - face_start[c])));
      heap.emplace(when[f], f);
    }
  };
  for (std::size_t i = 0; i < morse.size(); ++i) {
    if (morse[i] == 0) continue;
    std::uint32_t c = critical[level][i];
    x[c] = morse[i];
    add_boundary(c, morse[i]);
  }
  while (!heap.empty()) {
    auto [t, a] = heap.top();
    heap.pop();
    auto it = bd.find(a);
    if (it == bd.end() || it->second == 0) continue;
    if (kind[a] != kUp) continue;
    std::uint32_t b = partner[a];
    const int eps = incidence(b, a);
    std::int64_t q = it->second * eps;
    auto& xb = x[b];
    xb = add_checked(xb, -q);
    add_boundary(b, -q);
  }
  for (const auto& [c, v] : bd)
    if (v != 0) throw Error("internal: lifted Morse cycle is not a cycle");
  SparseChain out;
  for (auto [c, v] : x)
    if (v != 0) out.emplace_back(c, v);
  std::sort(out.begin(), out.end());
  return out;
}

void PosetHomology::Impl::compute_groups() {
  const std::size_t levels = level_start.size() - 1;
  critical.assign(levels, {});
  crit_index.assign(cells(), UINT32_MAX);
  for (std::uint32_t c = 0; c < cells(); ++c)
    if (kind[c] == kCritical) {
      int L = level_of(c);
      crit_index[c] = static_cast<std::uint32_t>(critical[L].size());
      critical[L].push_back(c);
    }
  morse_bd.assign(levels, {});
  std::vector<std::size_t> rank(levels + 1, 0);
  std::vector<std::vector<std::int64_t>> tors(levels + 1);
  for (std::size_t L = 1; L < levels; ++L) {
    std::vector<SparseEntry> entries;
    for (std::uint32_t i = 0; i < critical[L].size(); ++i) {
      std::uint32_t c = critical[L][i];
      std::vector<std::pair<std::uint32_t, std::int64_t>> bd;
      for (std::uint32_t k = face_start[c]; k < face_start[c + 1]; ++k)
        bd.emplace_back(faces[k], sign(k - face_start[c]));
      auto col = project(bd);
      for (auto [r, v] : col) entries.push_back({r, i, v});
      morse_bd[L].push_back(std::move(col));
    }
    auto diag = sparse_elimination_diagonal(critical[L - 1].size(), critical[L].size(), entries);
    rank[L] = diag.size();
    for (const auto& d : diag)
      if (d > 1) tors[L].push_back(to_int64(d));
  }
  groups.clear();
  long euler_cells = 0, euler_homology = 0;
  for (std::size_t L = 1; L < levels; ++L) {
    const int d = static_cast<int>(L) - 1;
    const std::size_t m = critical[L].size();
    const std::size_t r_next = L + 1 < levels ? rank[L + 1] : 0;
    const std::size_t free = m - rank[L] - r_next;
    AbelianGroup g(free, L + 1 < levels ? tors[L + 1] : std::vector<std::int64_t>{});
    groups.emplace(d, g);
    long s = (d % 2 == 0) ? 1 : -1;
    euler_cells += s * static_cast<long>(level_start[L + 1] - level_start[L]);
    euler_homology += s * static_cast<long>(free);
  }
  euler_cells -= 1;  // the empty simplex
  if (euler_cells != euler_homology)
    throw Error("internal: reduced Euler characteristic " + std::to_string(euler_cells) +
                " disagrees with homology ranks " + std::to_string(euler_homology));
}

BasisData& PosetHomology::Impl::basis_data(int d) {
  if (auto it = bases.find(d); it != bases.end()) return it->second;
  BasisData bdata;
  bdata.basis.degree = d;
  bdata.basis.group = groups.count(d) ? groups.at(d) : AbelianGroup{};
  const int L = d + 1;
  const std::size_t levels = level_start.size() - 1;
  if (d < 0 || static_cast<std::size_t>(L) >= levels) return bases.emplace(d, std::move(bdata)).first->second;
  const std::size_t m = critical[L].size();
  const std::size_t below = critical[L - 1].size();
  const std::size_t above = static_cast<std::size_t>(L + 1) < levels ? critical[L + 1].size() : 0;
  IntMatrix B(m, above);
  for (std::size_t j = 0; j < above; ++j)
    for (auto [r, v] : morse_bd[L + 1][j]) B(r, j) = v;
  IntMatrix A(below, m);
  for (std::size_t j = 0; j < m; ++j)
    for (auto [r, v] : morse_bd[L][j]) A(r, j) = v;
  SmithForm sb = smith_normal_form(B);
  bdata.P = sb.U;
  bdata.rB = sb.rank;
  for (std::size_t j = 0; j < sb.rank; ++j) bdata.dB.push_back(sb.D(j, j));
  const std::size_t rest = m - sb.rank;
  IntMatrix Pinv_rest(m, rest);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < rest; ++j) Pinv_rest(i, j) = sb.U_inv(i, sb.rank + j);
  IntMatrix Ap = A * Pinv_rest;
  SmithForm sa = smith_normal_form(Ap);
  bdata.VinvA = sa.V_inv;
  bdata.rA = sa.rank;

  auto emit = [&](const std::vector<mpz_class>& v, std::int64_t order) {
    std::vector<std::int64_t> morse(m);
    for (std::size_t i = 0; i < m; ++i) morse[i] = to_int64(v[i]);
    bdata.basis.orders.push_back(order);
    bdata.basis.cycles.push_back(lift(L, morse));
  };
  std::vector<std::int64_t> torsion;
  for (std::size_t j = 0; j < sb.rank; ++j)
    if (bdata.dB[j] > 1) {
      bdata.torsion_slots.push_back(j);
      std::vector<mpz_class> v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = sb.U_inv(i, j);
      emit(v, to_int64(bdata.dB[j]));
      torsion.push_back(to_int64(bdata.dB[j]));
    }
  std::size_t free = 0;
  for (std::size_t k = sa.rank; k < rest; ++k) {
    std::vector<mpz_class> v(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < rest; ++j) v[i] += Pinv_rest(i, j) * sa.V(j, k);
    emit(v, 0);
    ++free;
  }
  if (!(AbelianGroup(free, torsion) == bdata.basis.group))
    throw Error("internal: homology basis disagrees with invariants in degree " + std::to_string(d));
  return bases.emplace(d, std::move(bdata)).first->second;
}

PosetHomology::PosetHomology(const Poset& p, const HomologyOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  if (p.empty()) throw EmptyInput("homology of the empty poset");
  impl_->poset = p;
  impl_->opts = opts;
  impl_->dim = static_cast<int>(height(p));
  impl_->enumerate();
  impl_->build_incidence();
  impl_->check_boundary_squared();
  if (opts.morse)
    impl_->coreduce();
  else
    impl_->trivial_matching();
  impl_->compute_groups();
}

PosetHomology::~PosetHomology() = default;
PosetHomology::PosetHomology(PosetHomology&&) noexcept = default;
PosetHomology& PosetHomology::operator=(PosetHomology&&) noexcept = default;

const Poset& PosetHomology::poset() const { return impl_->poset; }
int PosetHomology::dimension() const { return impl_->dim; }
std::size_t PosetHomology::simplex_count() const { return impl_->cells() - 1; }
std::size_t PosetHomology::simplex_count(int dim) const {
  const std::size_t L = static_cast<std::size_t>(dim + 1);
  if (dim < 0 || L + 1 >= impl_->level_start.size()) return 0;
  return impl_->level_start[L + 1] - impl_->level_start[L];
}
std::size_t PosetHomology::critical_count() const {
  std::size_t s = 0;
  for (const auto& c : impl_->critical) s += c.size();
  return s;
}
const std::map<int, AbelianGroup>& PosetHomology::groups() const { return impl_->groups; }
AbelianGroup PosetHomology::group(int d) const {
  auto it = impl_->groups.find(d);
  return it == impl_->groups.end() ? AbelianGroup{} : it->second;
}
const HomologyBasis& PosetHomology::basis(int d) { return impl_->basis_data(d).basis; }

std::optional<std::uint32_t> PosetHomology::cell(std::span<const Index> chain) const {
  return impl_->lookup(chain);
}
std::span<const Index> PosetHomology::cell_vertices(std::uint32_t id) const {
  return impl_->vertices(id);
}
int PosetHomology::cell_dimension(std::uint32_t id) const { return impl_->level_of(id) - 1; }

SparseChain PosetHomology::boundary(const SparseChain& c) const {
  std::map<std::uint32_t, std::int64_t> acc;
  for (auto [id, v] : c)
    for (std::uint32_t k = impl_->face_start[id]; k < impl_->face_start[id + 1]; ++k) {
      auto& slot = acc[impl_->faces[k]];
      slot = add_checked(slot, mul_checked(v, impl_->sign(k - impl_->face_start[id])));
    }
  SparseChain out;
  for (auto [id, v] : acc)
    if (v != 0) out.emplace_back(id, v);
  return out;
}

std::vector<mpz_class> PosetHomology::coordinates(int d, const SparseChain& cycle) {
  BasisData& b = impl_->basis_data(d);
  const std::size_t gens = b.basis.orders.size();
  std::vector<mpz_class> out(gens);
  if (gens == 0) return out;
  for (auto [c, v] : cycle)
    if (cell_dimension(c) != d) throw InvalidInput("chain has a cell of the wrong dimension");
  if (!boundary(cycle).empty()) throw InvalidInput("chain is not a cycle");
  const int L = d + 1;
  const std::size_t m = impl_->critical[L].size();
  auto y = impl_->project(std::vector<std::pair<std::uint32_t, std::int64_t>>(cycle.begin(), cycle.end()));
  std::vector<mpz_class> yv(m);
  for (auto [i, v] : y) yv[i] = v;
  std::vector<mpz_class> yp(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (yv[j] != 0) yp[i] += b.P(i, j) * yv[j];
  std::size_t slot = 0;
  for (std::size_t j : b.torsion_slots) {
    mpz_class r = yp[j] % b.dB[j];
    if (r < 0) r += b.dB[j];
    out[slot++] = r;
  }
  const std::size_t rest = m - b.rB;
  std::vector<mpz_class> w(rest);
  for (std::size_t i = 0; i < rest; ++i)
    for (std::size_t j = 0; j < rest; ++j) w[i] += b.VinvA(i, j) * yp[b.rB + j];
  for (std::size_t i = 0; i < b.rA; ++i)
    if (w[i] != 0) throw Error("internal: projected cycle has a nonzero boundary component");
  for (std::size_t i = b.rA; i < rest; ++i) out[slot++] = w[i];
  return out;
}

std::map<int, AbelianGroup> reduced_homology(const Poset& p, const HomologyOptions& opts) {
  return PosetHomology(p, opts).groups();
}

bool is_acyclic(const Poset& p, const HomologyOptions& opts) {
  for (const auto& [d, g] : reduced_homology(p, opts))
    if (!g.is_zero()) return false;
  return true;
}

namespace {

SparseChain push_forward(std::span<const Index> f, const SparseChain& z, const PosetHomology& s,
                         const PosetHomology& t) {
  std::map<std::uint32_t, std::int64_t> acc;
  std::vector<Index> img;
  for (auto [c, v] : z) {
    auto verts = s.cell_vertices(c);
    img.clear();
    bool degenerate = false;
    for (Index x : verts) {
      Index y = f[x];
      if (!img.empty() && img.back() == y) {
        degenerate = true;
        break;
      }
      img.push_back(y);
    }
    if (degenerate) continue;
    auto id = t.cell(img);
    if (!id) throw InvalidInput("map sends a chain to a non-chain");
    auto& slot = acc[*id];
    slot = add_checked(slot, v);
  }
  SparseChain out;
  for (auto [c, v] : acc)
    if (v != 0) out.emplace_back(c, v);
  return out;
}

}  // namespace

InducedMatrix induced_map(std::span<const Index> f, int degree, PosetHomology& source,
                          PosetHomology& target) {
  const Poset& P = source.poset();
  const Poset& Q = target.poset();
  if (f.size() != P.size()) throw InvalidInput("map size does not match the source poset");
  for (Index x : f)
    if (x >= Q.size()) throw InvalidInput("map value out of range");
  for (auto [a, b] : P.cover_indices())
    if (!Q.leq(f[a], f[b]))
      throw InvalidInput("map is not order preserving at ('" + P.id(a) + "', '" + P.id(b) + "')");
  InducedMatrix m;
  m.degree = degree;
  const HomologyBasis& sb = source.basis(degree);
  const HomologyBasis& tb = target.basis(degree);
  m.source_orders = sb.orders;
  m.target_orders = tb.orders;
  for (const auto& z : sb.cycles) m.columns.push_back(target.coordinates(degree, push_forward(f, z, source, target)));
  return m;
}

bool induced_equal(const InducedMatrix& a, const InducedMatrix& b) {
  if (a.degree != b.degree || a.target_orders != b.target_orders ||
      a.columns.size() != b.columns.size())
    return false;
  for (std::size_t j = 0; j < a.columns.size(); ++j)
    for (std::size_t i = 0; i < a.target_orders.size(); ++i) {
      mpz_class d = a.columns[j][i] - b.columns[j][i];
      if (a.target_orders[i] > 0) d %= a.target_orders[i];
      if (d != 0) return false;
    }
  return true;
}

SummandCheck summand_action_check(PosetHomology& x, std::span<const SummandInclusion> summands,
                                  const ActionMap& action, int degree) {
  SummandCheck out;
  const Poset& X = x.poset();
  std::unordered_map<std::string, std::size_t> by_label;
  for (std::size_t v = 0; v < summands.size(); ++v) {
    const auto& s = summands[v];
    if (!s.piece) throw InvalidInput("summand '" + s.label + "' has no homology data");
    if (!by_label.emplace(s.label, v).second)
      throw InvalidInput("duplicate summand label '" + s.label + "'");
    const Poset& Y = s.piece->poset();
    if (s.embedding.size() != Y.size())
      throw InvalidInput("embedding of '" + s.label + "' has the wrong size");
    std::set<Index> img(s.embedding.begin(), s.embedding.end());
    if (img.size() != Y.size()) throw InvalidInput("embedding of '" + s.label + "' is not injective");
    for (Index a = 0; a < Y.size(); ++a)
      for (Index b = 0; b < Y.size(); ++b)
        if (Y.leq(a, b) != X.leq(s.embedding[a], s.embedding[b]))
          throw InvalidInput("embedding of '" + s.label + "' is not an order embedding");
  }
  for (std::size_t v = 0; v < summands.size(); ++v)
    for (std::size_t w = v + 1; w < summands.size(); ++w) {
      std::set<Index> a(summands[v].embedding.begin(), summands[v].embedding.end());
      std::size_t shared = 0;
      for (Index e : summands[w].embedding) shared += a.count(e);
      if (shared > 1)
        throw InvalidInput("summands '" + summands[v].label + "' and '" + summands[w].label +
                           "' share more than a wedge point");
    }
  if (action.target.size() != summands.size())
    throw InvalidInput("action target does not match the summand labels");
  std::vector<std::size_t> label_to_summand(action.target.size());
  for (std::size_t i = 0; i < action.target.size(); ++i) {
    auto it = by_label.find(action.target[i]);
    if (it == by_label.end()) throw InvalidInput("action label '" + action.target[i] + "' has no summand");
    label_to_summand[i] = it->second;
  }
  std::vector<std::size_t> summand_to_label(summands.size());
  for (std::size_t i = 0; i < label_to_summand.size(); ++i) summand_to_label[label_to_summand[i]] = i;

  std::vector<InducedMatrix> incl;
  AbelianGroup sum;
  for (const auto& s : summands) {
    incl.push_back(induced_map(s.embedding, degree, *s.piece, x));
    sum = sum + s.piece->group(degree);
  }
  const AbelianGroup hx = x.group(degree);
  if (!(sum == hx)) {
    out.diagnostics.push_back("degree " + std::to_string(degree) + ": summands give " +
                              sum.to_string() + " but H~(X) = " + hx.to_string());
  } else {
    const auto& orders = x.basis(degree).orders;
    const std::size_t R = orders.size();
    std::vector<SparseEntry> entries;
    std::uint32_t col = 0;
    for (const auto& m : incl)
      for (const auto& c : m.columns) {
        for (std::size_t i = 0; i < R; ++i)
          if (c[i] != 0) entries.push_back({static_cast<std::uint32_t>(i), col, to_int64(c[i])});
        ++col;
      }
    for (std::size_t i = 0; i < R; ++i)
      if (orders[i] > 0) entries.push_back({static_cast<std::uint32_t>(i), col++, orders[i]});
    auto diag = sparse_elimination_diagonal(R, col, entries);
    bool unimodular = diag.size() == R;
    for (const auto& d : diag)
      if (d != 1) unimodular = false;
    out.isomorphism = unimodular;
    if (!unimodular)
      out.diagnostics.push_back("degree " + std::to_string(degree) +
                                ": summand inclusions do not generate H~(X)");
  }

  out.action = true;
  const auto& gens = action.source.generators();
  if (action.images.size() != gens.size()) throw InvalidInput("action images do not match generators");
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (gens[k].size() != X.size()) throw InvalidInput("generator does not act on X");
    for (std::size_t v = 0; v < summands.size(); ++v) {
      const auto& s = summands[v];
      std::vector<Index> comp(s.embedding.size());
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = gens[k](s.embedding[i]);
      InducedMatrix lhs = induced_map(comp, degree, *s.piece, x);
      std::size_t w = label_to_summand[action.images[k](static_cast<Index>(summand_to_label[v]))];
      if (!induced_equal(lhs, incl[w])) {
        out.action = false;
        out.diagnostics.push_back("degree " + std::to_string(degree) + ": generator " +
                                  std::to_string(k) + " does not carry summand '" + s.label +
                                  "' onto summand '" + summands[w].label + "'");
      }
    }
  }
  return out;
}

}  // namespace alexrealize
