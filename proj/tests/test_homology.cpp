#include <doctest.h>

#include <random>
#include <set>

#include "alexrealize/builders.hpp"
#include "alexrealize/errors.hpp"
#include "alexrealize/homology.hpp"
#include "alexrealize/symmetry.hpp"
#include "oracles.hpp"

using namespace alexrealize;

namespace {

IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int range) {
  IntMatrix m(r, c);
  std::uniform_int_distribution<int> d(-range, range);
  std::bernoulli_distribution sparse(0.4);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = sparse(rng) ? 0 : d(rng);
  return m;
}

bool equal(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

AbelianGroup cokernel_torsion(const std::vector<mpz_class>& diag) {
  std::vector<std::int64_t> t;
  for (const auto& x : diag)
    if (abs(x) > 1) t.push_back(mpz_class(abs(x)).get_si());
  return AbelianGroup(0, t);
}

// Every poset on n labelled points whose order extends 0 < 1 < ... < n-1.
std::vector<Poset> exhaustive(int n) {
  std::vector<std::pair<Index, Index>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("e" + std::to_string(i));
  std::set<std::vector<std::pair<std::string, std::string>>> seen;
  std::vector<Poset> out;
  for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
    std::vector<std::pair<Index, Index>> rel;
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1) rel.push_back(slots[s]);
    Poset p = Poset::from_relations(ids, rel);
    if (seen.insert(p.cover_pairs()).second) out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("abelian group normal form") {
  CHECK(AbelianGroup(0, {2, 3}) == AbelianGroup(0, {6}));
  CHECK(AbelianGroup(0, {6, 2}).torsion() == std::vector<std::int64_t>{2, 6});
  CHECK(AbelianGroup(1, {1, 1}) == AbelianGroup(1, {}));
  CHECK(AbelianGroup(2, {3}).to_string() == "Z^2 + Z/3");
  CHECK(AbelianGroup().to_string() == "0");
  CHECK(AbelianGroup(1, {2}) + AbelianGroup(1, {3}) == AbelianGroup(2, {6}));
  CHECK(AbelianGroup(0, {3}).power(2) == AbelianGroup(0, {3, 3}));
  CHECK_THROWS_AS(AbelianGroup(0, {0}), InvalidInput);
  CHECK_THROWS_AS(AbelianGroup(0, {-2}), InvalidInput);
}

TEST_CASE("Smith normal form is a unimodular diagonalization with a divisor chain") {
  std::mt19937 rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    IntMatrix m = random_matrix(rng, r, c, 6);
    SmithForm s = smith_normal_form(m);
    REQUIRE(equal(s.U * m * s.V, s.D));
    CHECK(equal(s.U * s.U_inv, IntMatrix::identity(r)));
    CHECK(equal(s.V * s.V_inv, IntMatrix::identity(c)));
    std::size_t nz = 0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) CHECK(s.D(i, j) == 0);
    for (std::size_t i = 0; i < std::min(r, c); ++i) {
      CHECK(s.D(i, i) >= 0);
      if (s.D(i, i) != 0) ++nz;
      if (i + 1 < std::min(r, c) && s.D(i, i) != 0) CHECK(s.D(i + 1, i + 1) % s.D(i, i) == 0);
    }
    CHECK(nz == s.rank);
    std::vector<std::vector<mpz_class>> dense(r, std::vector<mpz_class>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) dense[i][j] = m(i, j);
    auto od = oracle::dense_diagonal(dense);
    CHECK(od.size() == s.rank);
    std::vector<mpz_class> sd;
    for (std::size_t i = 0; i < s.rank; ++i) sd.push_back(s.D(i, i));
    CHECK(cokernel_torsion(sd) == cokernel_torsion(od));
  }
}

TEST_CASE("sparse elimination agrees with the dense oracle") {
  std::mt19937 rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng() % 8, c = 1 + rng() % 8;
    IntMatrix m = random_matrix(rng, r, c, 9);
    std::vector<SparseEntry> e;
    std::vector<std::vector<mpz_class>> dense(r, std::vector<mpz_class>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        dense[i][j] = m(i, j);
        if (m(i, j) != 0) e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m(i, j).get_si()});
      }
    auto sd = sparse_elimination_diagonal(r, c, e);
    auto od = oracle::dense_diagonal(dense);
    CHECK(sd.size() == od.size());
    CHECK(cokernel_torsion(sd) == cokernel_torsion(od));
  }
}

TEST_CASE("coefficient growth stays exact") {
  // Hilbert-like integer matrix with large entries
  IntMatrix m(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = mpz_class("1000000007") * (i + 1) + (j + 1) * (j + 1) * (i + j + 1);
  SmithForm s = smith_normal_form(m);
  CHECK(equal(s.U * m * s.V, s.D));
}

TEST_CASE("order complex of a diamond") {
  Poset p({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
  SimplicialComplex k = order_complex(p);
  CHECK(k.facets.size() == 2);
  CHECK(dimension(k) == 2);
  PosetHomology h(p);
  CHECK(h.simplex_count() == 4 + 5 + 2);
  CHECK(h.simplex_count(2) == 2);
}

TEST_CASE("exhaustive small posets agree with the dense oracle") {
  std::size_t checked = 0;
  for (int n = 1; n <= 5; ++n)
    for (const Poset& p : exhaustive(n)) {
      const auto want = oracle::reduced_homology(p);
      CHECK(reduced_homology(p) == want);
      CHECK(reduced_homology(p, {.morse = false}) == want);
      CHECK(PosetHomology(p).simplex_count() == oracle::chain_count(p));
      ++checked;
    }
  // naturally labelled posets: 1 + 2 + 7 + 40 + 357
  CHECK(checked == 407);
}

TEST_CASE("builder outputs agree with the dense oracle") {
  std::vector<Poset> ps{build_L1(), build_Wk_tilde(2), build_Wk(2), sphere_model(0), sphere_model(1),
                        sphere_model(2), moore_cyclic(2), suspend(sphere_model(1))};
  for (const auto& p : ps) {
    if (oracle::chain_count(p) > 500) continue;
    CHECK(reduced_homology(p) == oracle::reduced_homology(p));
  }
}

TEST_CASE("Morse reduction preserves homology on random posets") {
  std::mt19937 rng(4);
  for (int t = 0; t < 300; ++t) {
    Poset p = oracle::random_poset(rng, 4 + t % 9, 0.3);
    CHECK(reduced_homology(p) == reduced_homology(p, {.morse = false}));
  }
}

TEST_CASE("simplex budget") {
  CHECK_THROWS_AS(PosetHomology(build_Wk(3), {.simplex_budget = 100}), CapExceeded);
}

TEST_CASE("cycle bases and coordinates") {
  Poset s1 = sphere_model(1);
  PosetHomology h(s1);
  const auto& b = h.basis(1);
  REQUIRE(b.cycles.size() == 1);
  CHECK(b.orders == std::vector<std::int64_t>{0});
  CHECK(h.boundary(b.cycles[0]).empty());
  auto c = h.coordinates(1, b.cycles[0]);
  CHECK(c == std::vector<mpz_class>{1});
  PosetHomology m2(moore_cyclic(2));
  CHECK(m2.basis(1).orders == std::vector<std::int64_t>{2});
}

TEST_CASE("induced maps: identity and a reflection of the circle") {
  Poset s1 = sphere_model(1);
  PosetHomology h(s1);
  std::vector<Index> id(s1.size());
  std::iota(id.begin(), id.end(), 0);
  auto m = induced_map(id, 1, h, h);
  CHECK(m.columns[0][0] == 1);
  std::vector<Index> flip = id;
  std::swap(flip[s1.index("s1a")], flip[s1.index("s1b")]);
  auto r = induced_map(flip, 1, h, h);
  CHECK(r.columns[0][0] == -1);
  CHECK_FALSE(induced_equal(m, r));
  // collapsing the top onto one point kills H1
  std::vector<Index> squash = id;
  squash[s1.index("s1b")] = s1.index("s1a");
  CHECK(induced_map(squash, 1, h, h).columns[0][0] == 0);
  std::vector<Index> bad = id;
  bad[s1.index("s0a")] = s1.index("s1a");
  bad[s1.index("s1a")] = s1.index("s0a");
  CHECK_THROWS_AS(induced_map(bad, 1, h, h), InvalidInput);
}

TEST_CASE("induced maps are compared modulo torsion orders") {
  PosetHomology h(moore_cyclic(3));
  std::vector<Index> id(h.poset().size());
  std::iota(id.begin(), id.end(), 0);
  InducedMatrix a = induced_map(id, 1, h, h);
  InducedMatrix b = a;
  b.columns[0][0] += 3;
  CHECK(induced_equal(a, b));
  b.columns[0][0] += 1;
  CHECK_FALSE(induced_equal(a, b));
}

TEST_CASE("summand action check on a wedge of two circles") {
  Poset s = sphere_model(1);
  WedgeResult w = wedge(s, "s1a", s, "s1a", {"L/", "R/"});
  const Poset& x = w.poset;
  PosetHomology hx(x), hs(s);
  std::vector<Index> swap_img(x.size());
  for (Index i = 0; i < x.size(); ++i) swap_img[i] = i;
  for (Index i = 0; i < s.size(); ++i) {
    swap_img[w.left.map[i]] = w.right.map[i];
    swap_img[w.right.map[i]] = w.left.map[i];
  }
  Permutation swap(swap_img);
  REQUIRE(is_poset_automorphism(x, swap));
  std::vector<SummandInclusion> inc{{"a", &hs, w.left.map}, {"b", &hs, w.right.map}};
  std::vector<std::string> labels{"a", "b"};
  PermGroup g(x.elements(), {swap});

  ActionMap good{g, labels, {parse_cycles("(a b)", labels)}};
  CHECK(summand_action_check(hx, inc, good, 1).ok());

  ActionMap wrong{g, labels, {Permutation::identity(2)}};
  SummandCheck c = summand_action_check(hx, inc, wrong, 1);
  CHECK(c.isomorphism);
  CHECK_FALSE(c.action);
  CHECK_FALSE(c.diagnostics.empty());

  std::vector<SummandInclusion> half{{"a", &hs, w.left.map}};
  std::vector<std::string> one{"a"};
  ActionMap triv{PermGroup(x.elements(), {}), one, {}};
  CHECK_FALSE(summand_action_check(hx, half, triv, 1).isomorphism);
}
