#include <doctest.h>

#include <random>
#include <set>

#include "alexrealize/builders.hpp"
#include "alexrealize/errors.hpp"
#include "alexrealize/graph.hpp"
#include "alexrealize/symmetry.hpp"
#include "oracles.hpp"

using namespace alexrealize;

namespace {

std::vector<std::string> labels(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

PermGroup sym3() {
  auto d = labels({"1", "2", "3"});
  return PermGroup(d, {parse_cycles("(1 2)", d), parse_cycles("(1 2 3)", d)});
}

}  // namespace

TEST_CASE("permutations: cycles, composition, inverse") {
  auto d = labels({"a", "b", "c"});
  Permutation s = parse_cycles("(a b)", d);
  Permutation r = parse_cycles("(a b c)", d);
  CHECK(s.cycles(d) == "(a b)");
  CHECK(Permutation::identity(3).cycles(d) == "()");
  // (s*r)(x) = s(r(x)): a -> b -> a
  CHECK((s * r)(0) == 0);
  CHECK((r * r.inverse()).is_identity());
  CHECK(parse_cycles("(a b)(c)", d) == s);
  CHECK_THROWS_AS(parse_cycles("(a q)", d), UnknownElement);
  CHECK_THROWS_AS(parse_cycles("(a b a)", d), InvalidInput);
  CHECK_THROWS_AS(parse_cycles("(a b", d), InvalidInput);
}

TEST_CASE("group order, elements and orbits") {
  CHECK(group_order(sym3()) == 6);
  auto el = enumerate_elements(sym3());
  CHECK(el.elements.size() == 6);
  CHECK(el.elements[0].is_identity());
  auto d = labels({"1", "2", "3", "4"});
  PermGroup g(d, {parse_cycles("(1 2)", d)});
  auto o = orbits(g);
  CHECK(o.size() == 3);
  CHECK(o[0] == std::vector<Index>{0, 1});
  CHECK_THROWS_AS(enumerate_elements(PermGroup(d, {parse_cycles("(1 2 3 4)", d), parse_cycles("(1 2)", d)}), 10),
                  CapExceeded);
  std::vector<Index> bad{0, 2};
  CHECK_THROWS_AS(orbits(g, bad), NotInvariant);
}

TEST_CASE("graph automorphism groups agree with brute force") {
  CHECK(aut_graph(cycle_graph(5)).certified_order == 10);
  CHECK(aut_graph(complete_graph(4)).certified_order == 24);
  CHECK(aut_graph(path_graph(5)).certified_order == 2);
  std::mt19937 rng(5);
  for (int t = 0; t < 60; ++t) {
    SimpleGraph g = oracle::random_connected_graph(rng, 2 + t % 8, 0.3);
    PermGroup a = aut_graph(g);
    const auto brute = oracle::automorphisms(g);
    REQUIRE(a.certified_order.has_value());
    CHECK(*a.certified_order == brute.size());
    CHECK(group_order(a) == brute.size());
    for (const auto& p : a.generators()) CHECK(is_graph_automorphism(g, p));
  }
}

TEST_CASE("colour-preserving automorphisms") {
  SimpleGraph g = cycle_graph(4);
  std::vector<int> colors{1, 0, 0, 0};
  CHECK(aut_graph(g, &colors).certified_order == 2);
}

TEST_CASE("poset automorphism groups agree with brute force") {
  CHECK(aut_poset(build_L1()).certified_order == 2);
  std::mt19937 rng(9);
  for (int t = 0; t < 120; ++t) {
    Poset p = oracle::random_poset(rng, 1 + t % 8, 0.3);
    PermGroup a = aut_poset(p);
    const auto brute = oracle::automorphisms(oracle::relation(p));
    REQUIRE(a.certified_order.has_value());
    CHECK(*a.certified_order == brute.size());
    for (const auto& f : a.generators()) CHECK(is_poset_automorphism(p, f));
  }
}

TEST_CASE("isomorphism search") {
  std::mt19937 rng(21);
  for (int t = 0; t < 40; ++t) {
    Poset p = oracle::random_poset(rng, 2 + t % 7, 0.4);
    // shuffle identifiers and element order
    std::vector<Index> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> ids(p.size());
    for (Index i = 0; i < p.size(); ++i) ids[perm[i]] = "y" + std::to_string(perm[i]);
    std::vector<std::pair<Index, Index>> cov;
    for (auto [a, b] : p.cover_indices()) cov.emplace_back(perm[a], perm[b]);
    Poset q = Poset::from_index_covers(ids, cov);
    auto iso = isomorphic(p, q);
    REQUIRE(iso.has_value());
    for (auto [a, b] : p.cover_indices()) CHECK(q.less((*iso)[a], (*iso)[b]));
  }
  CHECK_FALSE(isomorphic(build_L1(), antichain(9)).has_value());
  CHECK_FALSE(isomorphic(cycle_graph(6), cartesian_product(path_graph(2), path_graph(3))).has_value());
}

TEST_CASE("restrict_action and actions_equal") {
  SimpleGraph c4 = cycle_graph(4);
  PermGroup a = aut_graph(c4);
  std::vector<Index> all{0, 1, 2, 3};
  ActionMap phi = restrict_action(a, all);
  CHECK(phi.target == c4.vertices());
  CHECK(phi.is_homomorphism());
  GroupIsomorphism id = identity_isomorphism(a);
  ActionMap rho{a, c4.vertices(), a.generators()};
  CHECK(actions_equal(phi, rho, id));
  // a different action of the same group
  ActionMap triv{a, c4.vertices(), std::vector<Permutation>(a.generators().size(), Permutation::identity(4))};
  CHECK_FALSE(actions_equal(phi, triv, id));
  std::vector<Index> bad{0};
  CHECK_THROWS_AS(restrict_action(a, bad), NotInvariant);
}

TEST_CASE("abstract group isomorphism") {
  // S3 as the dihedral group of the triangle on other labels
  auto d = labels({"a", "b", "c"});
  PermGroup d3(d, {parse_cycles("(a b c)", d), parse_cycles("(b c)", d)});
  auto iso = groups_isomorphic(sym3(), d3);
  REQUIRE(iso.has_value());
  CHECK(iso->generator_images.size() == 2);
  auto e = labels({"1", "2", "3", "4"});
  PermGroup z4(e, {parse_cycles("(1 2 3 4)", e)});
  PermGroup v4(e, {parse_cycles("(1 2)(3 4)", e), parse_cycles("(1 3)(2 4)", e)});
  CHECK_FALSE(groups_isomorphic(z4, v4).has_value());
  CHECK_FALSE(groups_isomorphic(z4, sym3()).has_value());
  // Klein four acting on six points
  auto f = labels({"p", "q", "r", "s", "t", "u"});
  PermGroup v4b(f, {parse_cycles("(p q)", f), parse_cycles("(r s)(t u)", f)});
  CHECK(groups_isomorphic(v4, v4b).has_value());
}

TEST_CASE("is_homomorphism catches broken relations") {
  auto v = labels({"x", "y", "z"});
  // (1 2) has order 2, a 3-cycle image violates that
  auto d = labels({"1", "2"});
  ActionMap bad{PermGroup(d, {parse_cycles("(1 2)", d)}), v, {parse_cycles("(x y z)", v)}};
  CHECK_FALSE(bad.is_homomorphism());
  ActionMap ok{PermGroup(d, {parse_cycles("(1 2)", d)}), v, {parse_cycles("(x y)", v)}};
  CHECK(ok.is_homomorphism());
  CHECK(ok.image_of(parse_cycles("(1 2)", d)) == parse_cycles("(x y)", v));
}
