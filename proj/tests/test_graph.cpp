#include <doctest.h>

#include <random>

#include "alexrealize/errors.hpp"
#include "alexrealize/graph.hpp"
#include "alexrealize/symmetry.hpp"
#include "oracles.hpp"

using namespace alexrealize;

TEST_CASE("graph construction validates edges") {
  CHECK_THROWS_AS(SimpleGraph({"a", "b"}, {{"a", "a"}}), InvalidInput);
  CHECK_THROWS_AS(SimpleGraph({"a", "b"}, {{"a", "b"}, {"b", "a"}}), InvalidInput);
  CHECK_THROWS_AS(SimpleGraph({"a"}, {{"a", "q"}}), InvalidInput);
}

TEST_CASE("degree and connectivity") {
  CHECK(min_degree(cycle_graph(5)) == 2);
  CHECK(min_degree(path_graph(4)) == 1);
  CHECK(is_connected(path_graph(4)));
  CHECK_FALSE(is_connected(SimpleGraph({"a", "b"}, {})));
}

TEST_CASE("Cartesian product sizes and indexing") {
  SimpleGraph g = cartesian_product(path_graph(3), cycle_graph(4));
  CHECK(g.order() == 12);
  // |E| = |V1||E2| + |E1||V2|
  CHECK(g.edge_count() == 3 * 4 + 2 * 4);
  CHECK(g.id(1 * 4 + 2) == product_vertex_id(path_graph(3).id(1), cycle_graph(4).id(2)));
}

TEST_CASE("prime factorization recovers the factors") {
  SimpleGraph k2 = path_graph(2);
  auto q3 = prime_factorization(cartesian_product(cartesian_product(k2, k2), k2));
  CHECK(q3.size() == 3);
  for (const auto& f : q3) CHECK(f.order() == 2);

  auto pc = prime_factorization(cartesian_product(path_graph(3), cycle_graph(5)));
  REQUIRE(pc.size() == 2);
  CHECK(pc[0].order() == 3);
  CHECK(pc[1].order() == 5);
  CHECK(isomorphic(pc[1], cycle_graph(5)).has_value());

  CHECK(is_prime(cycle_graph(5)));
  CHECK(is_prime(complete_graph(4)));
  CHECK_FALSE(is_prime(cycle_graph(4)));  // C4 = K2 x K2
  CHECK(prime_factorization(complete_graph(1)).empty());
  CHECK_THROWS_AS(prime_factorization(SimpleGraph({"a", "b"}, {})), InvalidInput);
}

TEST_CASE("factorization of random products of small graphs") {
  std::mt19937 rng(3);
  for (int t = 0; t < 10; ++t) {
    SimpleGraph a = oracle::random_connected_graph(rng, 3 + t % 3, 0.3);
    SimpleGraph b = oracle::random_connected_graph(rng, 3 + (t + 1) % 3, 0.3);
    SimpleGraph p = cartesian_product(a, b);
    auto fs = prime_factorization(p, {.max_vertices = 64});
    CHECK(fs.size() >= 2);
    std::size_t prod = 1;
    for (const auto& f : fs) prod *= f.order();
    CHECK(prod == p.order());
    SimpleGraph back = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) back = cartesian_product(back, fs[i]);
    CHECK(isomorphic(back, p).has_value());
  }
}

TEST_CASE("rigid primes are asymmetric, prime, distinct and ordered") {
  auto qs = enumerate_rigid_primes(12);
  REQUIRE(qs.size() == 12);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(is_connected(qs[i]));
    CHECK(oracle::automorphisms(qs[i]).size() == 1);
    CHECK(is_prime(qs[i]));
    if (i) CHECK(qs[i - 1].order() <= qs[i].order());
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(isomorphic(qs[i], qs[j]).has_value());
  }
  // no asymmetric graph has fewer than 6 vertices
  CHECK(qs.front().order() == 6);
  CHECK_THROWS_AS(enumerate_rigid_primes(1000, {.max_vertices = 6}), CapExceeded);
  // deterministic
  auto again = enumerate_rigid_primes(12);
  for (std::size_t i = 0; i < qs.size(); ++i) CHECK(qs[i].edges() == again[i].edges());
}

TEST_CASE("incidence poset") {
  SimpleGraph g = cycle_graph(4);
  IncidencePoset ip = incidence_poset(g);
  CHECK(ip.poset.size() == 8);
  CHECK(height(ip.poset) == 1);
  CHECK(is_minimal_space(ip.poset));
  for (Index v = 0; v < g.order(); ++v) CHECK(ip.poset.is_minimal_element(ip.vertex_embedding[v]));
  const auto [a, b] = g.edges()[0];
  CHECK(ip.poset.leq(ip.vertex_embedding[a], ip.edge_embedding[0]));
  CHECK(ip.poset.leq(ip.vertex_embedding[b], ip.edge_embedding[0]));
  CHECK(ip.poset.id(ip.edge_embedding[0]) == edge_element_id(g.id(a), g.id(b)));
}
