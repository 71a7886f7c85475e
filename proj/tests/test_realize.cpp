#include <doctest.h>

#include "alexrealize/errors.hpp"
#include "alexrealize/io.hpp"
#include "alexrealize/realize.hpp"
#include "oracles.hpp"

using namespace alexrealize;

namespace {

Json load(const std::string& name) {
  const std::string path = std::string(ALEXREALIZE_SPEC_DIR) + "/" + name;
  return parse_json(read_text_file(path), path);
}

RealizationSpec spec(const std::string& name) { return spec_from_json(load(name)); }
Representation rep(const std::string& name) { return representation_from_json(load(name)); }

// Gadget with long tails hung on its endpoints, so plain isomorphism respects
// which end is which.
SimpleGraph pinned(const Gadget& g) {
  std::vector<std::string> ids = g.graph.vertices();
  std::vector<SimpleGraph::Edge> edges = g.graph.edges();
  for (auto [end, len] : {std::pair{g.tail, 20}, std::pair{g.head, 31}}) {
    Index prev = end;
    for (int k = 0; k < len; ++k) {
      const Index q = static_cast<Index>(ids.size());
      ids.push_back("m" + std::to_string(q));
      edges.emplace_back(prev, q);
      prev = q;
    }
  }
  return SimpleGraph::from_index_edges(std::move(ids), edges);
}

std::string failures(const RealizationReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.passed) s += c.name + ": " + c.detail + "\n";
  return s;
}

}  // namespace

TEST_CASE("arc gadgets are asymmetric and tell labels apart") {
  for (std::size_t esc = 0; esc <= 2; ++esc) {
    std::vector<Gadget> gs;
    for (bool directed : {false, true})
      for (std::size_t label = 0; label < 5; ++label) gs.push_back(arc_gadget(label, directed, esc));
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const Gadget& g = gs[i];
      CHECK(is_connected(g.graph));
      CHECK(g.graph.degree(g.tail) == 1);
      CHECK(g.graph.degree(g.head) == 1);
      // with the endpoints pinned nothing moves
      std::vector<int> colors(g.graph.order(), 0);
      colors[g.tail] = 1;
      colors[g.head] = 2;
      CHECK(aut_graph(g.graph, &colors).certified_order == 1);
      for (std::size_t k = 0; k < i; ++k) CHECK_FALSE(isomorphic(pinned(g), pinned(gs[k])).has_value());
    }
  }
}

TEST_CASE("graph realization of S3 on three points") {
  GraphRealization r = realize_graph(rep("s3_rep.json"), 1);
  INFO(failures(r.report));
  CHECK(r.report.all_passed());
  CHECK(r.aut.certified_order == 6);
  CHECK(r.v_embedding.size() == 3);
  CHECK(min_degree(r.graph) >= 2);
  CHECK(is_connected(r.graph));
  for (const auto& p : r.generator_images) CHECK(is_graph_automorphism(r.graph, p));
  CHECK(r.graph.order() == r.base.order() * r.prime.order());
}

TEST_CASE("graph realization of a non-faithful action") {
  GraphRealization r = realize_graph(rep("z4_quotient_rep.json"), 1);
  INFO(failures(r.report));
  CHECK(r.report.all_passed());
  CHECK(r.aut.certified_order == 4);
}

TEST_CASE("height-one and acyclic spaces") {
  Representation rho = rep("s3_rep.json");
  SpaceRealization h1 = realize_space_height1(rho, 1);
  INFO(failures(h1.report));
  CHECK(h1.report.all_passed());
  CHECK(height(h1.poset) == 1);
  for (std::size_t n : {5u, 6u}) {
    CAPTURE(n);
    SpaceRealization a = realize_space_acyclic(rho, n, 1);
    INFO(failures(a.report));
    CHECK(a.report.all_passed());
    CHECK(height(a.poset) == n);
    CHECK(is_acyclic(a.poset));
    CHECK(is_minimal_space(a.poset));
    CHECK(aut_poset(a.poset).certified_order == 6);
  }
  CHECK_THROWS_AS(realize_space_acyclic(rho, 4, 1), InvalidInput);
}

TEST_CASE("spec validation names the bad field") {
  RealizationSpec good = spec("z2_swap.json");
  CHECK_NOTHROW(validate_spec(good, {}));

  auto expect = [&](RealizationSpec s, const std::string& needle) {
    try {
      validate_spec(s, {});
      FAIL("accepted: " << needle);
    } catch (const InvalidInput& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  RealizationSpec s = good;
  s.degrees.clear();
  expect(s, "at least one degree");
  s = good;
  s.degrees.push_back(good.degrees[0]);
  expect(s, "listed twice");
  s = good;
  s.degrees[0].action.clear();
  expect(s, "generator images");
  s = good;
  s.degrees[0].orbit_groups.clear();
  expect(s, "orbit");
  s = good;
  s.degrees[0].orbit_groups["zz"] = AbelianGroup(1, {});
  expect(s, "unknown label");
  s = good;
  s.degrees[0].degree = 0;
  expect(s, "degrees start at 1");
  // an order-2 generator sent to a 3-cycle
  s = good;
  s.degrees[0].labels = {"a", "b", "c"};
  s.degrees[0].action = {parse_cycles("(a b c)", s.degrees[0].labels)};
  expect(s, "relations");
}

TEST_CASE("combined representation tags labels with their degree") {
  Representation r = combined_representation(spec("s3_natural.json"));
  CHECK(r.target == std::vector<std::string>{"v1.x", "v1.y", "v1.z", "v2.p"});
  CHECK(r.is_homomorphism());
}

TEST_CASE("Z/2 swapping two circles") {
  RealizationSpec s = spec("z2_swap.json");
  ModuleRealization m = realize_modules(s);
  INFO(failures(m.report));
  CHECK(m.report.all_passed());
  const auto h = reduced_homology(m.poset);
  CHECK(h.at(1) == AbelianGroup(2, {}));
  for (const auto& [d, g] : h)
    if (d != 1) CHECK(g.is_zero());
  CHECK(aut_poset(m.poset).certified_order == 2);
  CHECK(m.layout.summands.size() == 2);

  // re-verification from the stored layout is independent of the build
  RealizationReport again = verify_modules(m.poset, s, m.layout);
  CHECK(again.all_passed());

  // the same X does not realize the trivial action
  RealizationSpec triv = s;
  triv.degrees[0].action = {Permutation::identity(2)};
  triv.degrees[0].orbit_groups["b"] = AbelianGroup(1, {});
  RealizationReport bad = verify_modules(m.poset, triv, m.layout);
  CHECK_FALSE(bad.all_passed());
}

TEST_CASE("Z/2 on two copies of Z/3") {
  ModuleRealization m = realize_modules(spec("z2_torsion3.json"));
  INFO(failures(m.report));
  CHECK(m.report.all_passed());
  CHECK(reduced_homology(m.poset).at(1) == AbelianGroup(0, {3, 3}));
}

TEST_CASE("family members differ") {
  FamilyResult f = family(spec("z2_swap.json"), 2);
  INFO(failures(f.report));
  CHECK(f.report.all_passed());
  REQUIRE(f.members.size() == 2);
  CHECK_FALSE(isomorphic(f.members[0].poset, f.members[1].poset).has_value());
}
