// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "alexrealize/builders.hpp"
#include "alexrealize/errors.hpp"
#include "alexrealize/graph.hpp"
#include "alexrealize/homology.hpp"
#include "alexrealize/io.hpp"
#include "alexrealize/realize.hpp"
#include "alexrealize/symmetry.hpp"
#include "oracles.hpp"

using namespace alexrealize;

namespace {

struct Tally {
  std::size_t checks = 0, failed = 0;
  std::vector<std::string> first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failed;
    if (first.size() < 5) first.push_back(what);
  }
  std::string summary() const {
    std::string s = std::to_string(checks - failed) + "/" + std::to_string(checks) + " checks";
    for (const auto& f : first) s += "; failed: " + f;
    return s;
  }
};

Json load(const std::string& name) {
  const std::string path = std::string(ALEXREALIZE_SPEC_DIR) + "/" + name;
  return parse_json(read_text_file(path), path);
}

bool all_zero(const std::map<int, AbelianGroup>& h) {
  for (const auto& [d, g] : h)
    if (!g.is_zero()) return false;
  return true;
}

std::size_t brute_aut(const Poset& p) { return oracle::automorphisms(oracle::relation(p)).size(); }

std::string report_failures(const RealizationReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.passed) s += (s.empty() ? "" : ", ") + c.name;
  return s;
}

// Maximal chains are the cover paths from a minimal to a maximal element.
std::set<std::vector<int>> maximal_chains(const oracle::Rel& r) {
  std::set<std::vector<int>> out;
  std::vector<int> path;
  std::function<void(int)> go = [&](int x) {
    path.push_back(x);
    bool top = true;
    for (int y = 0; y < r.n; ++y)
      if (oracle::covers(r, x, y)) {
        top = false;
        go(y);
      }
    if (top) out.insert(path);
    path.pop_back();
  };
  for (int x = 0; x < r.n; ++x) {
    bool bottom = true;
    for (int y = 0; y < r.n; ++y) bottom = bottom && !r.lt(y, x);
    if (bottom) go(x);
  }
  return out;
}

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

std::vector<Poset> builder_outputs() {
  std::vector<Poset> ps{build_L1()};
  for (std::size_t k = 1; k <= 3; ++k) ps.push_back(build_Wk(k));
  for (std::size_t k = 2; k <= 3; ++k) ps.push_back(build_Wk_tilde(k));
  for (std::size_t i = 0; i <= 3; ++i) ps.push_back(sphere_model(i));
  for (std::size_t m = 2; m <= 4; ++m) ps.push_back(moore_cyclic(m));
  for (std::size_t s = 0; s < 4; ++s) ps.push_back(rigid_attachment(s));
  ps.push_back(suspend(sphere_model(1)));
  ps.push_back(face_poset({{"a", "b", "c"}, {{0, 1}, {1, 2}, {0, 2}}}));
  ps.push_back(moore_piece({1, AbelianGroup(0, {2})}).poset);
  ps.push_back(moore_piece({1, AbelianGroup(1, {})}).poset);
  ps.push_back(rigidify(sphere_model(1)));
  return ps;
}

// ---------------------------------------------------------------------------

Tally criterion1() {
  Tally t;
  Poset l1 = build_L1();
  const auto r = oracle::relation(l1);
  t.expect(l1.size() == 9, "9 elements");
  t.expect(oracle::height(r) == 2 && height(l1) == 2, "height 2");
  t.expect(oracle::beat_points(r).empty() && beat_points(l1).empty(), "no beat points");
  t.expect(brute_aut(l1) == 2 && aut_poset(l1).certified_order == 2, "|aut| = 2");
  t.expect(all_zero(oracle::reduced_homology(l1)) && all_zero(reduced_homology(l1)), "reduced homology zero");
  return t;
}

Tally criterion2() {
  Tally t;
  t.expect(build_Wk(2).size() == 17, "W2 has 17 elements");
  for (std::size_t k = 2; k <= 5; ++k) {
    const std::string tag = " k=" + std::to_string(k);
    for (bool tilde : {false, true}) {
      Poset w = tilde ? build_Wk_tilde(k) : build_Wk(k);
      const std::string name = (tilde ? "W~" : "W") + tag;
      const auto r = oracle::relation(w);
      t.expect(aut_poset(w).certified_order == 1, name + " rigid");
      if (k == 2) t.expect(brute_aut(w) == 1, name + " rigid by brute force");
      t.expect(oracle::beat_points(r).empty(), name + " minimal");
      t.expect(is_acyclic(w), name + " acyclic");
      t.expect(oracle::height(r) == static_cast<int>(tilde ? 2 * k - 1 : 2 * k), name + " height");
    }
  }
  return t;
}

Tally criterion3() {
  Tally t;
  std::mt19937 rng(2024);
  std::vector<Poset> pool;
  while (pool.size() < 100) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Poset p = core(oracle::random_poset(rng, n, 0.2 + 0.05 * (rng() % 8)));
    if (p.size() >= 2 && p.size() <= 8 && oracle::beat_points(oracle::relation(p)).empty()) pool.push_back(p);
  }
  std::vector<std::size_t> aut_size, ht;
  std::vector<bool> acyclic;
  for (const auto& p : pool) {
    aut_size.push_back(brute_aut(p));
    ht.push_back(oracle::height(oracle::relation(p)));
    acyclic.push_back(all_zero(reduced_homology(p)));
  }
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = 0; b < pool.size(); ++b) {
      if (a == b) continue;
      ++pairs;
      const std::string tag = "pair " + std::to_string(a) + "," + std::to_string(b);
      JoinResult j = non_hausdorff_join(pool[a], pool[b]);
      const auto r = oracle::relation(j.poset);
      t.expect(oracle::height(r) == static_cast<int>(ht[a] + ht[b] + 1), tag + " height");
      t.expect(oracle::beat_points(r).empty(), tag + " minimal");
      PermGroup g = aut_poset(j.poset);
      t.expect(g.certified_order == aut_size[a] * aut_size[b], tag + " |aut|");
      // each generator restricts to the two sides
      for (const auto& f : g.generators()) {
        bool sides = true;
        for (Index i : j.left.map) sides = sides && std::count(j.left.map.begin(), j.left.map.end(), f(i)) == 1;
        t.expect(sides, tag + " aut preserves the factors");
      }
      if (acyclic[a] || acyclic[b]) t.expect(all_zero(reduced_homology(j.poset)), tag + " acyclic");
    }
  // the random pool has no acyclic member, so the rigid acyclic builders
  // stand in as the acyclic factor
  std::vector<Poset> acyc{build_L1(), build_Wk_tilde(2), build_Wk(2)};
  for (const auto& z : acyc) {
    t.expect(all_zero(oracle::reduced_homology(z)), "builder acyclic");
    for (std::size_t a = 0; a < pool.size(); ++a) {
      t.expect(all_zero(reduced_homology(non_hausdorff_join(pool[a], z).poset)), "P * Z acyclic");
      t.expect(all_zero(reduced_homology(non_hausdorff_join(z, pool[a]).poset)), "Z * P acyclic");
    }
  }
  t.expect(pairs == 9900, "9900 ordered pairs");
  return t;
}

Tally criterion4() {
  Tally t;
  std::mt19937 rng(77);
  std::vector<Poset> corpus{build_L1(), build_Wk_tilde(2), sphere_model(1), sphere_model(2), moore_cyclic(2)};
  while (corpus.size() < 200) corpus.push_back(oracle::random_poset(rng, 1 + rng() % 8, 0.2 + 0.05 * (rng() % 8)));
  std::size_t automorphisms = 0;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const Poset& p = corpus[c];
    const auto r = oracle::relation(p);
    const auto chains = maximal_chains(r);
    const auto el = enumerate_elements(aut_poset(p));
    if (p.size() <= 10) t.expect(el.elements.size() == brute_aut(p), "poset " + std::to_string(c) + " group order");
    for (const auto& f : el.elements) {
      ++automorphisms;
      bool order = true;
      for (int a = 0; a < r.n; ++a)
        for (int b = 0; b < r.n; ++b) order = order && (r.le[a][b] == r.le[f(a)][f(b)]);
      t.expect(order, "poset " + std::to_string(c) + " order both ways");
      bool ch = true;
      for (const auto& m : chains) {
        std::vector<int> img;
        for (int x : m) img.push_back(static_cast<int>(f(x)));
        ch = ch && chains.count(img) && img.size() == m.size();
      }
      t.expect(ch, "poset " + std::to_string(c) + " maximal chains");
    }
  }
  t.expect(automorphisms > corpus.size(), "nontrivial automorphisms exercised");
  return t;
}

Tally criterion5() {
  Tally t;
  std::size_t compared = 0;
  for (int n = 1; n <= 6; ++n)
    for (const Poset& p : exhaustive(n)) {
      const auto want = oracle::reduced_homology(p);
      t.expect(reduced_homology(p) == want, "exhaustive n=" + std::to_string(n));
      t.expect(reduced_homology(p, {.morse = false}) == want, "exhaustive n=" + std::to_string(n) + " no Morse");
      ++compared;
    }
  // naturally labelled posets on up to 6 points: 1 + 2 + 7 + 40 + 357 + 4824
  t.expect(compared == 5231, "corpus size");
  std::size_t builders = 0;
  for (const auto& p : builder_outputs()) {
    if (oracle::chain_count(p) > 500) continue;
    ++builders;
    const auto want = oracle::reduced_homology(p);
    t.expect(reduced_homology(p) == want, "builder output");
    t.expect(reduced_homology(p, {.morse = false}) == want, "builder output no Morse");
  }
  t.expect(builders >= 10, "builder outputs compared");
  return t;
}

Tally criterion6() {
  Tally t;
  std::mt19937 rng(606);
  for (int c = 0; c < 50; ++c) {
    const std::string tag = "graph " + std::to_string(c);
    SimpleGraph g = oracle::random_connected_graph(rng, 2 + c % 8, 0.1 + 0.05 * (c % 7));
    const auto brute = oracle::automorphisms(g);
    IncidencePoset ip = incidence_poset(g);
    PermGroup a = aut_poset(ip.poset);
    t.expect(a.certified_order == brute.size(), tag + " |aut|");
    // restriction to the vertex elements, as a map aut(P) -> Sym(V)
    ActionMap phi = restrict_action(a, ip.vertex_embedding);
    t.expect(phi.is_homomorphism(), tag + " restriction is a homomorphism");
    const auto el = enumerate_elements(a);
    std::set<std::vector<Index>> induced;
    for (const auto& f : el.elements) {
      std::vector<Index> img(g.order());
      for (Index v = 0; v < g.order(); ++v) {
        const Index y = f(ip.vertex_embedding[v]);
        img[v] = static_cast<Index>(std::find(ip.vertex_embedding.begin(), ip.vertex_embedding.end(), y) -
                                    ip.vertex_embedding.begin());
      }
      induced.insert(img);
    }
    std::set<std::vector<Index>> want;
    for (const auto& b : brute) want.insert(std::vector<Index>(b.begin(), b.end()));
    // injective onto aut(G), with the same action on V
    t.expect(induced.size() == el.elements.size(), tag + " injective");
    t.expect(induced == want, tag + " V-action matches aut(G)");
  }
  return t;
}

Tally criterion7(double& worst) {
  Tally t;
  for (const char* name : {"s3_rep.json", "z4_quotient_rep.json", "d4_rep.json"}) {
    const auto t0 = std::chrono::steady_clock::now();
    Representation rho = representation_from_json(load(name));
    const std::size_t order = group_order(rho.source);
    std::vector<SimpleGraph> members;
    for (std::size_t j : {1u, 2u}) {
      const std::string tag = std::string(name) + " j=" + std::to_string(j);
      GraphRealization r = realize_graph(rho, j);
      t.expect(r.report.all_passed(), tag + " report: " + report_failures(r.report));
      for (const char* clause : {"connected", "minimum degree at least 2", "aut isomorphic to G",
                                 "restriction to V equals rho"}) {
        const Check* c = r.report.find(clause);
        t.expect(c && c->passed, tag + " clause " + clause);
      }
      t.expect(is_connected(r.graph) && min_degree(r.graph) >= 2, tag + " connected, degree >= 2");
      t.expect(r.aut.certified_order == order, tag + " |aut| = |G|");
      // generator images are adjacency-preserving and act as rho on V
      std::set<std::pair<Index, Index>> edges;
      for (auto [a, b] : r.graph.edges()) edges.insert({std::min(a, b), std::max(a, b)});
      for (std::size_t s = 0; s < r.generator_images.size(); ++s) {
        const Permutation& f = r.generator_images[s];
        bool adj = true;
        for (auto [a, b] : r.graph.edges()) adj = adj && edges.count({std::min(f(a), f(b)), std::max(f(a), f(b))});
        t.expect(adj, tag + " generator image is an automorphism");
        bool onv = true;
        for (Index v = 0; v < r.v_embedding.size(); ++v)
          onv = onv && f(r.v_embedding[v]) == r.v_embedding[rho.images[s](v)];
        t.expect(onv, tag + " generator acts as rho on V");
      }
      members.push_back(r.graph);
    }
    t.expect(!isomorphic(members[0], members[1]).has_value(), std::string(name) + " j=1,2 non-isomorphic");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    t.expect(secs <= 300, std::string(name) + " within 5 min");
  }
  return t;
}

Tally criterion8(double& case_c) {
  Tally t;
  struct Case {
    const char* spec;
    std::map<int, AbelianGroup> homology;
  };
  std::vector<Case> cases{{"z2_swap.json", {{1, AbelianGroup(2, {})}}},
                          {"z2_torsion3.json", {{1, AbelianGroup(0, {3, 3})}}},
                          {"s3_natural.json", {{1, AbelianGroup(3, {})}, {2, AbelianGroup(1, {})}}}};
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string tag = c.spec;
    Caps caps;
    RealizationSpec spec = spec_from_json(load(c.spec), &caps);
    RealizeOptions opts;
    opts.caps = caps;
    ModuleRealization m = realize_modules(spec, opts);
    t.expect(m.report.all_passed(), tag + " report: " + report_failures(m.report));
    for (const auto& ch : m.report.checks)
      if (ch.name.rfind("degree ", 0) == 0) t.expect(ch.passed, tag + " " + ch.name);
    const auto h = reduced_homology(m.poset, {.simplex_budget = caps.simplex_budget});
    bool hom = true;
    for (const auto& [d, g] : h) hom = hom && g == (c.homology.count(d) ? c.homology.at(d) : AbelianGroup());
    t.expect(hom, tag + " homology");
    t.expect(aut_poset(m.poset).certified_order == group_order(spec.group), tag + " |aut(X)| = |G|");
    t.expect(is_minimal_space(m.poset), tag + " minimal");
    t.expect(m.report.find("X connected") && m.report.find("X connected")->passed, tag + " connected");
    for (const char* name : {"aut isomorphic to G", "f(V) = V and f(Z) = Z for every automorphism generator"}) {
      const Check* ch = m.report.find(name);
      t.expect(ch && ch->passed, tag + " " + name);
    }
    // the stored layout replays
    t.expect(verify_modules(m.poset, spec, m.layout, opts).all_passed(), tag + " replay");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (tag == "s3_natural.json") {
      case_c = secs;
      t.expect(secs <= 600, "case (c) within 10 min");
    }
  }
  return t;
}

Tally criterion9() {
  Tally t;
  Caps caps;
  RealizationSpec spec = spec_from_json(load("s3_natural.json"), &caps);
  spec.family_index = 1;
  RealizeOptions opts;
  opts.caps = caps;
  FamilyResult f = family(spec, 3, opts);
  t.expect(f.members.size() == 3, "three members");
  t.expect(f.report.all_passed(), "family report: " + report_failures(f.report));
  for (std::size_t a = 0; a < f.members.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      t.expect(!isomorphic(f.members[a].poset, f.members[b].poset).has_value(),
               "members " + std::to_string(b + 1) + "," + std::to_string(a + 1) + " non-isomorphic");
  return t;
}

}  // namespace

int main() {
  int failed = 0;
  auto run = [&](int id, const std::string& name, double limit, std::function<Tally(std::string&)> body) {
    const auto t0 = std::chrono::steady_clock::now();
    Tally t;
    std::string extra;
    try {
      t = body(extra);
    } catch (const std::exception& e) {
      t.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0) t.expect(secs < limit, "runtime limit " + std::to_string(limit) + " s");
    const bool ok = t.checks > 0 && t.failed == 0;
    if (!ok) ++failed;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s", secs);
    std::cout << (ok ? "PASS " : "FAIL ") << id << " " << name << " (" << buf << extra << "): " << t.summary()
              << std::endl;
  };
  run(1, "L1 suite", 1, [](std::string&) { return criterion1(); });
  run(2, "W and W~ towers k=2..5", 10, [](std::string&) { return criterion2(); });
  run(3, "join laws on 100 random minimal posets", 60, [](std::string&) { return criterion3(); });
  run(4, "automorphisms preserve order and maximal chains on 200 posets", 0,
      [](std::string&) { return criterion4(); });
  run(5, "sparse homology agrees with the dense oracle", 0, [](std::string&) { return criterion5(); });
  run(6, "incidence posets of 50 random graphs", 0, [](std::string&) { return criterion6(); });
  run(7, "graph realization S3, Z/4 on 2, D4", 0, [](std::string& extra) {
    double worst = 0;
    Tally t = criterion7(worst);
    extra = ", slowest instance " + std::to_string(static_cast<int>(worst + 0.5)) + " s";
    return t;
  });
  run(8, "realization of permutation modules, cases (a) (b) (c)", 0, [](std::string& extra) {
    double c = 0;
    Tally t = criterion8(c);
    extra = ", case (c) " + std::to_string(static_cast<int>(c + 0.5)) + " s";
    return t;
  });
  run(9, "family j=1,2,3 pairwise non-isomorphic", 900, [](std::string&) { return criterion9(); });
  return failed;
}
