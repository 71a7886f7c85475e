#include "alexrealize/builders.hpp"

#include <algorithm>
#include <optional>
#include <map>
#include <set>

#include "alexrealize/errors.hpp"
#include "alexrealize/symmetry.hpp"

namespace alexrealize {

Poset build_L1() {
  return Poset({"n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "n9"},
               {{"n1", "n2"}, {"n1", "n5"},
                {"n4", "n2"}, {"n4", "n5"}, {"n4", "n8"},
                {"n7", "n5"}, {"n7", "n8"},
                {"n2", "n3"}, {"n2", "n6"},
                {"n5", "n3"}, {"n5", "n9"},
                {"n8", "n6"}, {"n8", "n9"}});
}

namespace {

Poset prefixed_L1(const std::string& prefix) {
  Poset l = build_L1();
  std::vector<std::string> ids;
  for (const auto& e : l.elements()) ids.push_back(prefix + e);
  return relabel(l, ids);
}

// Points moved by the involution of L1 are n1, n2, n3, n7, n8, n9.
bool moved_in_copy(const std::string& id) {
  auto dot = id.rfind(".n");
  if (dot == std::string::npos) return false;
  int i = std::stoi(id.substr(dot + 2));
  return i != 4 && i != 5 && i != 6;
}

void gate(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) throw GateFailure(name, detail);
}

// Glues the moved maximal point n3 of a fresh copy onto the least moved
// point of `base` at the given (1-indexed) position of a maximum chain.
Poset glue_L1(const Poset& base, std::size_t position, std::size_t copy) {
  const auto st = chain_stats(base);
  std::string best;
  for (Index x = 0; x < base.size(); ++x) {
    if (st.through[x] != st.height || st.below[x] != position - 1) continue;
    if (!moved_in_copy(base.id(x))) continue;
    if (best.empty() || base.id(x) < best) best = base.id(x);
  }
  gate(!best.empty(), "gluing point", "no qualifying point in the previous stage");
  JoinOptions opts{"", ""};
  return wedge(base, best, prefixed_L1("c" + std::to_string(copy) + "."), "c" + std::to_string(copy) + ".n3", opts)
      .poset;
}

void tower_gates(const Poset& p, std::size_t expected_height, bool rigid) {
  gate(height(p) == expected_height, "height",
       "expected " + std::to_string(expected_height) + ", got " + std::to_string(height(p)));
  gate(is_minimal_space(p), "minimality", "beat points present");
  if (rigid) {
    auto a = aut_poset(p);
    gate(a.generators().empty(), "rigidity", "nontrivial automorphism found");
  }
  gate(is_acyclic(p), "acyclicity", "nonzero reduced homology");
}

bool same_homology(const std::map<int, AbelianGroup>& a, const std::map<int, AbelianGroup>& b) {
  auto at = [](const std::map<int, AbelianGroup>& m, int d) {
    auto it = m.find(d);
    return it == m.end() ? AbelianGroup{} : it->second;
  };
  for (const auto& [d, g] : a)
    if (!(g == at(b, d))) return false;
  for (const auto& [d, g] : b)
    if (!(g == at(a, d))) return false;
  return true;
}

Poset tower(std::size_t k) {
  Poset w = prefixed_L1("c1.");
  for (std::size_t c = 2; c <= k; ++c) w = glue_L1(w, 1, c);
  return w;
}

}  // namespace

Poset build_Wk(std::size_t k) {
  if (k < 1) throw InvalidInput("W_k needs k >= 1");
  Poset w = tower(k);
  tower_gates(w, 2 * k, k >= 2);
  return w;
}

Poset build_Wk_tilde(std::size_t k) {
  if (k < 2) throw InvalidInput("W~_k needs k >= 2");
  Poset w = glue_L1(tower(k - 1), 2, k);
  tower_gates(w, 2 * k - 1, true);
  return w;
}

Poset sphere_model(std::size_t i) {
  auto level = [](std::size_t j) {
    std::string s = "s" + std::to_string(j);
    return Poset({s + "a", s + "b"}, {});
  };
  Poset p = level(0);
  for (std::size_t j = 1; j <= i; ++j) p = non_hausdorff_join(p, level(j), {"", ""}).poset;
  return p;
}

Poset face_poset(const SimplicialComplex& k) {
  validate_complex(k);
  std::set<std::vector<Index>> simplices;
  for (const auto& f : k.facets) {
    const std::size_t n = f.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<Index> s;
      for (std::size_t b = 0; b < n; ++b)
        if (mask >> b & 1) s.push_back(f[b]);
      simplices.insert(std::move(s));
    }
  }
  std::vector<std::vector<Index>> list(simplices.begin(), simplices.end());
  std::stable_sort(list.begin(), list.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::map<std::vector<Index>, Index> pos;
  std::vector<std::string> ids;
  for (Index i = 0; i < list.size(); ++i) {
    pos.emplace(list[i], i);
    std::string id;
    for (std::size_t j = 0; j < list[i].size(); ++j) {
      if (j) id += '|';
      id += k.vertices[list[i][j]];
    }
    ids.push_back(std::move(id));
  }
  std::vector<std::pair<Index, Index>> covers;
  for (Index i = 0; i < list.size(); ++i) {
    if (list[i].size() < 2) continue;
    for (std::size_t j = 0; j < list[i].size(); ++j) {
      auto f = list[i];
      f.erase(f.begin() + j);
      covers.emplace_back(pos.at(f), i);
    }
  }
  return Poset::from_index_covers(std::move(ids), std::move(covers));
}

Poset moore_cyclic(std::size_t m) {
  if (m < 2) throw InvalidInput("moore_cyclic needs m >= 2");
  const std::size_t n = 3 * m;
  SimplicialComplex k;
  k.vertices = {"a", "b", "c"};
  for (std::size_t j = 0; j < n; ++j) k.vertices.push_back("i" + std::to_string(j));
  k.vertices.push_back("z");
  const Index z = static_cast<Index>(k.vertices.size() - 1);
  auto outer = [](std::size_t j) { return static_cast<Index>(j % 3); };
  auto inner = [n](std::size_t j) { return static_cast<Index>(3 + j % n); };
  auto tri = [&](Index a, Index b, Index c) {
    std::vector<Index> t{a, b, c};
    std::sort(t.begin(), t.end());
    k.facets.push_back(t);
  };
  for (std::size_t j = 0; j < n; ++j) {
    tri(outer(j), outer(j + 1), inner(j));
    tri(outer(j + 1), inner(j), inner(j + 1));
    tri(z, inner(j), inner(j + 1));
  }
  std::sort(k.facets.begin(), k.facets.end());
  Poset p = face_poset(k);
  auto h = reduced_homology(p);
  for (const auto& [d, g] : h) {
    const AbelianGroup want = d == 1 ? AbelianGroup(0, {static_cast<std::int64_t>(m)}) : AbelianGroup{};
    gate(g == want, "homology",
         "degree " + std::to_string(d) + " is " + g.to_string() + ", expected " + want.to_string());
  }
  gate(is_minimal_space(p), "minimality", "beat points present");
  return p;
}

Poset suspend(const Poset& p) {
  std::size_t k = 0;
  while (p.find("north" + std::to_string(k)) || p.find("south" + std::to_string(k))) ++k;
  Poset s({"north" + std::to_string(k), "south" + std::to_string(k)}, {});
  Poset out = non_hausdorff_join(p, s, {"", ""}).poset;
  if (p.size() <= 400) {
    auto hp = reduced_homology(p);
    auto hs = reduced_homology(out);
    for (const auto& [d, g] : hs) {
      AbelianGroup want = d == 0 ? AbelianGroup{} : (hp.count(d - 1) ? hp.at(d - 1) : AbelianGroup{});
      gate(g == want, "suspension shift",
           "degree " + std::to_string(d) + " is " + g.to_string() + ", expected " + want.to_string());
    }
  }
  return out;
}

std::string pick_anchor(const Poset& p) {
  if (p.empty()) throw EmptyInput("anchor of the empty poset");
  const auto st = chain_stats(p);
  std::string best;
  for (Index x = 0; x < p.size(); ++x)
    if (p.is_maximal_element(x) && st.through[x] == st.height && (best.empty() || p.id(x) < best))
      best = p.id(x);
  return best;
}

Poset rigid_attachment(std::size_t step) {
  const std::size_t rung = step / 4 + 2;
  Poset a = (step / 2) % 2 == 0 ? build_Wk_tilde(rung) : build_Wk(rung);
  return step % 2 == 0 ? a : opposite(a);
}

std::string pick_base(const Poset& p) {
  if (p.empty()) throw EmptyInput("base point of the empty poset");
  const auto st = chain_stats(p);
  std::string best;
  for (Index x = 0; x < p.size(); ++x)
    if (p.is_minimal_element(x) && st.through[x] == st.height && (best.empty() || p.id(x) < best))
      best = p.id(x);
  return best;
}

namespace {

Poset rigidify_with(const Poset& p, const RigidifyOptions& opts,
                    const std::map<int, AbelianGroup>& homology, bool interior_first) {
  Poset cur = p;
  for (std::size_t step = 0;; ++step) {
    PermGroup a = aut_poset(cur);
    if (a.generators().empty()) return cur;
    if (step >= opts.max_steps)
      throw RigidificationExhausted("automorphism group still nontrivial after " +
                                    std::to_string(step) + " attachments");
    const Poset att = rigid_attachment(step);
    const std::size_t h = height(att);
    const auto st = chain_stats(cur);

    // The attachment hangs below x or sits above it.
    struct Choice {
      std::size_t interior, new_height;
      bool below;
      std::string id;
    };
    std::optional<Choice> best;
    auto better = [interior_first](const Choice& c, const Choice& b) {
      if (interior_first && c.interior != b.interior) return c.interior > b.interior;
      if (c.new_height != b.new_height) return c.new_height < b.new_height;
      if (c.interior != b.interior) return c.interior > b.interior;
      if (c.below != b.below) return c.below;
      return c.id < b.id;
    };
    for (const auto& orb : orbits(a)) {
      if (orb.size() < 2) continue;
      for (Index x : orb) {
        const std::size_t interior = std::min(st.below[x], st.above[x]);
        Choice hang{interior, std::max(st.height, std::max(st.below[x], h) + st.above[x]), true, cur.id(x)};
        Choice sit{interior, std::max(st.height, st.below[x] + std::max(st.above[x], h)), false, cur.id(x)};
        for (const Choice& c : {hang, sit})
          if (!best || better(c, *best)) best = c;
      }
    }
    const std::string glue = best->below ? pick_anchor(att) : pick_base(att);
    cur = wedge(cur, best->id, att, glue, {"", "rig" + std::to_string(step) + "/"}).poset;
    gate(is_minimal_space(cur), "minimality", "attachment " + std::to_string(step) + " created beat points");
    gate(same_homology(reduced_homology(cur), homology), "homology",
         "attachment " + std::to_string(step) + " changed the homology");
  }
}

}  // namespace

// Two greedy placements; the lower (then smaller) result wins.
Poset rigidify(const Poset& p, const RigidifyOptions& opts) {
  const auto homology = reduced_homology(p);
  std::optional<Poset> best;
  std::optional<RigidificationExhausted> failure;
  for (bool interior_first : {true, false}) {
    try {
      Poset r = rigidify_with(p, opts, homology, interior_first);
      if (!best || std::pair(height(r), r.size()) < std::pair(height(*best), best->size()))
        best = std::move(r);
    } catch (const RigidificationExhausted& e) {
      failure = e;
    }
  }
  if (!best) throw *failure;
  return *best;
}

MoorePiece moore_piece(const MoorePieceSpec& spec, const RigidifyOptions& opts) {
  if (spec.degree < 1) throw InvalidInput("Moore pieces need degree >= 1");
  const std::size_t i = spec.degree;
  std::vector<Poset> parts;
  for (std::size_t r = 0; r < spec.group.rank(); ++r) parts.push_back(sphere_model(i));
  for (std::int64_t d : spec.group.torsion()) {
    Poset c = moore_cyclic(static_cast<std::size_t>(d));
    for (std::size_t s = 1; s < i; ++s) c = suspend(c);
    parts.push_back(c);
  }
  Poset acc;
  if (parts.empty()) {
    acc = build_Wk_tilde(2);
  } else {
    std::vector<std::string> ids;
    for (const auto& e : parts[0].elements()) ids.push_back("p0/" + e);
    acc = relabel(parts[0], ids);
    for (std::size_t k = 1; k < parts.size(); ++k)
      acc = wedge(acc, pick_anchor(acc), parts[k], pick_anchor(parts[k]),
                  {"", "p" + std::to_string(k) + "/"})
                .poset;
  }
  Poset y = rigidify(acc, opts);
  MoorePiece out;
  out.anchor = pick_anchor(y);
  auto h = reduced_homology(y);
  for (const auto& [d, g] : h) {
    AbelianGroup want = static_cast<std::size_t>(d) == i ? spec.group : AbelianGroup{};
    gate(g == want, "homology",
         "degree " + std::to_string(d) + " is " + g.to_string() + ", expected " + want.to_string());
  }
  if (!spec.group.is_zero() && h.size() <= i)
    throw GateFailure("homology", "piece has no homology in degree " + std::to_string(i));
  gate(is_minimal_space(y), "minimality", "beat points present");
  gate(aut_poset(y).generators().empty(), "rigidity", "nontrivial automorphism remains");
  out.poset = std::move(y);
  return out;
}

}  // namespace alexrealize
