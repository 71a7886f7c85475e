#include "alexrealize/realize.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "alexrealize/errors.hpp"

namespace alexrealize {

Gadget arc_gadget(std::size_t label, bool directed, std::size_t escalation) {
  std::vector<std::string> ids{"tail", "t"};
  std::vector<SimpleGraph::Edge> edges{{0, 1}};
  Index last = 1;
  if (directed) {
    ids.push_back("h");
    edges.emplace_back(1, 2);
    last = 2;
  }
  const Index head = static_cast<Index>(ids.size());
  ids.push_back("head");
  edges.emplace_back(last, head);
  Index prev = 1;
  for (std::size_t k = 0; k < label + 1 + escalation; ++k) {
    const Index q = static_cast<Index>(ids.size());
    ids.push_back("p" + std::to_string(k));
    edges.emplace_back(prev, q);
    prev = q;
  }
  return {SimpleGraph::from_index_edges(std::move(ids), edges), 0, head};
}

bool RealizationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* RealizationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs a named check; library errors count as failures with their message.
class Checker {
 public:
  Checker(RealizationReport& r, bool timing) : report_(r), timing_(timing) {}

  bool run(const std::string& name, const std::function<bool(Check&)>& body) {
    Check c;
    c.name = name;
    const auto t0 = Clock::now();
    try {
      c.passed = body(c);
    } catch (const CapExceeded&) {
      throw;
    } catch (const Error& e) {
      c.passed = false;
      if (!c.detail.empty()) c.detail += "; ";
      c.detail += e.what();
    }
    if (timing_) c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
    return report_.checks.back().passed;
  }

 private:
  RealizationReport& report_;
  bool timing_;
};

std::string join_strings(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Elements of G with their images under rho, in closure order.
struct GroupTable {
  GroupElements elements;
  std::unordered_map<Permutation, std::size_t, PermutationHash> index;
  std::vector<Permutation> rho;
  std::size_t gens = 0;

  std::size_t mul(std::size_t a, std::size_t b) const {
    return index.at(elements.elements[a] * elements.elements[b]);
  }
};

GroupTable tabulate(const Representation& rho, const Caps& caps) {
  if (!rho.is_homomorphism(caps.group_order))
    throw InvalidInput("the action images do not satisfy the relations of the group");
  GroupTable t;
  t.elements = enumerate_elements(rho.source, caps.group_order);
  t.gens = rho.source.generators().size();
  const auto& el = t.elements.elements;
  for (std::size_t i = 0; i < el.size(); ++i) t.index.emplace(el[i], i);
  t.rho.resize(el.size());
  t.rho[0] = Permutation::identity(rho.target.size());
  for (std::size_t i = 1; i < el.size(); ++i)
    t.rho[i] = t.rho[t.elements.parent[i]] * rho.images[t.elements.via[i]];
  return t;
}

// ---------------------------------------------------------------------------
// Base graph: vertices G and V, labelled arcs replaced by gadgets.

struct BaseGraph {
  SimpleGraph graph;
  std::vector<Index> v_index;
  std::vector<Permutation> generator_images;  // on base vertices
};

BaseGraph build_base(const Representation& rho, const GroupTable& t, std::size_t escalation) {
  const auto& el = t.elements.elements;
  const std::size_t n = el.size();
  const std::size_t nv = rho.target.size();

  // Distinct non-identity generators act as Cayley labels.
  std::vector<std::size_t> labels;
  for (const auto& g : rho.source.generators()) {
    std::size_t i = t.index.at(g);
    if (i != 0 && std::find(labels.begin(), labels.end(), i) == labels.end()) labels.push_back(i);
  }

  std::vector<std::string> ids;
  std::vector<std::pair<Index, Index>> edges;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("g:" + std::to_string(i));
  std::vector<Index> v_index(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    v_index[v] = static_cast<Index>(ids.size());
    ids.push_back("v:" + rho.target[v]);
  }

  // kind 0: directed Cayley arc (g, s); kind 1: undirected Cayley pair for an
  // involution, keyed by its smaller endpoint; kind 2: connection arc (g, v).
  struct Arc {
    std::vector<Index> internal;
  };
  std::map<std::tuple<int, std::size_t, std::size_t>, Arc> arcs;
  auto add_arc = [&](std::tuple<int, std::size_t, std::size_t> key, Index u, Index w,
                     std::size_t colour, bool directed) {
    const std::string base = "a" + std::to_string(arcs.size()) + ":";
    const Gadget gd = arc_gadget(colour, directed, escalation);
    std::vector<Index> local(gd.graph.order());
    Arc a;
    for (Index x = 0; x < gd.graph.order(); ++x) {
      if (x == gd.tail) {
        local[x] = u;
      } else if (x == gd.head) {
        local[x] = w;
      } else {
        local[x] = static_cast<Index>(ids.size());
        ids.push_back(base + gd.graph.id(x));
        a.internal.push_back(local[x]);
      }
    }
    for (auto [x, y] : gd.graph.edges()) edges.emplace_back(local[x], local[y]);
    arcs.emplace(key, std::move(a));
  };

  for (std::size_t c = 0; c < labels.size(); ++c) {
    const std::size_t s = labels[c];
    const bool involution = t.mul(s, s) == 0;
    for (std::size_t g = 0; g < n; ++g) {
      const std::size_t gs = t.mul(g, s);
      if (involution) {
        if (g < gs) add_arc({1, g, c}, static_cast<Index>(g), static_cast<Index>(gs), c, false);
      } else {
        add_arc({0, g, c}, static_cast<Index>(g), static_cast<Index>(gs), c, true);
      }
    }
  }
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t v = 0; v < nv; ++v) {
      const std::size_t colour = labels.size() + t.rho[g].inverse()(static_cast<Index>(v));
      add_arc({2, g, v}, static_cast<Index>(g), v_index[v], colour, escalation > 0);
    }

  BaseGraph b;
  b.graph = SimpleGraph::from_index_edges(ids, edges);
  b.v_index = v_index;

  // Left multiplication by each generator.
  for (std::size_t k = 0; k < t.gens; ++k) {
    const std::size_t h = t.index.at(rho.source.generators()[k]);
    std::vector<Index> img(ids.size());
    for (std::size_t g = 0; g < n; ++g) img[g] = static_cast<Index>(t.mul(h, g));
    for (std::size_t v = 0; v < nv; ++v) img[v_index[v]] = v_index[t.rho[h](static_cast<Index>(v))];
    for (const auto& [key, arc] : arcs) {
      auto [kind, g, x] = key;
      std::tuple<int, std::size_t, std::size_t> target;
      if (kind == 0) {
        target = {0, t.mul(h, g), x};
      } else if (kind == 1) {
        const std::size_t a = t.mul(h, g), c = t.mul(h, t.mul(g, labels[x]));
        target = {1, std::min(a, c), x};
      } else {
        target = {2, t.mul(h, g), t.rho[h](static_cast<Index>(x))};
      }
      const Arc& other = arcs.at(target);
      for (std::size_t i = 0; i < arc.internal.size(); ++i) img[arc.internal[i]] = other.internal[i];
    }
    b.generator_images.emplace_back(std::move(img));
  }
  return b;
}

std::vector<SimpleGraph> non_dividing_primes(const SimpleGraph& base, std::size_t j) {
  const auto factors = prime_factorization(base, {.max_vertices = base.order()});
  std::vector<SimpleGraph> out;
  for (std::size_t count = j; out.size() < j; count += 4) {
    out.clear();
    for (const auto& q : enumerate_rigid_primes(count, {.max_vertices = 7})) {
      bool divides = false;
      for (const auto& f : factors)
        if (f.order() == q.order() && f.edge_count() == q.edge_count() && isomorphic(f, q))
          divides = true;
      if (!divides) out.push_back(q);
      if (out.size() == j) break;
    }
  }
  return out;
}

// Clauses shared by the graph and space pipelines: invariance of V, the
// group isomorphism carried by the constructed automorphisms, and the
// restriction to V.
template <class IsAut>
void group_clauses(Checker& ck, const std::string& prefix, const Representation& rho,
                   const GroupTable& t, const std::vector<std::string>& domain,
                   const PermGroup& aut, const std::vector<Permutation>& images,
                   const std::vector<Index>& v_embedding, IsAut is_aut) {
  const std::size_t order = t.elements.elements.size();
  ck.run(prefix + "V invariant", [&](Check& c) {
    std::unordered_set<Index> vs(v_embedding.begin(), v_embedding.end());
    for (std::size_t k = 0; k < aut.generators().size(); ++k)
      for (Index v : v_embedding)
        if (!vs.count(aut.generators()[k](v))) {
          c.detail = "automorphism generator " + std::to_string(k) + " moves " + domain[v] +
                     " outside V";
          return false;
        }
    c.detail = std::to_string(aut.generators().size()) + " automorphism generators preserve V";
    return true;
  });

  // aut -> G, read off the images of all elements of G.
  std::optional<GroupIsomorphism> to_g;
  ck.run(prefix + "aut isomorphic to G", [&](Check& c) {
    if (!aut.certified_order) {
      c.detail = "automorphism group order overflowed";
      return false;
    }
    c.witnesses.emplace_back("aut order", std::to_string(*aut.certified_order));
    c.witnesses.emplace_back("group order", std::to_string(order));
    if (*aut.certified_order != order) {
      c.detail = "|aut| = " + std::to_string(*aut.certified_order) + " but |G| = " + std::to_string(order);
      return false;
    }
    for (std::size_t k = 0; k < images.size(); ++k)
      if (!is_aut(images[k])) {
        c.detail = "induced map of generator " + std::to_string(k) + " is not an automorphism";
        return false;
      }
    ActionMap phi{rho.source, domain, images};
    if (!phi.is_homomorphism(order)) {
      c.detail = "induced maps do not satisfy the relations of G";
      return false;
    }
    std::unordered_map<Permutation, std::size_t, PermutationHash> back;
    std::vector<Permutation> full(order);
    full[0] = Permutation::identity(domain.size());
    back.emplace(full[0], 0);
    for (std::size_t i = 1; i < order; ++i) {
      full[i] = full[t.elements.parent[i]] * images[t.elements.via[i]];
      if (!back.emplace(full[i], i).second) {
        c.detail = "G -> aut is not injective";
        return false;
      }
    }
    GroupIsomorphism iso;
    for (std::size_t k = 0; k < aut.generators().size(); ++k) {
      auto it = back.find(aut.generators()[k]);
      if (it == back.end()) {
        c.detail = "automorphism generator " + std::to_string(k) + " is not induced by G";
        return false;
      }
      iso.generator_images.push_back(t.elements.elements[it->second]);
    }
    for (std::size_t i = 0; i < order; ++i) iso.table.emplace_back(full[i], t.elements.elements[i]);
    if (!groups_isomorphic(aut, rho.source, std::max<std::size_t>(order, 1))) {
      c.detail = "isomorphism search found no isomorphism";
      return false;
    }
    for (std::size_t k = 0; k < images.size(); ++k)
      c.witnesses.emplace_back("image of " + rho.source.generators()[k].cycles(rho.source.domain()),
                               images[k].cycles(domain));
    to_g = std::move(iso);
    c.detail = "G -> aut is a bijective homomorphism onto the " + std::to_string(order) +
               " automorphisms";
    return true;
  });
  ck.run(prefix + "restriction to V equals rho", [&](Check& c) {
    if (!to_g) {
      c.detail = "no isomorphism aut -> G";
      return false;
    }
    ActionMap phi = restrict_action(aut, v_embedding);
    phi.target = rho.target;
    if (!actions_equal(phi, rho, *to_g)) {
      c.detail = "the action of aut on V differs from rho";
      return false;
    }
    c.detail = "aut acts on V as rho under the isomorphism";
    return true;
  });
}

Permutation extend_product(const Permutation& p, std::size_t nq) {
  std::vector<Index> img(p.size() * nq);
  for (Index a = 0; a < p.size(); ++a)
    for (Index b = 0; b < nq; ++b) img[a * nq + b] = static_cast<Index>(p(a) * nq + b);
  return Permutation(std::move(img));
}

GraphRealization realize_graph_at(const Representation& rho, const GroupTable& t, std::size_t j,
                                  std::size_t escalation, const RealizeOptions& opts) {
  if (j < 1) throw InvalidInput("family index must be at least 1");
  GraphRealization r;
  r.escalation = escalation;
  r.report.pipeline = "graph";
  Checker ck(r.report, opts.timing);
  BaseGraph base = build_base(rho, t, escalation);
  r.base = base.graph;
  r.prime = non_dividing_primes(base.graph, j).back();
  const std::size_t nq = r.prime.order();
  r.graph = cartesian_product(base.graph, r.prime);
  if (r.graph.order() > opts.caps.graph_size)
    throw CapExceeded("realized graph has " + std::to_string(r.graph.order()) +
                      " vertices, above the graph cap " + std::to_string(opts.caps.graph_size));
  for (Index v : base.v_index) r.v_embedding.push_back(static_cast<Index>(v * nq));
  for (const auto& p : base.generator_images) r.generator_images.push_back(extend_product(p, nq));
  r.report.notes.push_back("base graph " + std::to_string(base.graph.order()) + " vertices, rigid prime " +
                           std::to_string(nq) + " vertices, escalation " + std::to_string(escalation));

  ck.run("connected", [&](Check& c) {
    c.detail = std::to_string(r.graph.order()) + " vertices, " + std::to_string(r.graph.edge_count()) + " edges";
    return is_connected(r.graph);
  });
  ck.run("minimum degree at least 2", [&](Check& c) {
    const std::size_t d = min_degree(r.graph);
    c.detail = "minimum degree " + std::to_string(d);
    return d >= 2;
  });
  r.aut = aut_graph(r.graph, nullptr, {.max_vertices = opts.caps.graph_size});
  group_clauses(ck, "", rho, t, r.graph.vertices(), r.aut, r.generator_images, r.v_embedding,
                [&](const Permutation& p) { return is_graph_automorphism(r.graph, p); });
  return r;
}

// Lifts a vertex permutation of a graph to its incidence poset.
Permutation lift_to_incidence(const SimpleGraph& g, const IncidencePoset& ip, const Permutation& p) {
  std::map<std::pair<Index, Index>, std::size_t> edge_pos;
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) edge_pos.emplace(edges[e], e);
  std::vector<Index> img(ip.poset.size());
  for (Index v = 0; v < g.order(); ++v) img[ip.vertex_embedding[v]] = ip.vertex_embedding[p(v)];
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Index a = p(edges[e].first), b = p(edges[e].second);
    if (a > b) std::swap(a, b);
    img[ip.edge_embedding[e]] = ip.edge_embedding[edge_pos.at({a, b})];
  }
  return Permutation(std::move(img));
}

SpaceRealization height1_from(GraphRealization g, const Representation& rho, const GroupTable& t,
                              const RealizeOptions& opts) {
  SpaceRealization s;
  s.report.pipeline = "height-1 space";
  Checker ck(s.report, opts.timing);
  IncidencePoset ip = incidence_poset(g.graph);
  s.poset = ip.poset;
  for (Index v : g.v_embedding) s.v_embedding.push_back(ip.vertex_embedding[v]);
  for (const auto& p : g.generator_images) s.generator_images.push_back(lift_to_incidence(g.graph, ip, p));
  ck.run("height 1", [&](Check& c) {
    c.detail = "height " + std::to_string(height(s.poset));
    return height(s.poset) == 1;
  });
  ck.run("minimal", [&](Check& c) {
    auto beats = beat_points(s.poset);
    c.detail = std::to_string(beats.size()) + " beat points";
    return beats.empty();
  });
  ck.run("V minimal and discrete", [&](Check&) {
    for (Index v : s.v_embedding)
      if (!s.poset.is_minimal_element(v)) return false;
    return true;
  });
  s.aut = aut_poset(s.poset, {.max_vertices = opts.caps.poset_size});
  group_clauses(ck, "", rho, t, s.poset.elements(), s.aut, s.generator_images, s.v_embedding,
                [&](const Permutation& p) { return is_poset_automorphism(s.poset, p); });
  s.graph = std::move(g);
  return s;
}

GraphRealization realize_graph_escalating(const Representation& rho, const GroupTable& t, std::size_t j,
                                          const RealizeOptions& opts) {
  std::string last;
  for (std::size_t e = 0; e <= opts.max_escalation; ++e) {
    GraphRealization r = realize_graph_at(rho, t, j, e, opts);
    if (r.report.all_passed()) return r;
    for (const auto& c : r.report.checks)
      if (!c.passed) {
        last = c.name + ": " + c.detail;
        break;
      }
  }
  throw VerificationFailure("graph realization", "no gadget escalation level passed (" + last + ")");
}

// Z = X1 (*) W for the requested height, without the acyclicity check.
struct AcyclicParts {
  SpaceRealization x1;
  Poset z;
  std::vector<Index> v_embedding;
  std::vector<Permutation> generator_images;
  std::size_t w_size = 0;
};

AcyclicParts build_acyclic(const Representation& rho, const GroupTable& t, std::size_t n, std::size_t j,
                           const RealizeOptions& opts) {
  if (n < 5) throw InvalidInput("acyclic realization needs height n >= 5, got " + std::to_string(n));
  AcyclicParts a;
  a.x1 = height1_from(realize_graph_escalating(rho, t, j, opts), rho, t, opts);
  if (!a.x1.report.all_passed())
    throw VerificationFailure("height-1 space", "the incidence poset failed its checks");
  const std::size_t k = n % 2 == 0 ? (n - 2) / 2 : (n - 1) / 2;
  Poset w = n % 2 == 0 ? build_Wk(k) : build_Wk_tilde(k);
  a.w_size = w.size();
  JoinResult jr = non_hausdorff_join(a.x1.poset, w, {"", ""});
  a.z = std::move(jr.poset);
  if (a.z.size() > opts.caps.poset_size)
    throw CapExceeded("Z has " + std::to_string(a.z.size()) + " elements, above the poset cap");
  for (Index v : a.x1.v_embedding) a.v_embedding.push_back(jr.left.map[v]);
  for (const auto& p : a.x1.generator_images) {
    std::vector<Index> img(a.z.size());
    for (Index x = 0; x < a.x1.poset.size(); ++x) img[jr.left.map[x]] = jr.left.map[p(x)];
    for (Index y = 0; y < w.size(); ++y) img[jr.right.map[y]] = jr.right.map[y];
    a.generator_images.emplace_back(std::move(img));
  }
  return a;
}

void z_clauses(Checker& ck, const std::string& prefix, const Poset& z, std::size_t n,
               const std::vector<Index>& v_embedding, const RealizeOptions& opts) {
  ck.run(prefix + "height", [&](Check& c) {
    c.detail = "height " + std::to_string(height(z)) + ", required " + std::to_string(n);
    return height(z) == n;
  });
  ck.run(prefix + "minimal elements on maximum chains", [&](Check& c) {
    const auto st = chain_stats(z);
    for (Index x = 0; x < z.size(); ++x)
      if (z.is_minimal_element(x) && st.through[x] != st.height) {
        c.detail = z.id(x) + " lies on no chain of length " + std::to_string(st.height);
        return false;
      }
    return true;
  });
  ck.run(prefix + "minimal", [&](Check& c) {
    auto beats = beat_points(z);
    c.detail = std::to_string(beats.size()) + " beat points";
    return beats.empty();
  });
  ck.run(prefix + "V minimal and discrete", [&](Check&) {
    for (Index v : v_embedding)
      if (!z.is_minimal_element(v)) return false;
    return true;
  });
  ck.run(prefix + "acyclic", [&](Check& c) {
    PosetHomology h(z, {.simplex_budget = opts.caps.simplex_budget});
    c.detail = std::to_string(h.simplex_count()) + " simplices, " + std::to_string(h.critical_count()) +
               " critical cells";
    for (const auto& [d, g] : h.groups())
      if (!g.is_zero()) {
        c.detail += "; H~" + std::to_string(d) + " = " + g.to_string();
        return false;
      }
    return true;
  });
}

}  // namespace

GraphRealization realize_graph(const Representation& rho, std::size_t j, const RealizeOptions& opts) {
  if (rho.target.empty()) throw InvalidInput("V must be nonempty");
  GroupTable t = tabulate(rho, opts.caps);
  return realize_graph_escalating(rho, t, j, opts);
}

SpaceRealization realize_space_height1(const Representation& rho, std::size_t j, const RealizeOptions& opts) {
  if (rho.target.empty()) throw InvalidInput("V must be nonempty");
  GroupTable t = tabulate(rho, opts.caps);
  return height1_from(realize_graph_escalating(rho, t, j, opts), rho, t, opts);
}

SpaceRealization realize_space_acyclic(const Representation& rho, std::size_t n, std::size_t j,
                                       const RealizeOptions& opts) {
  if (n < 5) throw InvalidInput("acyclic realization needs height n >= 5, got " + std::to_string(n));
  if (rho.target.empty()) throw InvalidInput("V must be nonempty");
  GroupTable t = tabulate(rho, opts.caps);
  AcyclicParts a = build_acyclic(rho, t, n, j, opts);
  SpaceRealization s;
  s.report.pipeline = "acyclic space";
  Checker ck(s.report, opts.timing);
  z_clauses(ck, "", a.z, n, a.v_embedding, opts);
  s.aut = aut_poset(a.z, {.max_vertices = opts.caps.poset_size});
  group_clauses(ck, "", rho, t, a.z.elements(), s.aut, a.generator_images, a.v_embedding,
                [&](const Permutation& p) { return is_poset_automorphism(a.z, p); });
  s.poset = std::move(a.z);
  s.v_embedding = std::move(a.v_embedding);
  s.generator_images = std::move(a.generator_images);
  s.graph = std::move(a.x1.graph);
  return s;
}

// ---------------------------------------------------------------------------
// Permutation modules.

Representation combined_representation(const RealizationSpec& spec) {
  Representation r;
  r.source = spec.group;
  const std::size_t ng = spec.group.generators().size();
  std::vector<std::vector<Index>> imgs(ng);
  for (const auto& d : spec.degrees) {
    const Index offset = static_cast<Index>(r.target.size());
    for (const auto& l : d.labels) r.target.push_back("v" + std::to_string(d.degree) + "." + l);
    for (std::size_t k = 0; k < ng; ++k)
      for (Index x = 0; x < d.labels.size(); ++x) imgs[k].push_back(offset + d.action[k](x));
  }
  for (auto& i : imgs) r.images.emplace_back(std::move(i));
  return r;
}

void validate_spec(const RealizationSpec& spec, const Caps& caps) {
  if (spec.degrees.empty()) throw InvalidInput("spec: at least one degree is required");
  if (spec.family_index < 1) throw InvalidInput("spec: family_index must be at least 1");
  std::set<int> seen;
  const std::size_t ng = spec.group.generators().size();
  for (const auto& d : spec.degrees) {
    const std::string where = "spec: degree " + std::to_string(d.degree);
    if (d.degree < 1) throw InvalidInput(where + ": degrees start at 1");
    if (!seen.insert(d.degree).second) throw InvalidInput(where + ": listed twice");
    if (d.labels.empty()) throw InvalidInput(where + ": the label set must be nonempty");
    if (std::set<std::string>(d.labels.begin(), d.labels.end()).size() != d.labels.size())
      throw InvalidInput(where + ": duplicate labels");
    if (d.action.size() != ng)
      throw InvalidInput(where + ": expected " + std::to_string(ng) + " generator images, got " +
                         std::to_string(d.action.size()));
    for (const auto& p : d.action)
      if (p.size() != d.labels.size()) throw InvalidInput(where + ": action image on the wrong set");
    ActionMap a{spec.group, d.labels, d.action};
    if (!a.is_homomorphism(caps.group_order))
      throw InvalidInput(where + ": action images do not satisfy the relations of the group");
    PermGroup img(d.labels, d.action);
    auto orbs = orbits(img);
    std::set<std::string> reps;
    for (const auto& [rep, g] : d.orbit_groups) {
      auto it = std::find(d.labels.begin(), d.labels.end(), rep);
      if (it == d.labels.end()) throw InvalidInput(where + ": orbit group keyed by unknown label '" + rep + "'");
      reps.insert(rep);
    }
    for (const auto& o : orbs) {
      std::size_t keys = 0;
      for (Index x : o) keys += reps.count(d.labels[x]);
      if (keys != 1)
        throw InvalidInput(where + ": orbit of '" + d.labels[o.front()] + "' needs exactly one orbit group, got " +
                           std::to_string(keys));
    }
  }
  enumerate_elements(spec.group, caps.group_order);
}

namespace {

struct PieceCache {
  std::map<std::pair<int, std::string>, MoorePiece> pieces;  // (degree, group string)
  const MoorePiece& get(int degree, const AbelianGroup& g, const RigidifyOptions& ro) {
    auto key = std::make_pair(degree, g.to_string());
    auto it = pieces.find(key);
    if (it == pieces.end())
      it = pieces.emplace(key, moore_piece({static_cast<std::size_t>(degree), g}, ro)).first;
    return it->second;
  }
};

// Summand group of each label (the group of its orbit).
std::vector<AbelianGroup> label_groups(const RealizationSpec& spec, const DegreeSpec& d) {
  PermGroup img(d.labels, d.action);
  std::vector<AbelianGroup> out(d.labels.size());
  for (const auto& o : orbits(img)) {
    AbelianGroup g;
    for (Index x : o)
      if (auto it = d.orbit_groups.find(d.labels[x]); it != d.orbit_groups.end()) g = it->second;
    for (Index x : o) out[x] = g;
  }
  (void)spec;
  return out;
}

}  // namespace

ModuleRealization realize_modules(const RealizationSpec& spec, const RealizeOptions& opts) {
  validate_spec(spec, opts.caps);
  Representation rho = combined_representation(spec);
  GroupTable t = tabulate(rho, opts.caps);

  PieceCache cache;
  std::size_t lmax = 0;
  bool zero_pieces = false;
  for (const auto& d : spec.degrees) {
    auto groups = label_groups(spec, d);
    for (const auto& g : groups) {
      lmax = std::max(lmax, height(cache.get(d.degree, g, opts.rigidify).poset));
      zero_pieces = zero_pieces || g.is_zero();
    }
  }
  const std::size_t ell = std::max<std::size_t>(5, lmax + 1);

  AcyclicParts a = build_acyclic(rho, t, ell, spec.family_index, opts);
  ModuleRealization m;
  m.layout.height_z = ell;
  Poset x = a.z;
  std::size_t vi = 0;
  for (const auto& d : spec.degrees) {
    auto groups = label_groups(spec, d);
    for (std::size_t l = 0; l < d.labels.size(); ++l, ++vi) {
      const MoorePiece& piece = cache.get(d.degree, groups[l], opts.rigidify);
      ModuleLayout::Summand s;
      s.degree = d.degree;
      s.label = d.labels[l];
      s.element = a.z.id(a.v_embedding[vi]);
      s.prefix = "y" + std::to_string(d.degree) + "." + d.labels[l] + "/";
      x = wedge(x, s.element, piece.poset, piece.anchor, {"", s.prefix}).poset;
      m.layout.summands.push_back(std::move(s));
    }
  }

  // Generators act on Z as constructed and carry Y_v onto Y_{gv} by name.
  std::unordered_map<std::string, std::size_t> summand_of;
  for (std::size_t s = 0; s < m.layout.summands.size(); ++s) summand_of.emplace(m.layout.summands[s].prefix, s);
  for (std::size_t k = 0; k < a.generator_images.size(); ++k) {
    std::vector<Index> img(x.size());
    for (Index e = 0; e < x.size(); ++e) {
      const std::string& id = x.id(e);
      if (e < a.z.size()) {
        img[e] = a.generator_images[k](e);
        continue;
      }
      const auto slash = id.find('/');
      const std::size_t s = summand_of.at(id.substr(0, slash + 1));
      const Index target_v = rho.images[k](static_cast<Index>(s));
      img[e] = x.index(m.layout.summands[target_v].prefix + id.substr(slash + 1));
    }
    m.layout.generator_images.emplace_back(std::move(img));
  }
  m.poset = std::move(x);
  m.report = verify_modules(m.poset, spec, m.layout, opts);
  if (zero_pieces) m.report.notes.push_back("some orbits carry the zero module; their pieces are acyclic");
  m.z.poset = std::move(a.z);
  m.z.v_embedding = std::move(a.v_embedding);
  m.z.generator_images = std::move(a.generator_images);
  m.z.graph = std::move(a.x1.graph);
  m.z.report = std::move(a.x1.report);
  return m;
}

RealizationReport verify_modules(const Poset& x, const RealizationSpec& spec, const ModuleLayout& layout,
                                 const RealizeOptions& opts) {
  validate_spec(spec, opts.caps);
  Representation rho = combined_representation(spec);
  GroupTable t = tabulate(rho, opts.caps);
  RealizationReport report;
  report.pipeline = "permutation module";
  Checker ck(report, opts.timing);

  // Recover the pieces from the layout.
  if (layout.summands.size() != rho.target.size())
    throw InvalidInput("layout lists " + std::to_string(layout.summands.size()) + " summands, spec has " +
                       std::to_string(rho.target.size()));
  PieceCache cache;
  std::vector<const MoorePiece*> piece_of;
  std::vector<Index> v_embedding;
  std::vector<std::vector<Index>> y_embedding;
  std::vector<char> in_y(x.size(), 0);
  {
    std::size_t vi = 0;
    for (const auto& d : spec.degrees) {
      auto groups = label_groups(spec, d);
      for (std::size_t l = 0; l < d.labels.size(); ++l, ++vi) {
        const auto& s = layout.summands[vi];
        if (s.degree != d.degree || s.label != d.labels[l])
          throw InvalidInput("layout summand " + std::to_string(vi) + " does not match the spec");
        const MoorePiece& piece = cache.get(d.degree, groups[l], opts.rigidify);
        piece_of.push_back(&piece);
        const Index v = x.index(s.element);
        v_embedding.push_back(v);
        std::vector<Index> emb(piece.poset.size());
        for (Index e = 0; e < piece.poset.size(); ++e) {
          if (piece.poset.id(e) == piece.anchor) {
            emb[e] = v;
          } else {
            emb[e] = x.index(s.prefix + piece.poset.id(e));
            in_y[emb[e]] = 1;
          }
        }
        y_embedding.push_back(std::move(emb));
      }
    }
  }
  std::vector<Index> z_elems;
  for (Index e = 0; e < x.size(); ++e)
    if (!in_y[e]) z_elems.push_back(e);
  const Poset z = induced_subposet(x, z_elems);
  std::vector<Index> v_in_z;
  {
    std::unordered_map<Index, Index> pos;
    for (Index i = 0; i < z_elems.size(); ++i) pos.emplace(z_elems[i], i);
    for (Index v : v_embedding) v_in_z.push_back(pos.at(v));
  }

  ck.run("X minimal", [&](Check& c) {
    auto beats = beat_points(x);
    c.detail = std::to_string(x.size()) + " elements, " + std::to_string(beats.size()) + " beat points";
    return beats.empty();
  });
  ck.run("X connected", [&](Check&) { return is_connected(x); });
  ck.run("pieces Y rigid with prescribed homology", [&](Check& c) {
    std::size_t lmax = 0;
    for (std::size_t s = 0; s < piece_of.size(); ++s) {
      const Poset& y = piece_of[s]->poset;
      lmax = std::max(lmax, height(y));
      if (!aut_poset(y).generators().empty() || !is_minimal_space(y)) return false;
    }
    c.detail = "maximum piece height " + std::to_string(lmax) + ", Z height " + std::to_string(layout.height_z);
    return lmax < layout.height_z;
  });
  z_clauses(ck, "Z: ", z, layout.height_z, v_in_z, opts);

  PosetHomology hx(x, {.simplex_budget = opts.caps.simplex_budget});
  ck.run("homology of X", [&](Check& c) {
    std::map<int, AbelianGroup> want;
    std::size_t vi = 0;
    for (const auto& d : spec.degrees) {
      auto groups = label_groups(spec, d);
      for (std::size_t l = 0; l < d.labels.size(); ++l, ++vi) want[d.degree] = want[d.degree] + groups[l];
    }
    bool ok = true;
    std::vector<std::string> parts;
    for (const auto& [deg, g] : hx.groups()) {
      const AbelianGroup w = want.count(deg) ? want.at(deg) : AbelianGroup{};
      parts.push_back("H~" + std::to_string(deg) + " = " + g.to_string());
      c.witnesses.emplace_back("H" + std::to_string(deg), g.to_string());
      if (!(g == w)) ok = false;
    }
    for (const auto& [deg, g] : want)
      if (!hx.groups().count(deg) && !g.is_zero()) ok = false;
    c.detail = join_strings(parts, ", ") + " (" + std::to_string(hx.simplex_count()) + " simplices, " +
               std::to_string(hx.critical_count()) + " critical cells)";
    return ok;
  });

  const PermGroup aut = aut_poset(x, {.max_vertices = opts.caps.poset_size});
  group_clauses(ck, "", rho, t, x.elements(), aut, layout.generator_images, v_embedding,
                [&](const Permutation& p) { return is_poset_automorphism(x, p); });

  ck.run("f(V) = V and f(Z) = Z for every automorphism generator", [&](Check& c) {
    std::vector<char> in_v(x.size(), 0);
    for (Index v : v_embedding) in_v[v] = 1;
    for (std::size_t k = 0; k < aut.generators().size(); ++k) {
      const auto& g = aut.generators()[k];
      for (Index e = 0; e < x.size(); ++e) {
        if (in_v[e] && !in_v[g(e)]) {
          c.detail = "generator " + std::to_string(k) + " moves " + x.id(e) + " out of V";
          return false;
        }
        if (!in_y[e] && in_y[g(e)]) {
          c.detail = "generator " + std::to_string(k) + " moves " + x.id(e) + " out of Z";
          return false;
        }
      }
    }
    c.detail = std::to_string(aut.generators().size()) + " generators checked";
    return true;
  });

  std::size_t offset = 0;
  for (const auto& d : spec.degrees) {
    ck.run("degree " + std::to_string(d.degree) + " summands permuted as prescribed", [&](Check& c) {
      std::vector<SummandInclusion> inc;
      std::vector<std::unique_ptr<PosetHomology>> hs;
      std::map<const MoorePiece*, PosetHomology*> by_piece;
      for (std::size_t l = 0; l < d.labels.size(); ++l) {
        const MoorePiece* p = piece_of[offset + l];
        if (!by_piece.count(p)) {
          hs.push_back(std::make_unique<PosetHomology>(p->poset));
          by_piece[p] = hs.back().get();
        }
        inc.push_back({d.labels[l], by_piece[p], y_embedding[offset + l]});
      }
      // Each automorphism generator permutes the glued points of this degree.
      std::vector<Permutation> images;
      std::unordered_map<Index, Index> pos;
      for (std::size_t l = 0; l < d.labels.size(); ++l) pos.emplace(v_embedding[offset + l], static_cast<Index>(l));
      for (const auto& g : aut.generators()) {
        std::vector<Index> img(d.labels.size());
        for (std::size_t l = 0; l < d.labels.size(); ++l) {
          auto it = pos.find(g(v_embedding[offset + l]));
          if (it == pos.end()) throw NotInvariant("an automorphism moves a glued point across degrees");
          img[l] = it->second;
        }
        images.emplace_back(std::move(img));
      }
      ActionMap action{aut, d.labels, images};
      SummandCheck sc = summand_action_check(hx, inc, action, d.degree);
      c.detail = sc.ok() ? "inclusions give an isomorphism; " + std::to_string(images.size()) +
                               " automorphism generators carry each summand onto its image"
                         : join_strings(sc.diagnostics, "; ");
      for (std::size_t k = 0; k < images.size(); ++k)
        c.witnesses.emplace_back("generator " + std::to_string(k) + " on summands", images[k].cycles(d.labels));
      return sc.ok();
    });
    offset += d.labels.size();
  }
  return report;
}

FamilyResult family(const RealizationSpec& spec, std::size_t count, const RealizeOptions& opts) {
  if (count < 2) throw InvalidInput("a family needs at least 2 members");
  FamilyResult f;
  f.report.pipeline = "family";
  Checker ck(f.report, opts.timing);
  for (std::size_t j = spec.family_index; j < spec.family_index + count; ++j) {
    RealizationSpec s = spec;
    s.family_index = j;
    f.members.push_back(realize_modules(s, opts));
    const auto& m = f.members.back();
    ck.run("member j=" + std::to_string(j) + " passes every check", [&](Check& c) {
      c.detail = std::to_string(m.poset.size()) + " elements";
      return m.report.all_passed();
    });
  }
  for (std::size_t a = 0; a < f.members.size(); ++a)
    for (std::size_t b = a + 1; b < f.members.size(); ++b)
      ck.run("members " + std::to_string(a + spec.family_index) + " and " + std::to_string(b + spec.family_index) +
                 " non-isomorphic",
             [&](Check& c) {
               const Poset& p = f.members[a].poset;
               const Poset& q = f.members[b].poset;
               if (p.size() != q.size() || p.cover_count() != q.cover_count()) {
                 c.detail = "sizes differ (" + std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                            " elements, " + std::to_string(p.cover_count()) + " vs " +
                            std::to_string(q.cover_count()) + " covers)";
                 return true;
               }
               c.detail = "isomorphism search";
               return !isomorphic(p, q, {.max_vertices = opts.caps.poset_size}).has_value();
             });
  return f;
}

}  // namespace alexrealize
