#pragma once

// Realization pipelines: graphs, height-1 spaces and acyclic spaces with a
// prescribed automorphism group and action on a marked vertex set, and
// finite spaces whose homology is a prescribed permutation module.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "alexrealize/builders.hpp"
#include "alexrealize/graph.hpp"
#include "alexrealize/homology.hpp"
#include "alexrealize/poset.hpp"
#include "alexrealize/symmetry.hpp"

namespace alexrealize {

struct Caps {
  std::size_t group_order = 512;
  std::size_t poset_size = 200000;
  std::size_t graph_size = 2000;
  std::size_t simplex_budget = 2000000;
};

struct RealizeOptions {
  Caps caps;
  /// Gadget escalation levels tried before giving up.
  std::size_t max_escalation = 3;
  RigidifyOptions rigidify;
  /// Record wall-clock seconds per check.
  bool timing = false;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  /// Named witnesses: matrices, permutations, groups, rendered as text.
  std::vector<std::pair<std::string, std::string>> witnesses;
};

struct RealizationReport {
  std::string pipeline;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool all_passed() const;
  const Check* find(std::string_view name) const;
};

/// Replacement for a labelled arc tail -> head: the path tail - t - head
/// (tail - t - h - head when directed) with a pendant path of length
/// label + 1 + escalation at t. Internal vertices are "t", "h", "p<k>".
struct Gadget {
  SimpleGraph graph;
  Index tail = 0;
  Index head = 0;
};

Gadget arc_gadget(std::size_t label, bool directed, std::size_t escalation);

/// Homomorphism G -> Sym(V) together with the group: rho.source is G.
using Representation = ActionMap;

struct GraphRealization {
  SimpleGraph graph;
  SimpleGraph base;
  SimpleGraph prime;
  std::size_t escalation = 0;
  /// V label index -> graph vertex.
  std::vector<Index> v_embedding;
  /// Graph automorphism induced by each generator of G.
  std::vector<Permutation> generator_images;
  PermGroup aut;
  RealizationReport report;
};

/// Base graph on G and V with gadget-replaced labelled arcs, times the j-th
/// rigid prime that does not divide it. Throws VerificationFailure if no
/// escalation level passes every clause.
GraphRealization realize_graph(const Representation& rho, std::size_t j,
                               const RealizeOptions& opts = {});

struct SpaceRealization {
  Poset poset;
  std::vector<Index> v_embedding;
  std::vector<Permutation> generator_images;
  PermGroup aut;
  RealizationReport report;
  GraphRealization graph;
};

/// Incidence poset of realize_graph's output.
SpaceRealization realize_space_height1(const Representation& rho, std::size_t j,
                                       const RealizeOptions& opts = {});

/// X1 (*) W_k for even n = 2k+2, X1 (*) W~_k for odd n = 2k+1; n >= 5.
SpaceRealization realize_space_acyclic(const Representation& rho, std::size_t n, std::size_t j,
                                       const RealizeOptions& opts = {});

struct DegreeSpec {
  int degree = 1;
  std::vector<std::string> labels;
  /// Image of each generator of the group, over `labels`.
  std::vector<Permutation> action;
  /// Orbit representative -> summand group.
  std::map<std::string, AbelianGroup> orbit_groups;
};

struct RealizationSpec {
  PermGroup group;
  std::vector<DegreeSpec> degrees;
  std::size_t family_index = 1;
};

/// Throws InvalidInput naming the offending field.
void validate_spec(const RealizationSpec& spec, const Caps& caps);

/// Where the pieces of X sit; enough to re-run every check on X alone.
struct ModuleLayout {
  struct Summand {
    int degree = 0;
    std::string label;
    std::string element;  ///< the glued point v in X
    std::string prefix;   ///< ids of Y_v's other elements start with this
  };
  std::vector<Summand> summands;
  std::size_t height_z = 0;
  /// Automorphisms of X induced by the generators of G (image arrays over
  /// X's element order).
  std::vector<Permutation> generator_images;
};

struct ModuleRealization {
  Poset poset;
  ModuleLayout layout;
  RealizationReport report;
  SpaceRealization z;
};

ModuleRealization realize_modules(const RealizationSpec& spec, const RealizeOptions& opts = {});

/// Re-runs the verification of realize_modules on a stored poset and layout.
RealizationReport verify_modules(const Poset& x, const RealizationSpec& spec,
                                 const ModuleLayout& layout, const RealizeOptions& opts = {});

struct FamilyResult {
  std::vector<ModuleRealization> members;
  RealizationReport report;
};

/// Members for j = first .. first+count-1, checked pairwise non-isomorphic.
FamilyResult family(const RealizationSpec& spec, std::size_t count, const RealizeOptions& opts = {});

/// The direct sum of the per-degree actions over the disjoint union of the
/// label sets ("v<degree>.<label>").
Representation combined_representation(const RealizationSpec& spec);

}  // namespace alexrealize
