#pragma once

// Named finite spaces: L1, the rigid acyclic towers W_k and W~_k, sphere and
// cyclic Moore pieces, suspension, and symmetry-killing attachments.

#include <cstddef>
#include <string>

#include "alexrealize/homology.hpp"
#include "alexrealize/poset.hpp"

namespace alexrealize {

/// The 9-point weakly contractible, non-contractible space with automorphism
/// group Z/2. Elements n1..n9.
Poset build_L1();

/// W_1 = L1; W_k = W_{k-1} v L1, gluing a moved maximal point of the fresh
/// copy to a moved point at the bottom of a maximum chain. Elements are
/// "c<copy>.n<i>". Throws GateFailure if a check fails.
Poset build_Wk(std::size_t k);

/// W~_k = W_{k-1} v L1, glued at the second point of a maximum chain. k >= 2.
Poset build_Wk_tilde(std::size_t k);

/// (i+1)-fold join of two-point antichains: 2i+2 points, homology Z in
/// degree i.
Poset sphere_model(std::size_t i);

/// Face poset of a triangulated disk whose boundary 3m-gon wraps m times
/// around a triangle: homology Z/m in degree 1. m >= 2.
Poset moore_cyclic(std::size_t m);

/// Poset of simplices ordered by inclusion; ids join vertex names with '|'.
Poset face_poset(const SimplicialComplex& k);

/// P joined with a two-point antichain (fresh names north<k>, south<k>).
Poset suspend(const Poset& p);

/// Lexicographically least maximal point lying on a chain of maximum length.
std::string pick_anchor(const Poset& p);
/// Lexicographically least minimal point lying on a chain of maximum length.
std::string pick_base(const Poset& p);

/// Step-th symmetry-killing attachment: W~2, W~2^op, W2, W2^op, W~3, ...
Poset rigid_attachment(std::size_t step);

struct MoorePieceSpec {
  std::size_t degree = 1;
  AbelianGroup group;
};

struct MoorePiece {
  Poset poset;
  std::string anchor;
};

struct RigidifyOptions {
  std::size_t max_steps = 12;
};

/// Minimal rigid poset with reduced homology equal to spec.group in
/// spec.degree and zero elsewhere.
MoorePiece moore_piece(const MoorePieceSpec& spec, const RigidifyOptions& opts = {});

/// Wedges rigid acyclic attachments (see rigid_attachment) at points of
/// nontrivial orbits until the automorphism group is trivial. Homology and
/// minimality are re-checked after every attachment.
Poset rigidify(const Poset& p, const RigidifyOptions& opts = {});

}  // namespace alexrealize
