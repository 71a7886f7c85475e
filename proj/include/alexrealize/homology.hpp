#pragma once

// Integral reduced homology of order complexes, with explicit cycle bases so
// that maps between posets can be pushed to homology.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alexrealize/poset.hpp"
#include "alexrealize/symmetry.hpp"

namespace alexrealize {

/// Finitely generated abelian group Z^rank + Z/d1 + ... with d1 | d2 | ...
class AbelianGroup {
 public:
  AbelianGroup() = default;
  /// Torsion coefficients may be given in any order and need not form a
  /// divisor chain; ones are dropped. Zero or negative entries are rejected.
  AbelianGroup(std::size_t rank, const std::vector<std::int64_t>& torsion);

  std::size_t rank() const noexcept { return rank_; }
  const std::vector<std::int64_t>& torsion() const noexcept { return torsion_; }
  bool is_zero() const noexcept { return rank_ == 0 && torsion_.empty(); }
  /// Number of cyclic summands in normal form.
  std::size_t generator_count() const noexcept { return rank_ + torsion_.size(); }

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
  friend AbelianGroup operator+(const AbelianGroup& a, const AbelianGroup& b);
  AbelianGroup power(std::size_t copies) const;

  /// "0", "Z", "Z^2 + Z/3", ...
  std::string to_string() const;

 private:
  std::size_t rank_ = 0;
  std::vector<std::int64_t> torsion_;
};

/// Dense integer matrix, row-major.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<mpz_class> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  static IntMatrix identity(std::size_t n);
  mpz_class& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b);
};

struct SmithForm {
  IntMatrix U, D, V;       ///< D = U * M * V
  IntMatrix U_inv, V_inv;  ///< inverses of U and V
  std::size_t rank = 0;    ///< number of nonzero diagonal entries
};

/// Smith normal form with unimodular transforms; the diagonal is a
/// nonnegative divisor chain.
SmithForm smith_normal_form(const IntMatrix& m);

struct SparseEntry {
  std::uint32_t row;
  std::uint32_t col;
  std::int64_t value;
};

/// Nonzero invariant factors of a sparse matrix (elimination with
/// smallest-magnitude, then sparsest, pivots). Unsorted diagonal; callers
/// normalize through AbelianGroup.
std::vector<mpz_class> sparse_elimination_diagonal(std::size_t rows, std::size_t cols,
                                                   std::vector<SparseEntry> entries);

/// Simplicial complex given by its facets.
struct SimplicialComplex {
  std::vector<std::string> vertices;
  std::vector<std::vector<Index>> facets;  ///< sorted vertex lists
};

/// Throws InvalidInput unless facets are sorted, pairwise non-contained and
/// cover every vertex.
void validate_complex(const SimplicialComplex& k);
std::size_t dimension(const SimplicialComplex& k);

/// Vertices are the elements; facets are the maximal chains.
SimplicialComplex order_complex(const Poset& p);

/// Signed chain in the order complex: (cell id, coefficient), sorted by id.
using SparseChain = std::vector<std::pair<std::uint32_t, std::int64_t>>;

struct HomologyOptions {
  std::size_t simplex_budget = 2000000;
  /// Reduce by a coreduction Morse matching before elimination.
  bool morse = true;
};

struct HomologyBasis {
  int degree = 0;
  AbelianGroup group;
  /// Order of each generator (0 = infinite); torsion generators come first.
  std::vector<std::int64_t> orders;
  /// Cycle representatives, one per generator.
  std::vector<SparseChain> cycles;
};

/// Reduced homology of the order complex of a poset, with cycle bases and a
/// coordinate map for arbitrary cycles.
class PosetHomology {
 public:
  explicit PosetHomology(const Poset& p, const HomologyOptions& opts = {});
  ~PosetHomology();
  PosetHomology(PosetHomology&&) noexcept;
  PosetHomology& operator=(PosetHomology&&) noexcept;

  const Poset& poset() const;
  /// Dimension of the order complex (height of the poset).
  int dimension() const;
  /// Nonempty simplices.
  std::size_t simplex_count() const;
  std::size_t critical_count() const;
  std::size_t simplex_count(int dim) const;

  /// H~_d for d = 0..dimension().
  const std::map<int, AbelianGroup>& groups() const;
  AbelianGroup group(int d) const;

  const HomologyBasis& basis(int d);
  /// Coordinates of a cycle of dimension d in basis(d), torsion coordinates
  /// reduced into [0, order).
  std::vector<mpz_class> coordinates(int d, const SparseChain& cycle);

  /// Cell id of a chain given bottom to top, if it is a simplex.
  std::optional<std::uint32_t> cell(std::span<const Index> chain) const;
  std::span<const Index> cell_vertices(std::uint32_t id) const;
  int cell_dimension(std::uint32_t id) const;
  SparseChain boundary(const SparseChain& c) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::map<int, AbelianGroup> reduced_homology(const Poset& p, const HomologyOptions& opts = {});

/// True iff all reduced homology groups vanish.
bool is_acyclic(const Poset& p, const HomologyOptions& opts = {});

/// Matrix of a map on homology: column j is the image of source generator j
/// in target coordinates.
struct InducedMatrix {
  int degree = 0;
  std::vector<std::int64_t> source_orders;
  std::vector<std::int64_t> target_orders;
  std::vector<std::vector<mpz_class>> columns;
};

/// Throws InvalidInput if `f` (source index -> target index) is not order
/// preserving.
InducedMatrix induced_map(std::span<const Index> f, int degree, PosetHomology& source,
                          PosetHomology& target);

/// Entrywise equality modulo the order of the target generator.
bool induced_equal(const InducedMatrix& a, const InducedMatrix& b);

/// One summand Y_v embedded in X.
struct SummandInclusion {
  std::string label;
  PosetHomology* piece = nullptr;
  std::vector<Index> embedding;  ///< Y index -> X index
};

struct SummandCheck {
  bool isomorphism = false;
  bool action = false;
  bool ok() const { return isomorphism && action; }
  std::vector<std::string> diagnostics;
};

/// (a) the inclusions assemble to an isomorphism onto H~_degree(X);
/// (b) g_* (i_v)_* = (i_{g v})_* for every generator g of `action.source`
/// (permutations of X's elements), where g v is read off `action.images`
/// over the summand labels.
SummandCheck summand_action_check(PosetHomology& x, std::span<const SummandInclusion> summands,
                                  const ActionMap& action, int degree);

}  // namespace alexrealize
