#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "octcft/sparse_matrix.hpp"

namespace octcft {

using ObjectId = std::size_t;

struct BasisElement {
  std::string name;
  int degree = 0;
};

struct HomSpace {
  std::vector<BasisElement> basis;
  std::size_t dim() const { return basis.size(); }
};

/// A basis morphism: element `index` of Hom(source, target).
struct Letter {
  ObjectId source = 0;
  ObjectId target = 0;
  std::size_t index = 0;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

/// A morphism as a linear combination of basis elements of one hom space.
struct HomElement {
  ObjectId source = 0;
  ObjectId target = 0;
  SparseVector coords;
};

struct ArityTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidStructure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAssociative : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LeibnizFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneratePairing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Outcome of a validator: ok plus human-readable descriptions of the first
/// few violations (all violations are counted).
struct CheckReport {
  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  std::string name;
  bool ok = true;
  std::size_t violation_count = 0;
  std::vector<std::string> details;

  void fail(std::string what);
};

inline constexpr int kDefaultMaxArity = 6;

/// Finite-dimensional A-infinity category with homological grading: m_n has
/// degree n-2 and m_n(a_0, ..., a_{n-1}) takes a_i in Hom(A_i, A_{i+1}) to
/// Hom(A_0, A_n). Structure constants are stored sparsely per input word.
class AInftyCategory {
 public:
  explicit AInftyCategory(std::vector<std::string> objects, int max_arity = kDefaultMaxArity);

  std::size_t object_count() const { return objects_.size(); }
  const std::string& object_name(ObjectId a) const { return objects_.at(a); }
  const std::vector<std::string>& objects() const { return objects_; }
  int max_arity() const { return max_arity_; }

  void set_hom(ObjectId a, ObjectId b, std::vector<BasisElement> basis);
  const HomSpace& hom(ObjectId a, ObjectId b) const;
  int degree(const Letter& l) const { return hom(l.source, l.target).basis.at(l.index).degree; }
  std::string letter_name(const Letter& l) const { return hom(l.source, l.target).basis.at(l.index).name; }

  void set_unit(ObjectId a, SparseVector unit);
  bool has_unit(ObjectId a) const { return units_.count(a) > 0; }
  const SparseVector& unit(ObjectId a) const;

  /// Adds coeff * (output basis element) to m_n(inputs), n = inputs.size().
  /// Inputs must be composable; the term must have degree n-2.
  void add_mult(const std::vector<Letter>& inputs, std::size_t output, const Rational& coeff);

  /// m_n on basis letters (empty when zero).
  SparseVector mult(const std::vector<Letter>& inputs) const;
  /// Multilinear extension of m_n; arguments must be composable.
  HomElement mult(const std::vector<HomElement>& args) const;

  /// Arities with at least one nonzero structure constant.
  std::vector<int> nonzero_arities() const;
  bool has_arity(int n) const;
  const std::map<std::vector<Letter>, SparseVector>& table(int n) const;

  /// All composable words of n basis letters.
  std::vector<std::vector<Letter>> composable_words(int n) const;

  /// Change of basis making every unit a basis vector: the first basis
  /// vector in the support of the unit is replaced by the unit itself and
  /// renamed "1_<obj>". Empty when all units are already basis vectors.
  struct BasisChange {
    std::map<std::pair<ObjectId, ObjectId>, SparseMatrix> T;
    std::map<std::pair<ObjectId, ObjectId>, std::vector<BasisElement>> basis;
  };
  BasisChange unit_basis_change() const;
  AInftyCategory with_unit_basis() const;
  /// Index of the unit in Hom(a,a) when it is a basis vector.
  std::optional<std::size_t> unit_index(ObjectId a) const;

  /// Applies per-hom-space changes of basis: columns of T are the new basis
  /// vectors in old coordinates. Hom spaces without an entry are unchanged.
  AInftyCategory change_basis(const std::map<std::pair<ObjectId, ObjectId>, SparseMatrix>& T,
                              const std::map<std::pair<ObjectId, ObjectId>, std::vector<BasisElement>>&
                                  new_basis) const;

 private:
  std::vector<std::string> objects_;
  int max_arity_;
  std::map<std::pair<ObjectId, ObjectId>, HomSpace> homs_;
  std::map<ObjectId, SparseVector> units_;
  std::map<int, std::map<std::vector<Letter>, SparseVector>> mults_;
};

/// Checks the quadratic A-infinity relations with Koszul signs
///   sum_{r+s+t=N} (-1)^{r + st + s(|a_0|+...+|a_{r-1}|)} m_{r+1+t}(a_0..a_{r-1}, m_s(a_r..), ..) = 0
/// on every composable basis word of total arity N <= up_to_arity.
CheckReport check_ainfty_relations(const AInftyCategory& cat, int up_to_arity);

/// Unit axioms: degree 0, closed, two-sided identity for m_2, and absorbing
/// (zero) in every slot of m_n for n >= 3.
CheckReport check_units(const AInftyCategory& cat);

/// Calabi-Yau structure of dimension d: a pairing Hom(a,b) x Hom(b,a) -> K
/// for every ordered pair, stored as a dim Hom(a,b) x dim Hom(b,a) matrix.
class CYStructure {
 public:
  CYStructure(std::shared_ptr<const AInftyCategory> base, int dimension);

  const AInftyCategory& base() const { return *base_; }
  std::shared_ptr<const AInftyCategory> base_ptr() const { return base_; }
  int dimension() const { return dimension_; }

  void set_pairing(ObjectId a, ObjectId b, std::size_t left, std::size_t right, const Rational& v);
  const SparseMatrix& pairing_matrix(ObjectId a, ObjectId b) const;
  Rational pair(const HomElement& x, const HomElement& y) const;

  /// Same pairing expressed over a different (isomorphic) base category;
  /// T maps new basis vectors to old coordinates as in change_basis.
  CYStructure rebased(std::shared_ptr<const AInftyCategory> new_base,
                      const std::map<std::pair<ObjectId, ObjectId>, SparseMatrix>& T) const;
  CYStructure scaled(const Rational& s) const;

 private:
  std::shared_ptr<const AInftyCategory> base_;
  int dimension_;
  std::map<std::pair<ObjectId, ObjectId>, SparseMatrix> pairings_;
};

/// For every (a,b) and degree i, the block Hom_i(a,b) x Hom_{-d-i}(b,a) is
/// square and invertible, and no pairing entry links other degrees.
CheckReport check_nondegenerate(const CYStructure& cy);

/// Graded symmetry of the pairing plus the cyclic identity
///   <m_k(a_0..a_{k-1}), a_k> = (-1)^{(k+2) + |a_0|(|a_1|+..+|a_k|)} <m_k(a_1..a_k), a_0>
/// for k <= up_to_arity. Throws DegeneratePairing when nondegeneracy fails.
CheckReport check_cyclic(const CYStructure& cy, int up_to_arity);

struct MultEntry {
  std::vector<Letter> inputs;
  std::size_t output = 0;
  Rational coeff;
};

struct DgCategorySpec {
  std::vector<std::string> objects;
  std::map<std::pair<ObjectId, ObjectId>, std::vector<BasisElement>> homs;
  std::map<ObjectId, SparseVector> units;
  std::vector<MultEntry> composition;   // m_2
  std::vector<MultEntry> differential;  // m_1
};

/// Builds the A-infinity category with m_1 = differential, m_2 = composition
/// and no higher products, after checking d^2 = 0, associativity and the
/// Leibniz rule d(ab) = (da)b + (-1)^{|a|} a(db).
AInftyCategory from_dg_category(const DgCategorySpec& dg);

}  // namespace octcft
