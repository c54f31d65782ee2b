#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octcft/chain_complex.hpp"
#include "octcft/hochschild.hpp"
#include "octcft/surfcat.hpp"

namespace octcft {

struct ComparisonUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Annulus A(l_0, ..., l_{n-1}) with module letters phi_i in Hom(l_{i-1}, l_i)
/// attached at its points. l_i is the target of phi_i.
struct TensorGenerator {
  std::vector<ObjectId> labels;
  std::vector<Letter> letters;
  friend auto operator<=>(const TensorGenerator&, const TensorGenerator&) = default;
};

/// Which part of the annulus boundary a differential entry comes from.
enum class TermFamily { Inner, Wrap, Internal };
std::string family_name(TermFamily f);

/// D+(-, 1) (x) B over the open D+ category, truncated to annuli with at most
/// L + 1 points. Identity letters away from the basepoint are quotiented
/// out (a unit disc glued there is zero). The differential is the surface
/// boundary of the annulus acted on the letters, plus (-1)^{|A|} A (x) d phi.
class BimoduleTensorComplex {
 public:
  const AInftyCategory& category() const { return cat_; }
  int length_bound() const { return length_bound_; }
  const ChainComplex& complex() const { return complex_; }
  const std::vector<TensorGenerator>& generators(int degree) const;
  std::optional<std::size_t> index_of(const TensorGenerator& g) const;
  int degree_of(const TensorGenerator& g) const;
  std::string label(const TensorGenerator& g) const;
  /// Differential split by the boundary term that produced each entry; the
  /// parts add up to complex().differential(k).
  SparseMatrix part(TermFamily f, int k) const;

 private:
  friend BimoduleTensorComplex build_tensor_complex(const AInftyCategory&, int, const SignFault&);
  AInftyCategory cat_{{}};
  int length_bound_ = 0;
  ChainComplex complex_;
  std::map<int, std::vector<TensorGenerator>> gens_;
  std::map<TensorGenerator, std::size_t> index_;
  std::map<std::pair<TermFamily, int>, SparseMatrix> parts_;
};

/// Works on the unit-adapted basis of B (the one Hochschild chains use).
/// Higher products are allowed; only the comparison needs a dg category.
BimoduleTensorComplex build_tensor_complex(const AInftyCategory& B, int L, const SignFault& fault = {});

/// Sign of the basis bijection A(l) (x) phi_0 .. phi_{n-1} -> phi_0 (x) s phi_1 .. s phi_{n-1}:
/// moving the n - 1 suspensions of the annulus into place,
/// (-1)^{sum_i (n-1-i)|phi_i|}.
int bijection_sign(const AInftyCategory& cat, const std::vector<Letter>& letters);

struct DegreeComparison {
  int degree = 0;
  std::size_t tensor_dim = 0, hochschild_dim = 0;
  bool bijective = true;
  bool differential_agrees = true;
  Completeness flag = Completeness::Complete;
  std::size_t mismatched_entries = 0;
  /// Term families present at every mismatched entry.
  std::vector<TermFamily> suspects;
};

struct ComparisonReport {
  bool ok = true;
  int length_bound = 0;
  std::vector<DegreeComparison> degrees;
  std::string first_mismatch;
};

/// Matches the two complexes generator by generator (same degree, same
/// word) and checks S d_tensor = d_hochschild S exactly, S being the signed
/// bijection. Needs m_n = 0 for n >= 3.
ComparisonReport compare_with_hochschild(const BimoduleTensorComplex& tc, const HochschildComplex& hc);
ComparisonReport compare_with_hochschild(const AInftyCategory& B, int L, const SignFault& fault = {});

/// Sweeping the free basepoint once around the closed boundary: sum over
/// positions i of (-1)^{i(n-1)} times the Koszul sign of the rotation,
/// A(l_{i-1}, l_i, .., l_{i-1}) (x) (1, phi_i, .., phi_{i-1}). maps[k] is
/// C_k -> C_{k+1}; generators with L + 1 points map to zero and their
/// degrees are left out of `exact`.
ConnesB b_operator_via_annuli(const BimoduleTensorComplex& tc);

struct BOperatorReport {
  bool ok = true;
  std::vector<int> compared_degrees;
  std::vector<int> mismatched_degrees;
  bool squares_to_zero = true;
  bool anticommutes = true;  // B d + d B = 0 on exact degrees
};

/// Transports the annulus operator through the bijection and compares it
/// with connes_B as matrices. Throws ComparisonUnavailable when the
/// complexes themselves disagree.
BOperatorReport compare_b_operator(const AInftyCategory& B, int L, const SignFault& fault = {});

/// Arity filtration F^n (annuli with at most n points): the differential
/// never raises arity, the graded pieces add up to the whole complex, and
/// on gr^n only the internal differential survives.
struct FiltrationReport {
  bool ok = true;
  std::map<std::size_t, std::map<int, std::size_t>> graded_dims;  // arity -> degree -> dim
  std::string failure;
};

FiltrationReport filtration_check(const BimoduleTensorComplex& tc);

}  // namespace octcft
