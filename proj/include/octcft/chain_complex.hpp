#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octcft/sparse_matrix.hpp"

namespace octcft {

/// Finite-dimensional integer-graded vector space with named basis vectors.
class GradedSpace {
 public:
  /// Appends a basis vector; labels must be unique within a degree.
  std::size_t add(int degree, std::string label);

  std::size_t dim(int degree) const;
  const std::vector<std::string>& basis(int degree) const;
  std::optional<std::size_t> index_of(int degree, const std::string& label) const;
  /// Degrees with a nonzero component, ascending.
  std::vector<int> degrees() const;
  std::size_t total_dim() const;

 private:
  std::map<int, std::vector<std::string>> components_;
  std::map<int, std::map<std::string, std::size_t>> lookup_;
};

enum class Completeness { Complete, Truncated };

inline Completeness worst(Completeness a, Completeness b) {
  return (a == Completeness::Truncated || b == Completeness::Truncated) ? Completeness::Truncated
                                                                        : Completeness::Complete;
}

struct NotAComplex : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Homological chain complex: d_k maps degree k to degree k-1. Absent
/// differentials are zero; absent completeness flags mean Complete.
class ChainComplex {
 public:
  ChainComplex() = default;
  ChainComplex(GradedSpace space, std::map<int, SparseMatrix> differentials,
               std::map<int, Completeness> completeness = {});

  const GradedSpace& space() const { return space_; }
  std::size_t dim(int k) const { return space_.dim(k); }
  /// d_k : C_k -> C_{k-1}, a dim(k-1) x dim(k) matrix.
  SparseMatrix differential(int k) const;
  Completeness completeness(int k) const;
  const std::map<int, SparseMatrix>& differentials() const { return differentials_; }
  const std::map<int, Completeness>& completeness_flags() const { return completeness_; }

 private:
  GradedSpace space_;
  std::map<int, SparseMatrix> differentials_;
  std::map<int, Completeness> completeness_;
};

struct DSquaredReport {
  bool ok = true;
  int failing_degree = 0;  // k with d_{k-1} d_k != 0
  std::size_t row = 0, col = 0;
  Rational value;
};

DSquaredReport verify_d_squared(const ChainComplex& c);

struct HomologyEntry {
  std::size_t dim = 0;
  Completeness flag = Completeness::Complete;
  friend bool operator==(const HomologyEntry&, const HomologyEntry&) = default;
};

/// dim H_k for lo <= k <= hi. Throws NotAComplex when d^2 != 0 on [lo-1, hi+1].
std::map<int, HomologyEntry> homology_dims(const ChainComplex& c, int lo, int hi);

/// Linear dual: degree -k holds the dual basis of degree k, and the
/// differential out of degree -k is (-1)^{k(k+1)/2} d_{k+1}^T, which makes
/// dual_complex(dual_complex(c)) == c exactly.
ChainComplex dual_complex(const ChainComplex& c);

/// Chosen cycle representatives for a basis of H_k.
struct HomologyBasis {
  int degree = 0;
  std::size_t ambient_dim = 0;
  std::vector<SparseVector> representatives;
  SparseMatrix boundaries;  // columns span im d_{k+1}

  /// Coordinates of a cycle in the representative basis; nullopt when the
  /// vector is not a cycle modulo boundaries spanned here.
  std::optional<std::vector<Rational>> coordinates(const SparseVector& cycle) const;
};

HomologyBasis homology_basis(const ChainComplex& c, int k);

}  // namespace octcft
