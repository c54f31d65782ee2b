#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "octcft/rational.hpp"

namespace octcft {

/// Sparse vector: index -> nonzero value. Zeros are never stored.
using SparseVector = std::map<std::size_t, Rational>;

void axpy(SparseVector& y, const Rational& a, const SparseVector& x);

struct Triplet {
  std::size_t row;
  std::size_t col;
  Rational value;
};

/// Column-major sparse matrix over the rationals.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), columns_(cols) {}

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const std::vector<std::vector<Rational>>& rows);
  /// Columns given as sparse vectors; every index must be < rows.
  static SparseMatrix from_columns(std::size_t rows, const std::vector<SparseVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  std::size_t nonzeros() const;

  Rational at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, const Rational& v);
  void add(std::size_t r, std::size_t c, const Rational& v);

  const SparseVector& column(std::size_t c) const { return columns_.at(c); }
  std::vector<Triplet> triplets() const;

  SparseMatrix transpose() const;
  SparseMatrix operator*(const SparseMatrix& rhs) const;
  SparseMatrix operator+(const SparseMatrix& rhs) const;
  SparseMatrix operator-(const SparseMatrix& rhs) const;
  SparseMatrix scaled(const Rational& s) const;
  SparseVector apply(const SparseVector& v) const;
  bool is_zero() const;

  /// Horizontal concatenation [this | rhs].
  SparseMatrix hconcat(const SparseMatrix& rhs) const;
  SparseMatrix select_columns(const std::vector<std::size_t>& idx) const;
  SparseMatrix select_rows(const std::vector<std::size_t>& idx) const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.columns_ == b.columns_;
  }

 private:
  void check(std::size_t r, std::size_t c) const;

  std::size_t rows_ = 0;
  std::vector<SparseVector> columns_;
};

struct SubspaceNotContained : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rank over Q.
std::size_t rank(const SparseMatrix& m);

/// Basis of the null space; each vector v satisfies m * v = 0 exactly.
std::vector<SparseVector> kernel_basis(const SparseMatrix& m);

/// dim span(big) - dim span(sub). Throws SubspaceNotContained when some
/// column of sub is outside span(big).
std::size_t quotient_dim(const SparseMatrix& big, const SparseMatrix& sub);

/// Some x with m * x = b, or nullopt when b is outside the column span.
std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b);

/// Indices of a maximal linearly independent subset of the columns, chosen
/// greedily left to right.
std::vector<std::size_t> independent_columns(const SparseMatrix& m);

}  // namespace octcft
