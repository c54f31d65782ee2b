#include "octcft/sparse_matrix.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace octcft {

void axpy(SparseVector& y, const Rational& a, const SparseVector& x) {
  if (a.is_zero()) return;
  for (const auto& [i, v] : x) {
    auto it = y.find(i);
    if (it == y.end()) {
      y.emplace(i, a * v);
    } else {
      it->second += a * v;
      if (it->second.is_zero()) y.erase(it);
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.columns_[i].emplace(i, Rational(1));
  return m;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<Rational>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows.front().size();
  SparseMatrix m(rows.size(), nc);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != nc) throw std::invalid_argument("ragged dense matrix");
    for (std::size_t c = 0; c < nc; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

SparseMatrix SparseMatrix::from_columns(std::size_t rows, const std::vector<SparseVector>& cols) {
  SparseMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (const auto& [r, v] : cols[c]) m.set(r, c, v);
  return m;
}

void SparseMatrix::check(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= columns_.size())
    throw std::out_of_range("matrix index (" + std::to_string(r) + "," + std::to_string(c) +
                            ") outside " + std::to_string(rows_) + "x" +
                            std::to_string(columns_.size()));
}

std::size_t SparseMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.size();
  return n;
}

Rational SparseMatrix::at(std::size_t r, std::size_t c) const {
  check(r, c);
  auto it = columns_[c].find(r);
  return it == columns_[c].end() ? Rational(0) : it->second;
}

void SparseMatrix::set(std::size_t r, std::size_t c, const Rational& v) {
  check(r, c);
  if (v.is_zero())
    columns_[c].erase(r);
  else
    columns_[c][r] = v;
}

void SparseMatrix::add(std::size_t r, std::size_t c, const Rational& v) {
  check(r, c);
  if (v.is_zero()) return;
  auto& col = columns_[c];
  auto it = col.find(r);
  if (it == col.end()) {
    col.emplace(r, v);
  } else {
    it->second += v;
    if (it->second.is_zero()) col.erase(it);
  }
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t c = 0; c < columns_.size(); ++c)
    for (const auto& [r, v] : columns_[c]) out.push_back({r, c, v});
  std::sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols(), rows_);
  for (std::size_t c = 0; c < columns_.size(); ++c)
    for (const auto& [r, v] : columns_[c]) t.columns_[r].emplace(c, v);
  return t;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& rhs) const {
  if (cols() != rhs.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  SparseMatrix out(rows_, rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c)
    for (const auto& [k, v] : rhs.columns_[c]) axpy(out.columns_[c], v, columns_[k]);
  return out;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols() != rhs.cols())
    throw std::invalid_argument("matrix sum: dimension mismatch");
  SparseMatrix out = *this;
  for (std::size_t c = 0; c < cols(); ++c) axpy(out.columns_[c], Rational(1), rhs.columns_[c]);
  return out;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& rhs) const { return *this + rhs.scaled(-1); }

SparseMatrix SparseMatrix::scaled(const Rational& s) const {
  SparseMatrix out(rows_, cols());
  if (s.is_zero()) return out;
  for (std::size_t c = 0; c < cols(); ++c)
    for (const auto& [r, v] : columns_[c]) out.columns_[c].emplace(r, v * s);
  return out;
}

SparseVector SparseMatrix::apply(const SparseVector& v) const {
  SparseVector out;
  for (const auto& [c, x] : v) {
    if (c >= cols()) throw std::out_of_range("vector index outside matrix columns");
    axpy(out, x, columns_[c]);
  }
  return out;
}

bool SparseMatrix::is_zero() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const auto& c) { return c.empty(); });
}

SparseMatrix SparseMatrix::hconcat(const SparseMatrix& rhs) const {
  if (rows_ != rhs.rows_) throw std::invalid_argument("hconcat: row mismatch");
  SparseMatrix out = *this;
  out.columns_.insert(out.columns_.end(), rhs.columns_.begin(), rhs.columns_.end());
  return out;
}

SparseMatrix SparseMatrix::select_columns(const std::vector<std::size_t>& idx) const {
  SparseMatrix out(rows_, idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out.columns_[i] = columns_.at(idx[i]);
  return out;
}

SparseMatrix SparseMatrix::select_rows(const std::vector<std::size_t>& idx) const {
  std::map<std::size_t, std::size_t> where;
  for (std::size_t i = 0; i < idx.size(); ++i) where[idx[i]] = i;
  SparseMatrix out(idx.size(), cols());
  for (std::size_t c = 0; c < cols(); ++c)
    for (const auto& [r, v] : columns_[c]) {
      auto it = where.find(r);
      if (it != where.end()) out.columns_[c].emplace(it->second, v);
    }
  return out;
}

namespace {

// Gauss-Jordan elimination on a row-sparse matrix with Markowitz-style pivot
// choice: the active row with fewest nonzeros, and within it the column with
// the fewest occupied rows. Only columns < pivot_limit may be pivots.
struct GaussJordan {
  std::vector<SparseVector> rows;
  std::vector<std::set<std::size_t>> col_rows;
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
  std::size_t pivot_limit;

  GaussJordan(std::vector<SparseVector> r, std::size_t ncols, std::size_t limit)
      : rows(std::move(r)), col_rows(ncols), pivot_limit(limit) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& [c, v] : rows[i]) col_rows[c].insert(i);
  }

  static std::size_t pivotable_count(const SparseVector& row, std::size_t limit) {
    return static_cast<std::size_t>(
        std::distance(row.begin(), row.lower_bound(limit)));
  }

  void subtract(std::size_t target, const Rational& f, std::size_t source) {
    auto& y = rows[target];
    for (const auto& [c, v] : rows[source]) {
      auto it = y.find(c);
      if (it == y.end()) {
        y.emplace(c, -(f * v));
        col_rows[c].insert(target);
      } else {
        it->second -= f * v;
        if (it->second.is_zero()) {
          y.erase(it);
          col_rows[c].erase(target);
        }
      }
    }
  }

  void run() {
    std::set<std::pair<std::size_t, std::size_t>> active;
    std::vector<std::size_t> key(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      key[i] = pivotable_count(rows[i], pivot_limit);
      if (key[i] > 0) active.insert({key[i], i});
    }
    while (!active.empty()) {
      auto [cnt, r] = *active.begin();
      active.erase(active.begin());
      std::size_t best_col = 0, best_fill = SIZE_MAX;
      for (auto it = rows[r].begin(); it != rows[r].end() && it->first < pivot_limit; ++it) {
        std::size_t fill = col_rows[it->first].size();
        if (fill < best_fill) {
          best_fill = fill;
          best_col = it->first;
        }
      }
      Rational inv = Rational(1) / rows[r].at(best_col);
      for (auto& [c, v] : rows[r]) v *= inv;
      std::vector<std::size_t> others(col_rows[best_col].begin(), col_rows[best_col].end());
      for (std::size_t o : others) {
        if (o == r) continue;
        Rational f = rows[o].at(best_col);
        bool was_active = active.erase({key[o], o}) > 0;
        subtract(o, f, r);
        key[o] = pivotable_count(rows[o], pivot_limit);
        if (was_active && key[o] > 0) active.insert({key[o], o});
      }
      pivots.emplace_back(r, best_col);
    }
  }
};

std::vector<SparseVector> to_rows(const SparseMatrix& m) {
  std::vector<SparseVector> rows(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& [r, v] : m.column(c)) rows[r].emplace(c, v);
  return rows;
}

}  // namespace

std::size_t rank(const SparseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  GaussJordan gj(to_rows(m), m.cols(), m.cols());
  gj.run();
  return gj.pivots.size();
}

std::vector<SparseVector> kernel_basis(const SparseMatrix& m) {
  GaussJordan gj(to_rows(m), m.cols(), m.cols());
  gj.run();
  std::vector<bool> is_pivot(m.cols(), false);
  for (const auto& p : gj.pivots) is_pivot[p.second] = true;
  std::vector<SparseVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    SparseVector v;
    v.emplace(f, Rational(1));
    for (const auto& [r, c] : gj.pivots) {
      auto it = gj.rows[r].find(f);
      if (it != gj.rows[r].end()) v.emplace(c, -it->second);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t quotient_dim(const SparseMatrix& big, const SparseMatrix& sub) {
  if (big.rows() != sub.rows()) throw std::invalid_argument("quotient_dim: row mismatch");
  std::size_t rb = rank(big);
  if (rank(big.hconcat(sub)) != rb)
    throw SubspaceNotContained("quotient_dim: sub is not contained in span(big)");
  return rb - rank(sub);
}

std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b) {
  auto rows = to_rows(m);
  const std::size_t aug = m.cols();
  for (const auto& [r, v] : b) {
    if (r >= m.rows()) throw std::out_of_range("solve: rhs index outside rows");
    rows[r].emplace(aug, v);
  }
  GaussJordan gj(std::move(rows), aug + 1, aug);
  gj.run();
  std::vector<bool> pivot_row(gj.rows.size(), false);
  for (const auto& p : gj.pivots) pivot_row[p.first] = true;
  for (std::size_t r = 0; r < gj.rows.size(); ++r)
    if (!pivot_row[r] && gj.rows[r].count(aug)) return std::nullopt;
  SparseVector x;
  for (const auto& [r, c] : gj.pivots) {
    auto it = gj.rows[r].find(aug);
    if (it != gj.rows[r].end()) x.emplace(c, it->second);
  }
  return x;
}

std::vector<std::size_t> independent_columns(const SparseMatrix& m) {
  // Incremental echelon basis keyed by leading (smallest) row index.
  std::map<std::size_t, SparseVector> basis;
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    SparseVector v = m.column(c);
    while (!v.empty()) {
      auto lead = v.begin()->first;
      auto it = basis.find(lead);
      if (it == basis.end()) break;
      axpy(v, -(v.begin()->second / it->second.begin()->second), it->second);
    }
    if (!v.empty()) {
      basis.emplace(v.begin()->first, std::move(v));
      chosen.push_back(c);
    }
  }
  return chosen;
}

}  // namespace octcft
