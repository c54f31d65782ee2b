#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "octcft/ainfty.hpp"
#include "octcft/chain_complex.hpp"

namespace octcft {

struct HigherMultiplication : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DualityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Which degrees of a length-truncated complex may differ from the full
/// one: degrees of words of the top bar length, plus every degree that a
/// word longer than the bound could occupy (a half-line, or everything when
/// letter contributions can cancel).
struct TruncationRule {
  std::set<int> marked;
  std::optional<int> at_or_above;
  std::optional<int> at_or_below;
  bool everything = false;

  Completeness at(int k) const;
  /// Completeness of homology in degree k (neighbours k-1, k+1 included).
  Completeness homology_at(int k) const;
  TruncationRule negated() const;
};

/// Bar-shifted degree |s a| = |a| + 1.
int bar_degree(const AInftyCategory& cat, const Letter& l);

/// b_k = s m_k (s^{-1})^{(x) k} on shifted basis letters:
/// b_k(sa_1, ..., sa_k) = (-1)^{sum_i (k-i)|sa_i|} s m_k(a_1, ..., a_k).
SparseVector bar_mult(const AInftyCategory& cat, const std::vector<Letter>& word);

/// A Hochschild chain phi_0 (x) ... (x) phi_n: a composable loop of basis
/// morphisms with a marked start. The bar length is n.
using HochschildWord = std::vector<Letter>;

/// Normalized (or full) Hochschild chain complex of a dg category, truncated
/// to bar length <= L. Words of bar length n live in degree
/// |phi_0| + sum_{i>=1} (|phi_i| + 1). The category is replaced by an
/// isomorphic one whose units are basis vectors; normalization drops words
/// with a unit letter at positions i >= 1.
class HochschildComplex {
 public:
  const AInftyCategory& category() const { return cat_; }
  int length_bound() const { return length_bound_; }
  bool normalized() const { return normalized_; }
  const ChainComplex& complex() const { return complex_; }
  const std::vector<HochschildWord>& words(int degree) const;
  std::optional<std::size_t> index_of(const HochschildWord& w) const;
  int degree_of(const HochschildWord& w) const;
  std::string label(const HochschildWord& w) const;
  const TruncationRule& truncation() const { return truncation_; }

 private:
  friend HochschildComplex build_hochschild_complex(const AInftyCategory&, int, bool);
  AInftyCategory cat_{{}};
  int length_bound_ = 0;
  bool normalized_ = true;
  ChainComplex complex_;
  std::map<int, std::vector<HochschildWord>> words_;
  std::map<HochschildWord, std::size_t> index_;
  TruncationRule truncation_;
};

/// Throws HigherMultiplication when m_n != 0 for some n >= 3.
HochschildComplex build_hochschild_complex(const AInftyCategory& cat, int L, bool normalized);
HochschildComplex build_normalized_complex(const AInftyCategory& cat, int L);

std::map<int, HomologyEntry> hh_dims(const AInftyCategory& cat, int L, int lo, int hi);

/// Connes' operator on normalized chains,
///   B(x_0 ... x_n) = sum_i (-1)^{(|x_0|+..+|x_{i-1}|)(|x_i|+..+|x_n|)} s1 x_i .. x_n x_0 .. x_{i-1}
/// in shifted degrees. maps[k] : C_k -> C_{k+1}; columns for words of bar
/// length L are left zero and their degrees are excluded from `exact`.
struct ConnesB {
  std::map<int, SparseMatrix> maps;
  std::set<int> exact;  // degrees on which every word has bar length < L
  SparseMatrix at(int k) const;
};

ConnesB connes_B(const HochschildComplex& cx);

enum class CochainModel { DualOfChains, Direct };

/// Hochschild cochains with coefficients in the diagonal bimodule. HH^k sits
/// in homological degree -k. The direct model has basis (path, output): a
/// normalized cochain f with f(s a_1, ..., s a_n) = output for one composable
/// path of n non-unit letters, of degree |output| - sum |s a_i|; its
/// differential is s^{-1} [b, s f]. Cochains of length > L are quotiented away.
struct CochainComplex {
  CochainModel model = CochainModel::Direct;
  AInftyCategory category{{}};
  int length_bound = 0;
  ChainComplex complex;
  TruncationRule truncation;
  std::map<int, std::vector<std::pair<HochschildWord, Letter>>> basis;  // direct model only
  std::map<std::pair<HochschildWord, Letter>, std::size_t> index;

  std::optional<std::size_t> index_of(const HochschildWord& path, const Letter& output) const;
  int degree_of(const HochschildWord& path, const Letter& output) const;
};

CochainComplex build_cochain_complex(const AInftyCategory& cat, int L, CochainModel model);

/// dim HH^k for lo <= k <= hi (read off homological degree -k).
std::map<int, HomologyEntry> hh_cohomology_dims(const CochainComplex& cc, int lo, int hi);

/// Chain-level cup product on the direct model:
///   (f u g)(x_1..x_{p+q}) = (-1)^{|g|(|x_1|+..+|x_p|)} m_2(f(x_1..x_p), g(x_{p+1}..x_{p+q})).
/// Arguments are coordinate vectors in degrees df, dg (homological).
SparseVector cup_cochains(const CochainComplex& cc, int df, const SparseVector& f, int dg, const SparseVector& g);

/// Multiplication table on HH^lo..HH^hi restricted to truncation-complete
/// degrees: products[{p, i, q, j}] = coordinates of [e^p_i u e^q_j] in the
/// chosen basis of HH^{p+q}.
struct CupTable {
  std::map<int, HomologyBasis> bases;  // keyed by k, basis of HH^k
  std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Rational>> products;
  std::optional<std::vector<Rational>> unit;  // coordinates of [1] in HH^0
};

CupTable cup_product(const CochainComplex& cc, int lo, int hi);

struct DualityEntry {
  int degree = 0;           // i
  std::size_t hh_dim = 0;   // dim HH_i
  std::size_t coh_dim = 0;  // dim HH^{d+i}
  bool complete = true;
  bool agree = true;
};

struct DualityReport {
  int dimension = 0;
  std::vector<DualityEntry> entries;
  bool ok = true;  // all complete entries agree
};

DualityReport duality_check(const CYStructure& cy, int L, int lo, int hi);

/// Pairing of a direct-model cochain with a chain,
///   <f, a_0 (x) x_1..x_n> = <f(x_1..x_n), a_0>,
/// nonzero only between chain degree i and cochain degree -d-i.
Rational chain_cochain_pairing(const CYStructure& cy, const CochainComplex& cc, int cochain_degree,
                               const SparseVector& f, const HochschildComplex& hc, int chain_degree,
                               const SparseVector& c);

/// Dual of the cup product through HH_i = (HH^{d+i})^dual. blocks[{i, j}]
/// maps HH_i to HH_j (x) HH_{i-d-j}; row u * dim HH_{i-d-j} + v.
struct CoproductTable {
  int dimension = 0;
  std::map<int, HomologyBasis> chain_bases;  // HH_i
  std::map<std::pair<int, int>, SparseMatrix> blocks;
};

CoproductTable coproduct(const CYStructure& cy, int L, int lo, int hi);

/// (Delta x 1) Delta = (1 x Delta) Delta on every HH_i -> HH_a (x) HH_b (x) HH_c
/// for which all four blocks are present, with the Koszul sign (-1)^{d a} of
/// moving Delta past the first factor. Also checks that every block has the
/// shape of a map of degree -d.
struct CoassociativityReport {
  bool ok = true;
  std::size_t compared = 0;
  std::size_t nonzero_blocks = 0;
  std::string failure;
};

CoassociativityReport coassociativity_check(const CoproductTable& t);

}  // namespace octcft
