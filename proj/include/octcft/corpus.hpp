#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "octcft/algebra_spec.hpp"

namespace octcft {

struct SizeExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite-dimensional graded associative algebra given by a structure
/// constant table. No unit or differential is needed.
struct AssocAlgebra {
  std::vector<std::string> names;
  std::vector<int> degrees;
  std::map<std::pair<std::size_t, std::size_t>, SparseVector> product;  // e_i e_j

  std::size_t dim() const { return names.size(); }
};

/// Direct sum of all hom spaces of the document, with a.b = m_2(a, b) when
/// composable and 0 otherwise. Reads the document directly. Throws
/// std::invalid_argument when m_1 or higher products are present.
AssocAlgebra total_algebra(const AlgebraSpec& spec);

/// Homology of the un-normalized Hochschild complex C_n = A (x) A^{(x) n},
///   b(a_0 .. a_n) = sum_{i<n} (-1)^i a_0 .. a_i a_{i+1} .. a_n
///                   + (-1)^{n + |a_n|(|a_0|+..+|a_{n-1}|)} a_n a_0 a_1 .. a_{n-1},
/// split by bar length n and weight w = sum |a_i|. The total degree is
/// n + w. Bar lengths 0..L-1 are exact; `dims` sums them per total degree.
struct OracleResult {
  int length_bound = 0;
  std::map<std::pair<int, int>, std::size_t> bigraded;  // (n, w) -> dim
  std::map<int, std::size_t> dims;                      // n + w -> dim
};

/// Throws SizeExceeded when dim A > 8 or L > 6.
OracleResult brute_force_hochschild_oracle(const AssocAlgebra& a, int L);

/// dim A / [A, A] with graded commutators, as dim A minus a rank.
std::size_t commutator_quotient_dim(const AssocAlgebra& a);

/// One shipped value. provenance is "trivial" or "derived"; oracle names the
/// computation that reproduces it.
struct ExpectedValue {
  std::string check;
  std::string provenance;
  std::string oracle;
  std::string args_json;   // "{}" when the check takes no arguments
  std::string value_json;
};

struct CorpusEntry {
  std::string name;
  std::string source;  // the document text
  AlgebraSpec spec;
  std::vector<ExpectedValue> expected;
};

/// The shipped entries, sorted by name.
const std::vector<CorpusEntry>& list_corpus();
/// nullptr when no entry has this name.
const CorpusEntry* find_corpus_entry(std::string_view name);

}  // namespace octcft
