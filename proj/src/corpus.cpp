#include "octcft/corpus.hpp"

#include <algorithm>

#include "json.hpp"

namespace octcft {

// Generated from corpus/*.json at configure time.
extern const std::vector<std::pair<std::string, std::string>> kCorpusSources;

AssocAlgebra total_algebra(const AlgebraSpec& spec) {
  for (const auto& e : spec.mults)
    if (e.inputs.size() != 2) throw std::invalid_argument("total_algebra: only m_2 may be nonzero");
  AssocAlgebra a;
  std::map<Letter, std::size_t> offset;
  for (const auto& [st, basis] : spec.homs)
    for (std::size_t i = 0; i < basis.size(); ++i) {
      offset[Letter{st.first, st.second, i}] = a.names.size();
      a.names.push_back(spec.objects[st.first] + ">" + spec.objects[st.second] + ":" + basis[i].name);
      a.degrees.push_back(basis[i].degree);
    }
  for (const auto& e : spec.mults) {
    const Letter out{e.inputs[0].source, e.inputs[1].target, e.output};
    auto& v = a.product[{offset.at(e.inputs[0]), offset.at(e.inputs[1])}];
    v[offset.at(out)] += e.coeff;
    if (v[offset.at(out)].is_zero()) v.erase(offset.at(out));
  }
  return a;
}

namespace {

using Word = std::vector<std::size_t>;

long weight_of(const AssocAlgebra& a, const Word& w) {
  long s = 0;
  for (auto i : w) s += a.degrees[i];
  return s;
}

// All words of a given length, grouped by weight, in lexicographic order.
std::map<long, std::vector<Word>> words_by_weight(const AssocAlgebra& a, std::size_t length) {
  std::map<long, std::vector<Word>> out;
  Word w(length, 0);
  while (true) {
    out[weight_of(a, w)].push_back(w);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++w[pos] < a.dim()) break;
      w[pos] = 0;
      if (pos == 0) return out;
    }
    if (length == 0) return out;
  }
}

SparseVector multiply(const AssocAlgebra& a, std::size_t i, std::size_t j) {
  auto it = a.product.find({i, j});
  return it == a.product.end() ? SparseVector{} : it->second;
}

// b : C_n(w) -> C_{n-1}(w); n >= 1.
SparseMatrix hochschild_b(const AssocAlgebra& a, const std::vector<Word>& src, const std::vector<Word>& dst) {
  std::map<Word, std::size_t> row;
  for (std::size_t r = 0; r < dst.size(); ++r) row[dst[r]] = r;
  SparseMatrix m(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    const Word& x = src[c];
    const std::size_t n = x.size() - 1;
    auto emit = [&](Word base, std::size_t slot, const SparseVector& prod, long sign) {
      for (const auto& [k, v] : prod) {
        base[slot] = k;
        m.add(row.at(base), c, sign > 0 ? v : -v);
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      Word base(x.begin(), x.begin() + i + 1);
      base.insert(base.end(), x.begin() + i + 2, x.end());
      emit(base, i, multiply(a, x[i], x[i + 1]), i % 2 == 0 ? 1 : -1);
    }
    long before = 0;
    for (std::size_t i = 0; i < n; ++i) before += a.degrees[x[i]];
    const long exp = static_cast<long>(n) + a.degrees[x[n]] * before;
    Word base(x.begin(), x.end() - 1);
    emit(base, 0, multiply(a, x[n], x[0]), exp % 2 == 0 ? 1 : -1);
  }
  return m;
}

}  // namespace

OracleResult brute_force_hochschild_oracle(const AssocAlgebra& a, int L) {
  if (a.dim() > 8) throw SizeExceeded("brute-force oracle: algebra dimension " + std::to_string(a.dim()) + " > 8");
  if (L > 6) throw SizeExceeded("brute-force oracle: length bound " + std::to_string(L) + " > 6");
  if (L < 1) throw std::invalid_argument("brute-force oracle: length bound must be at least 1");
  OracleResult res;
  res.length_bound = L;
  if (a.dim() == 0) return res;
  std::vector<std::map<long, std::vector<Word>>> words;
  for (int n = 0; n <= L; ++n) words.push_back(words_by_weight(a, static_cast<std::size_t>(n) + 1));

  // rank of b out of bar length n, per weight
  std::vector<std::map<long, std::size_t>> ranks(static_cast<std::size_t>(L) + 1);
  std::vector<std::map<long, SparseMatrix>> maps(static_cast<std::size_t>(L) + 1);
  for (int n = 1; n <= L; ++n)
    for (const auto& [w, src] : words[n]) {
      auto dst = words[n - 1].find(w);
      if (dst == words[n - 1].end()) continue;
      maps[n][w] = hochschild_b(a, src, dst->second);
      ranks[n][w] = rank(maps[n][w]);
      if (n >= 2 && maps[n - 1].count(w) && !(maps[n - 1].at(w) * maps[n][w]).is_zero())
        throw std::logic_error("brute-force oracle: b^2 != 0; the structure constants are not associative");
    }
  for (int n = 0; n < L; ++n)
    for (const auto& [w, basis] : words[n]) {
      std::size_t h = basis.size();
      if (auto it = ranks[n].find(w); it != ranks[n].end()) h -= it->second;
      if (auto it = ranks[n + 1].find(w); it != ranks[n + 1].end()) h -= it->second;
      if (h == 0) continue;
      res.bigraded[{n, static_cast<int>(w)}] = h;
      res.dims[n + static_cast<int>(w)] += h;
    }
  return res;
}

std::size_t commutator_quotient_dim(const AssocAlgebra& a) {
  std::vector<SparseVector> cols;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      SparseVector v = multiply(a, i, j);
      const bool odd = (static_cast<long>(a.degrees[i]) * a.degrees[j]) % 2 != 0;
      axpy(v, Rational(odd ? 1 : -1), multiply(a, j, i));
      cols.push_back(std::move(v));
    }
  return a.dim() - rank(SparseMatrix::from_columns(a.dim(), cols));
}

namespace {

std::vector<ExpectedValue> parse_expected(const std::string& name, const std::string& text) {
  std::vector<ExpectedValue> out;
  if (text.empty()) return out;
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_array()) throw std::logic_error("corpus " + name + ": \"expected\" must be an array");
  for (const auto& e : doc) {
    ExpectedValue v;
    v.check = e.at("check").get<std::string>();
    v.provenance = e.at("provenance").get<std::string>();
    v.oracle = e.at("oracle").get<std::string>();
    v.args_json = e.contains("args") ? e["args"].dump() : "{}";
    v.value_json = e.at("value").dump();
    if (v.provenance != "trivial" && v.provenance != "derived")
      throw std::logic_error("corpus " + name + ": provenance must be trivial or derived");
    if (v.oracle.empty()) throw std::logic_error("corpus " + name + ": every expected value names its oracle");
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

const std::vector<CorpusEntry>& list_corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    std::vector<CorpusEntry> out;
    for (const auto& [file, text] : kCorpusSources) {
      CorpusEntry e;
      e.source = text;
      e.spec = parse_algebra_spec(text);
      e.name = e.spec.name.empty() ? file : e.spec.name;
      e.expected = parse_expected(e.name, e.spec.expected_json);
      out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
    return out;
  }();
  return entries;
}

const CorpusEntry* find_corpus_entry(std::string_view name) {
  for (const auto& e : list_corpus())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace octcft
