#include "octcft/tcftops.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace octcft {

std::string family_name(TermFamily f) {
  switch (f) {
    case TermFamily::Inner: return "inner";
    case TermFamily::Wrap: return "wrap-around";
    case TermFamily::Internal: return "internal";
  }
  return "";
}

namespace {

bool is_unit(const AInftyCategory& cat, const Letter& l) {
  return l.source == l.target && cat.unit_index(l.source) == l.index;
}

long degree_sum(const AInftyCategory& cat, const std::vector<Letter>& w, std::size_t from, std::size_t to) {
  long s = 0;
  for (std::size_t i = from; i < to; ++i) s += cat.degree(w[i]);
  return s;
}

std::vector<ObjectId> labels_of(const std::vector<Letter>& letters) {
  std::vector<ObjectId> out;
  for (const auto& l : letters) out.push_back(l.target);
  return out;
}

void collect_exts(const TreeNode& t, std::vector<std::size_t>& out) {
  for (const auto& s : t.slots) {
    if (s.kind == SlotKind::External) out.push_back(s.ext);
    if (s.kind == SlotKind::Child) collect_exts(s.child.front(), out);
  }
}

void relabel_exts(TreeNode& t, std::size_t& next) {
  for (auto& s : t.slots) {
    if (s.kind == SlotKind::External) s.ext = next++;
    if (s.kind == SlotKind::Child) relabel_exts(s.child.front(), next);
  }
}

using Expansion = std::vector<std::pair<std::vector<Letter>, Rational>>;

// A boundary term of the annulus acting on the letters attached to its points.
Expansion act_on_letters(const TreeNode& term, const std::vector<Letter>& phi, const AInftyCategory& cat) {
  std::vector<std::size_t> order;
  collect_exts(term, order);
  // bring the letters into traversal order
  long e = 0;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b)
      if (order[a] > order[b]) e += static_cast<long>(cat.degree(phi[order[a]])) * cat.degree(phi[order[b]]);
  Expansion acc{{{}, sign_of(e)}};
  std::size_t pos = 0;
  long consumed = 0;
  const Sector plus{true, 0};
  for (const auto& s : term.slots) {
    std::vector<std::pair<Letter, Rational>> options;
    if (s.kind == SlotKind::External) {
      const Letter& x = phi[order[pos++]];
      options.push_back({x, Rational(1)});
      consumed += cat.degree(x);
    } else if (s.kind == SlotKind::Child) {
      TreeNode c = s.child.front();
      std::size_t next = 0;
      relabel_exts(c, next);
      std::vector<Letter> in(order.begin() + pos, order.begin() + pos + next);
      for (std::size_t a = 0; a < next; ++a) in[a] = phi[order[pos + a]];
      pos += next;
      const Rational koszul = sign_of(static_cast<long>(subtree_degree(c, plus)) * consumed);
      for (const auto& x : in) consumed += cat.degree(x);
      const HomElement v = evaluate_tree(c, in, cat);
      for (const auto& [i, coeff] : v.coords) options.push_back({Letter{v.source, v.target, i}, koszul * coeff});
    } else {
      throw std::logic_error("annulus boundary term with an output slot");
    }
    Expansion next;
    for (const auto& [w, c] : acc)
      for (const auto& [l, x] : options) {
        auto nw = w;
        nw.push_back(l);
        next.push_back({std::move(nw), c * x});
      }
    acc = std::move(next);
  }
  return acc;
}

TruncationRule tensor_truncation(const AInftyCategory& cat, const std::map<int, std::vector<TensorGenerator>>& gens,
                                 int L) {
  TruncationRule rule;
  for (const auto& [deg, gs] : gens)
    for (const auto& g : gs)
      if (static_cast<int>(g.letters.size()) == L + 1) rule.marked.insert(deg);
  // each extra point adds |phi| + 1 for a non-identity letter phi
  std::set<int> contribs;
  std::optional<int> lo, hi;
  for (ObjectId a = 0; a < cat.object_count(); ++a)
    for (ObjectId b = 0; b < cat.object_count(); ++b)
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
        const Letter l{a, b, i};
        const int d = cat.degree(l);
        lo = lo ? std::min(*lo, d) : d;
        hi = hi ? std::max(*hi, d) : d;
        if (!is_unit(cat, l)) contribs.insert(d + 1);
      }
  if (contribs.empty()) return rule;
  if (*contribs.begin() >= 1)
    rule.at_or_above = *lo + (L + 1) * *contribs.begin();
  else if (*contribs.rbegin() <= -1)
    rule.at_or_below = *hi + (L + 1) * *contribs.rbegin();
  else
    rule.everything = true;
  return rule;
}

}  // namespace

const std::vector<TensorGenerator>& BimoduleTensorComplex::generators(int degree) const {
  static const std::vector<TensorGenerator> empty;
  auto it = gens_.find(degree);
  return it == gens_.end() ? empty : it->second;
}

std::optional<std::size_t> BimoduleTensorComplex::index_of(const TensorGenerator& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int BimoduleTensorComplex::degree_of(const TensorGenerator& g) const {
  return static_cast<int>(g.letters.size()) - 1 + static_cast<int>(degree_sum(cat_, g.letters, 0, g.letters.size()));
}

std::string BimoduleTensorComplex::label(const TensorGenerator& g) const {
  std::string s = "A(";
  for (std::size_t i = 0; i < g.labels.size(); ++i) s += (i ? "," : "") + cat_.object_name(g.labels[i]);
  s += ")";
  for (const auto& l : g.letters)
    s += "|" + cat_.object_name(l.source) + ">" + cat_.object_name(l.target) + ":" + cat_.letter_name(l);
  return s;
}

SparseMatrix BimoduleTensorComplex::part(TermFamily f, int k) const {
  auto it = parts_.find({f, k});
  if (it != parts_.end()) return it->second;
  return SparseMatrix(complex_.dim(k - 1), complex_.dim(k));
}

BimoduleTensorComplex build_tensor_complex(const AInftyCategory& B, int L, const SignFault& fault) {
  if (L < 0) throw std::invalid_argument("length bound must be non-negative");
  BimoduleTensorComplex tc;
  tc.cat_ = B.with_unit_basis();
  tc.length_bound_ = L;
  const auto& cat = tc.cat_;

  // generators: closed loops phi_0 .. phi_{n-1}, no identity at i >= 1
  std::function<void(std::vector<Letter>&, std::size_t)> grow = [&](std::vector<Letter>& w, std::size_t n) {
    if (w.size() == n) {
      if (w.back().target != w.front().source) return;
      TensorGenerator g{labels_of(w), w};
      const int deg = tc.degree_of(g);
      tc.index_.emplace(g, tc.gens_[deg].size());
      tc.gens_[deg].push_back(std::move(g));
      return;
    }
    const ObjectId at = w.back().target;
    for (ObjectId to = 0; to < cat.object_count(); ++to)
      for (std::size_t i = 0; i < cat.hom(at, to).dim(); ++i) {
        const Letter l{at, to, i};
        if (is_unit(cat, l)) continue;
        w.push_back(l);
        grow(w, n);
        w.pop_back();
      }
  };
  for (std::size_t n = 1; n <= static_cast<std::size_t>(L) + 1; ++n)
    for (ObjectId a = 0; a < cat.object_count(); ++a)
      for (ObjectId b = 0; b < cat.object_count(); ++b)
        for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
          std::vector<Letter> w{Letter{a, b, i}};
          grow(w, n);
        }

  GradedSpace space;
  for (const auto& [deg, gs] : tc.gens_)
    for (const auto& g : gs) space.add(deg, tc.label(g));

  std::map<std::vector<ObjectId>, SurfaceChain> boundaries;
  const Sector plus{true, 0};
  auto boundary_of = [&](const std::vector<ObjectId>& labels) -> const SurfaceChain& {
    auto it = boundaries.find(labels);
    if (it != boundaries.end()) return it->second;
    std::vector<Brane> names;
    for (auto o : labels) names.push_back(cat.object_name(o));
    return boundaries.emplace(labels, boundary(annulus_chain(names, plus), fault)).first->second;
  };

  std::map<int, SparseMatrix> diffs;
  for (const auto& [deg, gs] : tc.gens_) {
    const std::size_t rows = tc.generators(deg - 1).size();
    std::map<TermFamily, SparseMatrix> parts;
    for (auto f : {TermFamily::Inner, TermFamily::Wrap, TermFamily::Internal}) parts[f] = SparseMatrix(rows, gs.size());
    auto emit = [&](TermFamily f, std::size_t col, const std::vector<Letter>& w, const Rational& c) {
      if (std::any_of(w.begin() + 1, w.end(), [&](const Letter& l) { return is_unit(cat, l); })) return;
      auto row = tc.index_of(TensorGenerator{labels_of(w), w});
      if (!row) throw std::logic_error("tensor differential left the basis");
      parts[f].add(*row, col, c);
    };
    for (std::size_t col = 0; col < gs.size(); ++col) {
      const auto& g = gs[col];
      const std::size_t n = g.letters.size();
      for (const auto& [term, coeff] : boundary_of(g.labels).terms) {
        const TermFamily f = term.slots[0].kind == SlotKind::Child ? TermFamily::Wrap : TermFamily::Inner;
        for (const auto& [w, c] : act_on_letters(term, g.letters, cat)) emit(f, col, w, coeff * c);
      }
      // (-1)^{|A|} A (x) d(phi)
      for (std::size_t k = 0; k < n; ++k) {
        const Rational s = sign_of(static_cast<long>(n - 1) + degree_sum(cat, g.letters, 0, k));
        for (const auto& [j, c] : cat.mult(std::vector<Letter>{g.letters[k]})) {
          auto w = g.letters;
          w[k].index = j;
          emit(TermFamily::Internal, col, w, s * c);
        }
      }
    }
    if (rows == 0) continue;
    SparseMatrix total(rows, gs.size());
    for (auto& [f, m] : parts) {
      total = total + m;
      tc.parts_.emplace(std::pair{f, deg}, std::move(m));
    }
    diffs.emplace(deg, std::move(total));
  }
  const auto rule = tensor_truncation(cat, tc.gens_, L);
  std::map<int, Completeness> flags;
  for (int k : space.degrees())
    for (int j = k - 1; j <= k + 1; ++j)
      if (rule.at(j) == Completeness::Truncated) flags[j] = Completeness::Truncated;
  tc.complex_ = ChainComplex(std::move(space), std::move(diffs), std::move(flags));
  return tc;
}

int bijection_sign(const AInftyCategory& cat, const std::vector<Letter>& letters) {
  const std::size_t n = letters.size();
  long e = 0;
  for (std::size_t i = 0; i < n; ++i) e += static_cast<long>(n - 1 - i) * cat.degree(letters[i]);
  return e % 2 == 0 ? 1 : -1;
}

namespace {

// Signed bijection from tensor generators of degree k to Hochschild words.
std::optional<SparseMatrix> bijection(const BimoduleTensorComplex& tc, const HochschildComplex& hc, int k) {
  const auto& gs = tc.generators(k);
  if (gs.size() != hc.words(k).size()) return std::nullopt;
  SparseMatrix p(gs.size(), gs.size());
  std::set<std::size_t> hit;
  for (std::size_t col = 0; col < gs.size(); ++col) {
    auto row = hc.index_of(gs[col].letters);
    if (!row || hc.degree_of(gs[col].letters) != k || !hit.insert(*row).second) return std::nullopt;
    p.add(*row, col, Rational(bijection_sign(tc.category(), gs[col].letters)));
  }
  return p;
}

std::vector<int> all_degrees(const BimoduleTensorComplex& tc, const HochschildComplex& hc) {
  std::set<int> ds;
  for (int k : tc.complex().space().degrees()) ds.insert(k);
  for (int k : hc.complex().space().degrees()) ds.insert(k);
  return {ds.begin(), ds.end()};
}

}  // namespace

ComparisonReport compare_with_hochschild(const BimoduleTensorComplex& tc, const HochschildComplex& hc) {
  if (tc.length_bound() != hc.length_bound()) throw std::invalid_argument("complexes built at different lengths");
  ComparisonReport rep;
  rep.length_bound = tc.length_bound();
  std::map<int, SparseMatrix> P;
  const auto degs = all_degrees(tc, hc);
  for (int k : degs) {
    DegreeComparison dc;
    dc.degree = k;
    dc.tensor_dim = tc.complex().dim(k);
    dc.hochschild_dim = hc.complex().dim(k);
    dc.flag = worst(tc.complex().completeness(k), hc.complex().completeness(k));
    auto p = bijection(tc, hc, k);
    dc.bijective = p.has_value();
    if (p) P.emplace(k, std::move(*p));
    rep.degrees.push_back(dc);
  }
  for (auto& dc : rep.degrees) {
    const int k = dc.degree;
    if (!dc.bijective) {
      dc.differential_agrees = false;
      if (rep.first_mismatch.empty())
        rep.first_mismatch = "degree " + std::to_string(k) + ": no degree-preserving bijection of generators";
      rep.ok = false;
      continue;
    }
    if (!P.count(k - 1)) {
      if (tc.complex().dim(k - 1) != 0 || hc.complex().dim(k - 1) != 0) dc.differential_agrees = false;
      continue;
    }
    const auto& pk = P.at(k);
    const auto& pk1 = P.at(k - 1);
    // tensor coordinates: D_t - P^T D_h P
    const SparseMatrix delta = tc.complex().differential(k) - pk1.transpose() * hc.complex().differential(k) * pk;
    if (delta.is_zero()) continue;
    dc.differential_agrees = false;
    rep.ok = false;
    const auto entries = delta.triplets();
    dc.mismatched_entries = entries.size();
    for (auto f : {TermFamily::Inner, TermFamily::Wrap, TermFamily::Internal}) {
      const auto part = tc.part(f, k);
      if (std::all_of(entries.begin(), entries.end(),
                      [&](const Triplet& t) { return !part.at(t.row, t.col).is_zero(); }))
        dc.suspects.push_back(f);
    }
    if (rep.first_mismatch.empty()) {
      const auto& t = entries.front();
      rep.first_mismatch = "degree " + std::to_string(k) + ": d(" + tc.label(tc.generators(k)[t.col]) + ") differs at " +
                           tc.label(tc.generators(k - 1)[t.row]) + " by " + t.value.str();
    }
  }
  return rep;
}

ComparisonReport compare_with_hochschild(const AInftyCategory& B, int L, const SignFault& fault) {
  return compare_with_hochschild(build_tensor_complex(B, L, fault), build_normalized_complex(B, L));
}

ConnesB b_operator_via_annuli(const BimoduleTensorComplex& tc) {
  const auto& cat = tc.category();
  const std::size_t top = static_cast<std::size_t>(tc.length_bound()) + 1;
  ConnesB out;
  for (int deg : tc.complex().space().degrees()) {
    const auto& gs = tc.generators(deg);
    SparseMatrix m(tc.complex().dim(deg + 1), gs.size());
    bool exact = true;
    for (std::size_t col = 0; col < gs.size(); ++col) {
      const auto& w = gs[col].letters;
      const std::size_t n = w.size();
      if (n >= top) {
        exact = false;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Letter> rot(w.begin() + i, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + i);
        if (std::any_of(rot.begin(), rot.end(), [&](const Letter& l) { return is_unit(cat, l); })) continue;
        const ObjectId o = rot.front().source;
        std::vector<Letter> nw{Letter{o, o, *cat.unit_index(o)}};
        nw.insert(nw.end(), rot.begin(), rot.end());
        auto row = tc.index_of(TensorGenerator{labels_of(nw), nw});
        if (!row) throw std::logic_error("annulus rotation left the basis");
        const long e = static_cast<long>(i * (n - 1)) + degree_sum(cat, w, 0, i) * degree_sum(cat, w, i, n);
        m.add(*row, col, sign_of(e));
      }
    }
    out.maps.emplace(deg, std::move(m));
    if (exact) out.exact.insert(deg);
  }
  return out;
}

BOperatorReport compare_b_operator(const AInftyCategory& B, int L, const SignFault& fault) {
  const auto tc = build_tensor_complex(B, L, fault);
  const auto hc = build_normalized_complex(B, L);
  const auto cmp = compare_with_hochschild(tc, hc);
  if (!cmp.ok) throw ComparisonUnavailable("tensor complex and Hochschild complex differ: " + cmp.first_mismatch);
  const auto ba = b_operator_via_annuli(tc);
  const auto bh = connes_B(hc);
  BOperatorReport rep;
  std::map<int, SparseMatrix> P;
  for (int k : all_degrees(tc, hc)) P.emplace(k, *bijection(tc, hc, k));
  auto Pat = [&](int k) {
    auto it = P.find(k);
    return it == P.end() ? SparseMatrix(0, 0) : it->second;
  };
  for (int k : tc.complex().space().degrees()) {
    if (!ba.exact.count(k) || !bh.exact.count(k)) continue;
    rep.compared_degrees.push_back(k);
    const SparseMatrix lhs = Pat(k + 1) * ba.at(k);
    const SparseMatrix rhs = bh.at(k) * Pat(k);
    if (!(lhs == rhs)) {
      rep.ok = false;
      rep.mismatched_degrees.push_back(k);
    }
    if (ba.exact.count(k + 1) && !(ba.at(k + 1) * ba.at(k)).is_zero()) rep.squares_to_zero = false;
    // B d + d B on C_k (both land in degree k)
    const auto& d = tc.complex();
    SparseMatrix bd(d.dim(k), d.dim(k)), db(d.dim(k), d.dim(k));
    // d lowers arity, so B is computed on every column d(C_k) reaches
    if (d.dim(k - 1) > 0) bd = ba.at(k - 1) * d.differential(k);
    if (d.dim(k + 1) > 0) db = d.differential(k + 1) * ba.at(k);
    if (!(bd + db).is_zero()) rep.anticommutes = false;
  }
  rep.ok = rep.ok && rep.squares_to_zero && rep.anticommutes;
  return rep;
}

FiltrationReport filtration_check(const BimoduleTensorComplex& tc) {
  FiltrationReport rep;
  const auto& cx = tc.complex();
  for (int k : cx.space().degrees()) {
    const auto& gs = tc.generators(k);
    std::size_t total = 0;
    for (const auto& g : gs) {
      ++rep.graded_dims[g.letters.size()][k];
      ++total;
    }
    if (total != cx.dim(k)) {
      rep.ok = false;
      rep.failure = "graded pieces do not add up in degree " + std::to_string(k);
    }
    if (cx.dim(k - 1) == 0) continue;
    const auto d = cx.differential(k);
    const auto internal = tc.part(TermFamily::Internal, k);
    for (const auto& t : d.triplets()) {
      const std::size_t from = gs[t.col].letters.size();
      const std::size_t to = tc.generators(k - 1)[t.row].letters.size();
      if (to > from) {
        rep.ok = false;
        rep.failure = "differential raises arity in degree " + std::to_string(k);
      }
      // on the associated graded only the internal differential remains
      if (to == from && t.value != internal.at(t.row, t.col)) {
        rep.ok = false;
        rep.failure = "arity-preserving part is not the internal differential in degree " + std::to_string(k);
      }
    }
  }
  return rep;
}

}  // namespace octcft
