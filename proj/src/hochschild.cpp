#include "octcft/hochschild.hpp"

#include <algorithm>
#include <functional>

namespace octcft {

Completeness TruncationRule::at(int k) const {
  if (everything || marked.count(k) || (at_or_above && k >= *at_or_above) || (at_or_below && k <= *at_or_below))
    return Completeness::Truncated;
  return Completeness::Complete;
}

Completeness TruncationRule::homology_at(int k) const { return worst(at(k - 1), worst(at(k), at(k + 1))); }

TruncationRule TruncationRule::negated() const {
  TruncationRule r;
  r.everything = everything;
  for (int k : marked) r.marked.insert(-k);
  if (at_or_above) r.at_or_below = -*at_or_above;
  if (at_or_below) r.at_or_above = -*at_or_below;
  return r;
}

int bar_degree(const AInftyCategory& cat, const Letter& l) { return cat.degree(l) + 1; }

SparseVector bar_mult(const AInftyCategory& cat, const std::vector<Letter>& word) {
  auto v = cat.mult(word);
  if (v.empty()) return v;
  const long k = static_cast<long>(word.size());
  long exp = 0;
  for (long i = 0; i < k; ++i) exp += (k - 1 - i) * bar_degree(cat, word[i]);
  if (exp % 2 != 0)
    for (auto& [i, x] : v) x = -x;
  return v;
}

namespace {

void require_dg(const AInftyCategory& cat) {
  for (int n : cat.nonzero_arities())
    if (n >= 3)
      throw HigherMultiplication("m_" + std::to_string(n) +
                                 " is nonzero; Hochschild complexes are built for dg categories only");
}

std::vector<Letter> unit_letters(const AInftyCategory& cat) {
  std::vector<Letter> out;
  for (ObjectId a = 0; a < cat.object_count(); ++a) {
    auto u = cat.unit_index(a);
    if (!u) throw InvalidStructure("object " + cat.object_name(a) + " has no unit");
    out.push_back(Letter{a, a, *u});
  }
  return out;
}

bool is_unit(const std::vector<Letter>& units, const Letter& l) {
  return l.source == l.target && units[l.source] == l;
}

long bar_sum(const AInftyCategory& cat, const std::vector<Letter>& w, std::size_t from, std::size_t to) {
  long s = 0;
  for (std::size_t i = from; i < to; ++i) s += bar_degree(cat, w[i]);
  return s;
}

// Paths of exactly n letters, each allowed by `ok`, grouped by nothing:
// plain depth-first enumeration in a deterministic order.
void enumerate_paths(const AInftyCategory& cat, int n, ObjectId from, const std::function<bool(const Letter&)>& ok,
                     std::vector<Letter>& cur, const std::function<void(const std::vector<Letter>&)>& emit) {
  if (static_cast<int>(cur.size()) == n) {
    emit(cur);
    return;
  }
  const ObjectId at = cur.empty() ? from : cur.back().target;
  for (ObjectId to = 0; to < cat.object_count(); ++to)
    for (std::size_t i = 0; i < cat.hom(at, to).dim(); ++i) {
      Letter l{at, to, i};
      if (!ok(l)) continue;
      cur.push_back(l);
      enumerate_paths(cat, n, from, ok, cur, emit);
      cur.pop_back();
    }
}

// Degree range reachable by appending more than L letters whose shifted
// degrees lie in `contribs` (with sign +1 for chains, -1 for cochains) to a
// base degree in [base_lo, base_hi].
void mark_missing(TruncationRule& rule, const std::set<int>& contribs, int base_lo, int base_hi, int L, int sign) {
  if (contribs.empty()) return;
  const int cmin = sign * (sign > 0 ? *contribs.begin() : *contribs.rbegin());
  const int cmax = sign * (sign > 0 ? *contribs.rbegin() : *contribs.begin());
  if (cmin >= 1)
    rule.at_or_above = base_lo + (L + 1) * cmin;
  else if (cmax <= -1)
    rule.at_or_below = base_hi + (L + 1) * cmax;
  else
    rule.everything = true;
}

std::map<int, Completeness> flags_for(const GradedSpace& s, const TruncationRule& rule) {
  std::map<int, Completeness> out;
  for (int k : s.degrees())
    for (int j = k - 1; j <= k + 1; ++j)
      if (rule.at(j) == Completeness::Truncated) out[j] = Completeness::Truncated;
  return out;
}

}  // namespace

const std::vector<HochschildWord>& HochschildComplex::words(int degree) const {
  static const std::vector<HochschildWord> empty;
  auto it = words_.find(degree);
  return it == words_.end() ? empty : it->second;
}

std::optional<std::size_t> HochschildComplex::index_of(const HochschildWord& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int HochschildComplex::degree_of(const HochschildWord& w) const {
  return cat_.degree(w.front()) + static_cast<int>(bar_sum(cat_, w, 1, w.size()));
}

// Basis names repeat across hom spaces, so tag letters with their objects.
std::string qualified_name(const AInftyCategory& cat, const Letter& l) {
  std::string s = cat.letter_name(l);
  if (cat.object_count() > 1) s += "[" + cat.object_name(l.source) + ">" + cat.object_name(l.target) + "]";
  return s;
}

std::string HochschildComplex::label(const HochschildWord& w) const {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += "|";
    s += qualified_name(cat_, w[i]);
  }
  return s;
}

HochschildComplex build_hochschild_complex(const AInftyCategory& input, int L, bool normalized) {
  if (L < 0) throw std::invalid_argument("length bound must be non-negative");
  require_dg(input);
  HochschildComplex hc;
  hc.cat_ = input.with_unit_basis();
  hc.length_bound_ = L;
  hc.normalized_ = normalized;
  const auto& cat = hc.cat_;
  const auto units = unit_letters(cat);
  auto allowed = [&](const Letter& l) { return !normalized || !is_unit(units, l); };

  // basis: loops x_0 x_1 .. x_n with x_i (i >= 1) allowed
  for (int n = 0; n <= L; ++n)
    for (ObjectId a = 0; a < cat.object_count(); ++a)
      for (ObjectId b = 0; b < cat.object_count(); ++b)
        for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
          std::vector<Letter> cur{Letter{a, b, i}};
          std::function<void(const std::vector<Letter>&)> emit = [&](const std::vector<Letter>& w) {
            if (w.back().target != a) return;
            const int deg = hc.degree_of(w);
            hc.index_.emplace(w, hc.words_[deg].size());
            hc.words_[deg].push_back(w);
          };
          if (n == 0) {
            if (a == b) emit(cur);
            continue;
          }
          enumerate_paths(cat, n + 1, a, allowed, cur, emit);
        }
  GradedSpace space;
  for (const auto& [deg, ws] : hc.words_)
    for (const auto& w : ws) space.add(deg, hc.label(w));

  std::map<int, SparseMatrix> diffs;
  for (const auto& [deg, ws] : hc.words_) {
    const auto& targets = hc.words(deg - 1);
    if (targets.empty()) continue;
    SparseMatrix d(targets.size(), ws.size());
    for (std::size_t col = 0; col < ws.size(); ++col) {
      const auto& w = ws[col];
      const std::size_t len = w.size();
      auto apply_block = [&](const std::vector<Letter>& word, std::size_t i, std::size_t k, const Rational& sign) {
        std::vector<Letter> block(word.begin() + i, word.begin() + i + k);
        auto v = bar_mult(cat, block);
        for (const auto& [o, x] : v) {
          HochschildWord nw(word.begin(), word.begin() + i);
          nw.push_back(Letter{block.front().source, block.back().target, o});
          nw.insert(nw.end(), word.begin() + i + k, word.end());
          if (normalized && std::any_of(nw.begin() + 1, nw.end(), [&](const Letter& l) { return is_unit(units, l); }))
            continue;
          auto row = hc.index_of(nw);
          if (!row) throw std::logic_error("Hochschild differential left the basis");
          d.add(*row, col, sign * x);
        }
      };
      for (int k : cat.nonzero_arities()) {
        const std::size_t ku = static_cast<std::size_t>(k);
        if (ku > len) continue;
        for (std::size_t i = 0; i + ku <= len; ++i) apply_block(w, i, ku, sign_of(bar_sum(cat, w, 0, i)));
        // blocks wrapping past the end: rotate the last j letters to the front
        for (std::size_t j = 1; j < ku; ++j) {
          HochschildWord rot(w.end() - j, w.end());
          rot.insert(rot.end(), w.begin(), w.end() - j);
          const long moved = bar_sum(cat, w, len - j, len), rest = bar_sum(cat, w, 0, len - j);
          apply_block(rot, 0, ku, sign_of(moved * rest));
        }
      }
    }
    diffs.emplace(deg, std::move(d));
  }

  // truncation
  TruncationRule& rule = hc.truncation_;
  std::set<int> contribs;
  int base_lo = 0, base_hi = 0;
  bool any = false;
  for (ObjectId a = 0; a < cat.object_count(); ++a)
    for (ObjectId b = 0; b < cat.object_count(); ++b)
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
        const Letter l{a, b, i};
        const int deg = cat.degree(l);
        base_lo = any ? std::min(base_lo, deg) : deg;
        base_hi = any ? std::max(base_hi, deg) : deg;
        any = true;
        if (allowed(l)) contribs.insert(deg + 1);
      }
  for (const auto& [deg, ws] : hc.words_)
    for (const auto& w : ws)
      if (static_cast<int>(w.size()) == L + 1) rule.marked.insert(deg);
  mark_missing(rule, contribs, base_lo, base_hi, L, +1);

  auto flags = flags_for(space, rule);
  hc.complex_ = ChainComplex(std::move(space), std::move(diffs), std::move(flags));
  return hc;
}

HochschildComplex build_normalized_complex(const AInftyCategory& cat, int L) {
  return build_hochschild_complex(cat, L, true);
}

std::map<int, HomologyEntry> hh_dims(const AInftyCategory& cat, int L, int lo, int hi) {
  auto hc = build_normalized_complex(cat, L);
  auto out = homology_dims(hc.complex(), lo, hi);
  for (auto& [k, e] : out) e.flag = hc.truncation().homology_at(k);
  return out;
}

SparseMatrix ConnesB::at(int k) const {
  auto it = maps.find(k);
  if (it == maps.end()) throw std::out_of_range("no B component in degree " + std::to_string(k));
  return it->second;
}

ConnesB connes_B(const HochschildComplex& hc) {
  if (!hc.normalized()) throw std::invalid_argument("Connes B is built on the normalized complex");
  const auto& cat = hc.category();
  const auto units = unit_letters(cat);
  const int L = hc.length_bound();
  ConnesB out;
  for (int deg : hc.complex().space().degrees()) {
    const auto& ws = hc.words(deg);
    SparseMatrix m(hc.complex().dim(deg + 1), ws.size());
    bool exact = true;
    for (std::size_t col = 0; col < ws.size(); ++col) {
      const auto& w = ws[col];
      const std::size_t len = w.size();
      if (static_cast<int>(len) > L) {
        exact = false;
        continue;
      }
      for (std::size_t i = 0; i < len; ++i) {
        HochschildWord rot(w.begin() + i, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + i);
        if (std::any_of(rot.begin(), rot.end(), [&](const Letter& l) { return is_unit(units, l); })) continue;
        HochschildWord nw{units[rot.front().source]};
        nw.insert(nw.end(), rot.begin(), rot.end());
        auto row = hc.index_of(nw);
        if (!row) throw std::logic_error("Connes B left the basis");
        m.add(*row, col, sign_of(bar_sum(cat, w, 0, i) * bar_sum(cat, w, i, len)));
      }
    }
    out.maps.emplace(deg, std::move(m));
    if (exact) out.exact.insert(deg);
  }
  return out;
}

std::optional<std::size_t> CochainComplex::index_of(const HochschildWord& path, const Letter& output) const {
  auto it = index.find({path, output});
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int CochainComplex::degree_of(const HochschildWord& path, const Letter& output) const {
  return category.degree(output) - static_cast<int>(bar_sum(category, path, 0, path.size()));
}

namespace {

CochainComplex build_direct_cochains(const AInftyCategory& input, int L) {
  CochainComplex cc;
  cc.model = CochainModel::Direct;
  cc.category = input.with_unit_basis();
  cc.length_bound = L;
  const auto& cat = cc.category;
  const auto units = unit_letters(cat);
  auto allowed = [&](const Letter& l) { return !is_unit(units, l); };

  // basis: (path of n <= L non-unit letters from a to b, output in Hom(a, b))
  for (int n = 0; n <= L; ++n)
    for (ObjectId a = 0; a < cat.object_count(); ++a) {
      std::vector<Letter> cur;
      std::function<void(const std::vector<Letter>&)> emit = [&](const std::vector<Letter>& p) {
        const ObjectId b = p.empty() ? a : p.back().target;
        for (std::size_t o = 0; o < cat.hom(a, b).dim(); ++o) {
          const Letter out{a, b, o};
          const int deg = cc.degree_of(p, out);
          cc.index.emplace(std::make_pair(p, out), cc.basis[deg].size());
          cc.basis[deg].push_back({p, out});
        }
      };
      enumerate_paths(cat, n, a, allowed, cur, emit);
    }

  GradedSpace space;
  for (const auto& [deg, bs] : cc.basis)
    for (const auto& [p, o] : bs) {
      std::string s;
      for (const auto& l : p) s += qualified_name(cat, l) + "|";
      s += "->" + qualified_name(cat, o);
      space.add(deg, s);
    }

  // Matrix of delta f = s^{-1}(b o F - (-1)^{|F|} F o b), F = s f, assembled
  // row by row: for each target basis element (p', o') collect which source
  // basis elements contribute.
  std::map<int, SparseMatrix> diffs;
  for (const auto& [deg, bs] : cc.basis)
    if (cc.basis.count(deg + 1)) diffs.emplace(deg + 1, SparseMatrix(bs.size(), cc.basis.at(deg + 1).size()));
  auto add_entry = [&](const HochschildWord& rp, const Letter& ro, const HochschildWord& cp, const Letter& co,
                       const Rational& v) {
    const int rdeg = cc.degree_of(rp, ro), cdeg = cc.degree_of(cp, co);
    if (cdeg != rdeg + 1) throw std::logic_error("cochain differential has the wrong degree");
    auto r = cc.index_of(rp, ro);
    auto c = cc.index_of(cp, co);
    if (!r || !c) throw std::logic_error("cochain differential left the basis");
    diffs.at(cdeg).add(*r, *c, v);
  };
  const auto arities = cat.nonzero_arities();
  // empty paths are distinguished by their object only
  std::set<std::pair<HochschildWord, ObjectId>> seen_paths;
  for (const auto& [deg, bs] : cc.basis)
    for (const auto& [rp, ro_any] : bs) {
      if (!seen_paths.insert({rp, ro_any.source}).second) continue;
      const std::size_t m = rp.size();
      const ObjectId src = ro_any.source, tgt = ro_any.target;
      // b o F: b_k(left, F(mid), right), |left| + |right| = k - 1
      for (int k : arities)
        for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
          const std::size_t r = static_cast<std::size_t>(k) - 1 - i;
          if (i + r > m) continue;
          HochschildWord mid(rp.begin() + i, rp.end() - r);
          const ObjectId ms = i == 0 ? src : rp[i - 1].target;
          const ObjectId ma = mid.empty() ? ms : mid.front().source;
          const ObjectId mb = mid.empty() ? ms : mid.back().target;
          const long left = bar_sum(cat, rp, 0, i);
          for (std::size_t o = 0; o < cat.hom(ma, mb).dim(); ++o) {
            const Letter y{ma, mb, o};
            const long Fdeg = cc.degree_of(mid, y) + 1;
            std::vector<Letter> args(rp.begin(), rp.begin() + i);
            args.push_back(y);
            args.insert(args.end(), rp.end() - r, rp.end());
            for (const auto& [out, x] : bar_mult(cat, args))
              add_entry(rp, Letter{src, tgt, out}, mid, y, sign_of(Fdeg * left) * x);
          }
        }
      // F o b: F(.., b_k(block), ..) with sign -(-1)^{|F|} (-1)^{|before|}
      for (int k : arities)
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= m; ++i) {
          std::vector<Letter> block(rp.begin() + i, rp.begin() + i + k);
          const long before = bar_sum(cat, rp, 0, i);
          for (const auto& [o, x] : bar_mult(cat, block)) {
            const Letter y{block.front().source, block.back().target, o};
            if (is_unit(units, y)) continue;
            HochschildWord w(rp.begin(), rp.begin() + i);
            w.push_back(y);
            w.insert(w.end(), rp.begin() + i + k, rp.end());
            for (std::size_t oo = 0; oo < cat.hom(src, tgt).dim(); ++oo) {
              const Letter out{src, tgt, oo};
              const long Fdeg = cc.degree_of(w, out) + 1;
              add_entry(rp, out, w, out, -sign_of(Fdeg + before) * x);
            }
          }
        }
    }

  // truncation: cochains of length > L have degree |o| - sum of shifted degrees
  TruncationRule& rule = cc.truncation;
  std::set<int> contribs;
  int base_lo = 0, base_hi = 0;
  bool any = false;
  for (ObjectId a = 0; a < cat.object_count(); ++a)
    for (ObjectId b = 0; b < cat.object_count(); ++b)
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
        const Letter l{a, b, i};
        base_lo = any ? std::min(base_lo, cat.degree(l)) : cat.degree(l);
        base_hi = any ? std::max(base_hi, cat.degree(l)) : cat.degree(l);
        any = true;
        if (allowed(l)) contribs.insert(bar_degree(cat, l));
      }
  for (const auto& [deg, bs] : cc.basis)
    for (const auto& [p, o] : bs)
      if (static_cast<int>(p.size()) == L) rule.marked.insert(deg);
  mark_missing(rule, contribs, base_lo, base_hi, L, -1);
  auto flags = flags_for(space, rule);
  cc.complex = ChainComplex(std::move(space), std::move(diffs), std::move(flags));
  return cc;
}

}  // namespace

CochainComplex build_cochain_complex(const AInftyCategory& cat, int L, CochainModel model) {
  if (model == CochainModel::Direct) {
    require_dg(cat);
    return build_direct_cochains(cat, L);
  }
  auto hc = build_normalized_complex(cat, L);
  CochainComplex cc;
  cc.model = CochainModel::DualOfChains;
  cc.category = hc.category();
  cc.length_bound = L;
  cc.truncation = hc.truncation().negated();
  cc.complex = dual_complex(hc.complex());
  return cc;
}

std::map<int, HomologyEntry> hh_cohomology_dims(const CochainComplex& cc, int lo, int hi) {
  auto h = homology_dims(cc.complex, -hi, -lo);
  std::map<int, HomologyEntry> out;
  for (auto& [k, e] : h) {
    e.flag = cc.truncation.homology_at(k);
    out.emplace(-k, e);
  }
  return out;
}

SparseVector cup_cochains(const CochainComplex& cc, int df, const SparseVector& f, int dg, const SparseVector& g) {
  if (cc.model != CochainModel::Direct) throw std::invalid_argument("cup product needs the direct cochain model");
  const auto& cat = cc.category;
  SparseVector out;
  auto basis_of = [&](int deg) -> const std::vector<std::pair<HochschildWord, Letter>>& {
    static const std::vector<std::pair<HochschildWord, Letter>> empty;
    auto it = cc.basis.find(deg);
    return it == cc.basis.end() ? empty : it->second;
  };
  const auto& fb = basis_of(df);
  const auto& gb = basis_of(dg);
  for (const auto& [i, a] : f) {
    const auto& [P, o] = fb.at(i);
    const long ps = bar_sum(cat, P, 0, P.size());
    for (const auto& [j, b] : g) {
      const auto& [Q, o2] = gb.at(j);
      if (o.target != o2.source) continue;
      if (static_cast<int>(P.size() + Q.size()) > cc.length_bound) continue;
      HochschildWord PQ = P;
      PQ.insert(PQ.end(), Q.begin(), Q.end());
      const Rational s = sign_of(static_cast<long>(dg) * ps) * a * b;
      for (const auto& [r, x] : cat.mult(std::vector<Letter>{o, o2})) {
        auto idx = cc.index_of(PQ, Letter{o.source, o2.target, r});
        if (!idx) throw std::logic_error("cup product left the basis");
        auto it = out.find(*idx);
        if (it == out.end())
          out.emplace(*idx, s * x);
        else {
          it->second += s * x;
          if (it->second.is_zero()) out.erase(it);
        }
      }
    }
  }
  return out;
}

CupTable cup_product(const CochainComplex& cc, int lo, int hi) {
  if (cc.model != CochainModel::Direct) throw std::invalid_argument("cup product needs the direct cochain model");
  CupTable t;
  for (int k = lo; k <= hi; ++k)
    if (cc.truncation.homology_at(-k) == Completeness::Complete) t.bases.emplace(k, homology_basis(cc.complex, -k));
  for (const auto& [p, bp] : t.bases)
    for (const auto& [q, bq] : t.bases) {
      auto target = t.bases.find(p + q);
      if (target == t.bases.end()) continue;
      for (std::size_t i = 0; i < bp.representatives.size(); ++i)
        for (std::size_t j = 0; j < bq.representatives.size(); ++j) {
          auto prod = cup_cochains(cc, -p, bp.representatives[i], -q, bq.representatives[j]);
          auto coords = target->second.coordinates(prod);
          if (!coords)
            throw std::logic_error("cup product of cocycles in HH^" + std::to_string(p) + " and HH^" +
                                   std::to_string(q) + " is not a cocycle");
          t.products.emplace(std::make_tuple(p, i, q, j), std::move(*coords));
        }
    }
  auto h0 = t.bases.find(0);
  if (h0 != t.bases.end()) {
    SparseVector one;
    for (ObjectId a = 0; a < cc.category.object_count(); ++a) {
      auto idx = cc.index_of({}, Letter{a, a, *cc.category.unit_index(a)});
      one[*idx] = 1;
    }
    t.unit = h0->second.coordinates(one);
  }
  return t;
}

DualityReport duality_check(const CYStructure& cy, int L, int lo, int hi) {
  const int d = cy.dimension();
  DualityReport rep;
  rep.dimension = d;
  auto chains = hh_dims(cy.base(), L, lo, hi);
  auto cc = build_cochain_complex(cy.base(), L, CochainModel::Direct);
  auto coh = hh_cohomology_dims(cc, lo + d, hi + d);
  for (int i = lo; i <= hi; ++i) {
    DualityEntry e;
    e.degree = i;
    e.hh_dim = chains.at(i).dim;
    e.coh_dim = coh.at(d + i).dim;
    e.complete = chains.at(i).flag == Completeness::Complete && coh.at(d + i).flag == Completeness::Complete;
    e.agree = e.hh_dim == e.coh_dim;
    if (e.complete && !e.agree) rep.ok = false;
    rep.entries.push_back(e);
  }
  return rep;
}

namespace {

CYStructure adapted_pairing(const CYStructure& cy, const AInftyCategory& adapted) {
  auto bc = cy.base().unit_basis_change();
  return cy.rebased(std::make_shared<const AInftyCategory>(adapted), bc.T);
}

Rational pairing_with(const CYStructure& acy, const CochainComplex& cc, int cochain_degree, const SparseVector& f,
                      const HochschildComplex& hc, int chain_degree, const SparseVector& c) {
  Rational sum;
  const auto& cat = cc.category;
  const auto& words = hc.words(chain_degree);
  for (const auto& [wi, cw] : c) {
    const auto& w = words.at(wi);
    const Letter& a0 = w.front();
    HochschildWord path(w.begin() + 1, w.end());
    for (std::size_t o = 0; o < cat.hom(a0.target, a0.source).dim(); ++o) {
      const Letter out{a0.target, a0.source, o};
      if (cc.degree_of(path, out) != cochain_degree) continue;
      auto idx = cc.index_of(path, out);
      if (!idx) continue;
      auto it = f.find(*idx);
      if (it == f.end()) continue;
      sum += it->second * cw * acy.pairing_matrix(out.source, out.target).at(o, a0.index);
    }
  }
  return sum;
}

}  // namespace

Rational chain_cochain_pairing(const CYStructure& cy, const CochainComplex& cc, int cochain_degree,
                               const SparseVector& f, const HochschildComplex& hc, int chain_degree,
                               const SparseVector& c) {
  if (cc.model != CochainModel::Direct) throw std::invalid_argument("pairing needs the direct cochain model");
  return pairing_with(adapted_pairing(cy, cc.category), cc, cochain_degree, f, hc, chain_degree, c);
}

CoproductTable coproduct(const CYStructure& cy, int L, int lo, int hi) {
  const int d = cy.dimension();
  CoproductTable out;
  out.dimension = d;
  auto hc = build_normalized_complex(cy.base(), L);
  auto cc = build_cochain_complex(cy.base(), L, CochainModel::Direct);
  auto acy = adapted_pairing(cy, cc.category);
  // cohomology degrees d + i for chain degrees i in range
  auto cup = cup_product(cc, lo + d, hi + d);

  // Q[i] = (P_i^T)^{-1}: columns are chain classes dual to the cochain basis
  std::map<int, SparseMatrix> P, Q;
  for (int i = lo; i <= hi; ++i) {
    if (hc.truncation().homology_at(i) != Completeness::Complete) continue;
    auto cb = cup.bases.find(d + i);
    if (cb == cup.bases.end()) continue;
    auto hb = homology_basis(hc.complex(), i);
    const std::size_t n = hb.representatives.size();
    if (cb->second.representatives.size() != n)
      throw DualityFailure("dim HH_" + std::to_string(i) + " = " + std::to_string(n) + " but dim HH^" +
                           std::to_string(d + i) + " = " + std::to_string(cb->second.representatives.size()));
    SparseMatrix p(n, n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        p.set(u, v, pairing_with(acy, cc, -(d + i), cb->second.representatives[v], hc, i, hb.representatives[u]));
    if (rank(p) != n) throw DualityFailure("pairing between HH_" + std::to_string(i) + " and HH^" +
                                           std::to_string(d + i) + " is degenerate");
    std::vector<SparseVector> cols;
    const SparseMatrix pt = p.transpose();
    for (std::size_t v = 0; v < n; ++v) cols.push_back(*solve(pt, SparseVector{{v, Rational(1)}}));
    Q.emplace(i, SparseMatrix::from_columns(n, cols));
    P.emplace(i, std::move(p));
    out.chain_bases.emplace(i, std::move(hb));
  }
  for (const auto& [i, Pi] : P)
    for (const auto& [j, Qj] : Q) {
      const int k = i - d - j;
      auto qk = Q.find(k);
      if (qk == Q.end()) continue;
      const std::size_t ni = Pi.rows(), nj = Qj.rows(), nk = qk->second.rows();
      SparseMatrix block(nj * nk, ni);
      for (std::size_t col = 0; col < ni; ++col)
        for (std::size_t v = 0; v < nj; ++v)
          for (std::size_t w = 0; w < nk; ++w) {
            // <F_v u G_w, c_col>
            const auto& coords = cup.products.at(std::make_tuple(d + j, v, d + k, w));
            Rational val;
            for (std::size_t t = 0; t < coords.size(); ++t) val += coords[t] * Pi.at(col, t);
            if (val.is_zero()) continue;
            for (const auto& [u1, q1] : Qj.column(v))
              for (const auto& [u2, q2] : qk->second.column(w)) block.add(u1 * nk + u2, col, val * q1 * q2);
          }
      out.blocks.emplace(std::make_pair(i, j), std::move(block));
    }
  return out;
}

namespace {

SparseMatrix kron_identity_right(const SparseMatrix& a, std::size_t n) {
  SparseMatrix out(a.rows() * n, a.cols() * n);
  for (const auto& t : a.triplets())
    for (std::size_t k = 0; k < n; ++k) out.set(t.row * n + k, t.col * n + k, t.value);
  return out;
}

SparseMatrix kron_identity_left(std::size_t n, const SparseMatrix& a) {
  SparseMatrix out(a.rows() * n, a.cols() * n);
  for (const auto& t : a.triplets())
    for (std::size_t k = 0; k < n; ++k) out.set(k * a.rows() + t.row, k * a.cols() + t.col, t.value);
  return out;
}

}  // namespace

CoassociativityReport coassociativity_check(const CoproductTable& t) {
  CoassociativityReport rep;
  const int d = t.dimension;
  auto dim = [&](int k) {
    auto it = t.chain_bases.find(k);
    return it == t.chain_bases.end() ? std::size_t{0} : it->second.representatives.size();
  };
  auto fail = [&](std::string what) {
    if (rep.ok) rep.failure = std::move(what);
    rep.ok = false;
  };
  for (const auto& [key, block] : t.blocks) {
    const auto [i, j] = key;
    const int k = i - d - j;
    if (block.rows() != dim(j) * dim(k) || block.cols() != dim(i))
      fail("block HH_" + std::to_string(i) + " -> HH_" + std::to_string(j) + " x HH_" + std::to_string(k) +
           " has the wrong shape");
    rep.nonzero_blocks += !block.is_zero();
    for (const auto& [key2, left] : t.blocks) {
      if (key2.first != j) continue;
      const int a = key2.second, b = j - d - a, c = k;
      const int m = i - d - a;
      auto outer = t.blocks.find({i, a});
      auto inner = t.blocks.find({m, b});
      if (outer == t.blocks.end() || inner == t.blocks.end()) continue;
      auto lhs = kron_identity_right(left, dim(c)) * block;
      auto rhs = kron_identity_left(dim(a), inner->second) * outer->second;
      if ((static_cast<long>(d) * a) % 2 != 0) rhs = rhs.scaled(Rational(-1));
      ++rep.compared;
      if (!(lhs - rhs).is_zero())
        fail("coassociativity fails on HH_" + std::to_string(i) + " -> HH_" + std::to_string(a) + " x HH_" +
             std::to_string(b) + " x HH_" + std::to_string(c));
    }
  }
  return rep;
}

}  // namespace octcft
