#include "octcft/ainfty.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace octcft {

namespace {

constexpr std::size_t kMaxDetails = 20;

std::string format_vector(const AInftyCategory& cat, ObjectId a, ObjectId b, const SparseVector& v) {
  if (v.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, x] : v) {
    if (!first) os << " + ";
    first = false;
    os << x << "*" << cat.hom(a, b).basis.at(i).name;
  }
  return os.str();
}

std::string format_word(const AInftyCategory& cat, const std::vector<Letter>& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ", ";
    s += cat.letter_name(w[i]);
  }
  return s + ")";
}

SparseMatrix inverse(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidStructure("change of basis is not square");
  std::vector<SparseVector> cols;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto x = solve(m, SparseVector{{i, Rational(1)}});
    if (!x) throw InvalidStructure("change of basis is singular");
    cols.push_back(std::move(*x));
  }
  return SparseMatrix::from_columns(m.rows(), cols);
}

}  // namespace

void CheckReport::fail(std::string what) {
  ok = false;
  ++violation_count;
  if (details.size() < kMaxDetails) details.push_back(std::move(what));
}

AInftyCategory::AInftyCategory(std::vector<std::string> objects, int max_arity)
    : objects_(std::move(objects)), max_arity_(max_arity) {
  std::set<std::string> seen;
  for (const auto& o : objects_)
    if (!seen.insert(o).second) throw InvalidStructure("duplicate object '" + o + "'");
  if (max_arity_ < 2) throw InvalidStructure("maximum arity must be at least 2");
}

void AInftyCategory::set_hom(ObjectId a, ObjectId b, std::vector<BasisElement> basis) {
  if (a >= objects_.size() || b >= objects_.size()) throw InvalidStructure("object index out of range");
  std::set<std::string> seen;
  for (const auto& e : basis)
    if (!seen.insert(e.name).second)
      throw InvalidStructure("duplicate basis element '" + e.name + "' in Hom(" + objects_[a] + ", " +
                             objects_[b] + ")");
  homs_[{a, b}] = HomSpace{std::move(basis)};
}

const HomSpace& AInftyCategory::hom(ObjectId a, ObjectId b) const {
  static const HomSpace empty;
  if (a >= objects_.size() || b >= objects_.size()) throw InvalidStructure("object index out of range");
  auto it = homs_.find({a, b});
  return it == homs_.end() ? empty : it->second;
}

void AInftyCategory::set_unit(ObjectId a, SparseVector unit) {
  const auto& h = hom(a, a);
  for (const auto& [i, x] : unit)
    if (i >= h.dim()) throw InvalidStructure("unit coordinate out of range for " + objects_.at(a));
  std::erase_if(unit, [](const auto& kv) { return kv.second.is_zero(); });
  units_[a] = std::move(unit);
}

const SparseVector& AInftyCategory::unit(ObjectId a) const {
  auto it = units_.find(a);
  if (it == units_.end()) throw InvalidStructure("object " + objects_.at(a) + " has no unit");
  return it->second;
}

void AInftyCategory::add_mult(const std::vector<Letter>& inputs, std::size_t output, const Rational& coeff) {
  const int n = static_cast<int>(inputs.size());
  if (n < 1) throw InvalidStructure("m_0 is not supported");
  if (n > max_arity_)
    throw ArityTooLarge("arity " + std::to_string(n) + " exceeds the maximum arity " +
                        std::to_string(max_arity_));
  int deg = n - 2;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& l = inputs[i];
    if (l.index >= hom(l.source, l.target).dim()) throw InvalidStructure("basis index out of range");
    if (i + 1 < inputs.size() && l.target != inputs[i + 1].source)
      throw InvalidStructure("inputs " + format_word(*this, inputs) + " are not composable");
    deg += degree(l);
  }
  const ObjectId a = inputs.front().source, b = inputs.back().target;
  const auto& out = hom(a, b);
  if (output >= out.dim()) throw InvalidStructure("output index out of range");
  if (out.basis[output].degree != deg)
    throw InvalidStructure("m_" + std::to_string(n) + format_word(*this, inputs) + " -> " +
                           out.basis[output].name + " is not of degree " + std::to_string(n - 2));
  if (coeff.is_zero()) return;
  auto& tbl = mults_[n];
  auto& v = tbl[inputs];
  v[output] += coeff;
  if (v[output].is_zero()) v.erase(output);
  if (v.empty()) tbl.erase(inputs);
  if (tbl.empty()) mults_.erase(n);
}

SparseVector AInftyCategory::mult(const std::vector<Letter>& inputs) const {
  auto it = mults_.find(static_cast<int>(inputs.size()));
  if (it == mults_.end()) return {};
  auto jt = it->second.find(inputs);
  return jt == it->second.end() ? SparseVector{} : jt->second;
}

HomElement AInftyCategory::mult(const std::vector<HomElement>& args) const {
  if (args.empty()) throw InvalidStructure("m_0 is not supported");
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i].target != args[i + 1].source) throw InvalidStructure("arguments are not composable");
  HomElement out{args.front().source, args.back().target, {}};
  if (!has_arity(static_cast<int>(args.size()))) return out;
  std::vector<Letter> word(args.size());
  std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t k, const Rational& c) {
    if (k == args.size()) {
      auto v = mult(word);
      if (!v.empty()) axpy(out.coords, c, v);
      return;
    }
    for (const auto& [i, x] : args[k].coords) {
      word[k] = Letter{args[k].source, args[k].target, i};
      rec(k + 1, c * x);
    }
  };
  rec(0, Rational(1));
  return out;
}

std::vector<int> AInftyCategory::nonzero_arities() const {
  std::vector<int> out;
  for (const auto& [n, t] : mults_) out.push_back(n);
  return out;
}

bool AInftyCategory::has_arity(int n) const { return mults_.count(n) > 0; }

const std::map<std::vector<Letter>, SparseVector>& AInftyCategory::table(int n) const {
  static const std::map<std::vector<Letter>, SparseVector> empty;
  auto it = mults_.find(n);
  return it == mults_.end() ? empty : it->second;
}

std::vector<std::vector<Letter>> AInftyCategory::composable_words(int n) const {
  std::vector<std::vector<Letter>> out;
  if (n <= 0) return out;
  std::vector<Letter> cur;
  std::function<void(ObjectId)> rec = [&](ObjectId from) {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (ObjectId to = 0; to < objects_.size(); ++to)
      for (std::size_t i = 0; i < hom(from, to).dim(); ++i) {
        cur.push_back(Letter{from, to, i});
        rec(to);
        cur.pop_back();
      }
  };
  for (ObjectId a = 0; a < objects_.size(); ++a) rec(a);
  return out;
}

std::optional<std::size_t> AInftyCategory::unit_index(ObjectId a) const {
  if (!has_unit(a)) return std::nullopt;
  const auto& u = unit(a);
  if (u.size() == 1 && u.begin()->second == Rational(1)) return u.begin()->first;
  return std::nullopt;
}

AInftyCategory AInftyCategory::change_basis(
    const std::map<std::pair<ObjectId, ObjectId>, SparseMatrix>& T,
    const std::map<std::pair<ObjectId, ObjectId>, std::vector<BasisElement>>& new_basis) const {
  std::map<std::pair<ObjectId, ObjectId>, SparseMatrix> Tinv, Trows;
  for (const auto& [ab, t] : T) {
    if (t.rows() != hom(ab.first, ab.second).dim() || !new_basis.count(ab) ||
        new_basis.at(ab).size() != t.cols())
      throw InvalidStructure("change of basis does not match the hom space");
    Tinv.emplace(ab, inverse(t));
    Trows.emplace(ab, t.transpose());
  }
  AInftyCategory out(objects_, max_arity_);
  for (const auto& [ab, h] : homs_) {
    auto nb = new_basis.find(ab);
    out.set_hom(ab.first, ab.second, nb == new_basis.end() ? h.basis : nb->second);
  }
  auto to_new = [&](ObjectId a, ObjectId b, const SparseVector& v) {
    auto it = Tinv.find({a, b});
    return it == Tinv.end() ? v : it->second.apply(v);
  };
  // m'(e'_j, ...) = m(sum_i T[i][j] e_i, ...), so an old word i_1..i_n
  // feeds every new word j_1..j_n with all T[i_k][j_k] != 0
  auto new_letters = [&](const Letter& l) {
    std::vector<std::pair<Letter, Rational>> out_letters;
    auto it = Trows.find({l.source, l.target});
    if (it == Trows.end()) {
      out_letters.push_back({l, Rational(1)});
      return out_letters;
    }
    for (const auto& [j, x] : it->second.column(l.index)) out_letters.push_back({Letter{l.source, l.target, j}, x});
    return out_letters;
  };
  for (const auto& [a, u] : units_) out.set_unit(a, to_new(a, a, u));
  for (const auto& [n, tbl] : mults_) {
    std::map<std::vector<Letter>, SparseVector> acc;
    for (const auto& [word, v] : tbl) {
      std::vector<std::vector<std::pair<Letter, Rational>>> choices;
      for (const auto& l : word) choices.push_back(new_letters(l));
      std::vector<Letter> nw(word.size());
      std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t k, const Rational& c) {
        if (k == word.size()) {
          axpy(acc[nw], c, v);
          return;
        }
        for (const auto& [l, x] : choices[k]) {
          nw[k] = l;
          rec(k + 1, c * x);
        }
      };
      rec(0, Rational(1));
    }
    for (const auto& [word, v] : acc) {
      auto nv = to_new(word.front().source, word.back().target, v);
      for (const auto& [i, x] : nv) out.add_mult(word, i, x);
    }
  }
  return out;
}

AInftyCategory::BasisChange AInftyCategory::unit_basis_change() const {
  BasisChange bc;
  for (const auto& [a, u] : units_) {
    if (unit_index(a) || u.empty()) continue;
    const auto& h = hom(a, a);
    std::size_t p = u.begin()->first;
    for (const auto& [i, x] : u)
      if (h.basis[i].degree != 0) throw InvalidStructure("unit of " + objects_[a] + " is not of degree 0");
    SparseMatrix t = SparseMatrix::identity(h.dim());
    t.set(p, p, Rational(0));
    for (const auto& [i, x] : u) t.set(i, p, x);
    auto basis = h.basis;
    std::string name = "1_" + objects_[a];
    while (std::any_of(basis.begin(), basis.end(), [&](const auto& e) { return e.name == name; })) name += "'";
    basis[p].name = name;
    bc.T.emplace(std::make_pair(a, a), std::move(t));
    bc.basis.emplace(std::make_pair(a, a), std::move(basis));
  }
  return bc;
}

AInftyCategory AInftyCategory::with_unit_basis() const {
  auto bc = unit_basis_change();
  if (bc.T.empty()) return *this;
  return change_basis(bc.T, bc.basis);
}

CheckReport check_ainfty_relations(const AInftyCategory& cat, int up_to_arity) {
  if (up_to_arity > cat.max_arity())
    throw ArityTooLarge("requested arity " + std::to_string(up_to_arity) + " exceeds the maximum arity " +
                        std::to_string(cat.max_arity()));
  CheckReport rep{"ainfty_relations"};
  for (int total = 1; total <= up_to_arity; ++total) {
    // (r, s, t) with r + s + t = total, s >= 1, both m_s and m_{r+1+t} nonzero
    std::vector<std::pair<int, int>> terms;
    for (int s = 1; s <= total; ++s)
      for (int r = 0; r + s <= total; ++r)
        if (cat.has_arity(s) && cat.has_arity(total - s + 1)) terms.push_back({r, s});
    if (terms.empty()) continue;
    for (const auto& w : cat.composable_words(total)) {
      SparseVector residual;
      for (auto [r, s] : terms) {
        const int t = total - r - s;
        std::vector<Letter> inner(w.begin() + r, w.begin() + r + s);
        auto v = cat.mult(inner);
        if (v.empty()) continue;
        long exp = r + static_cast<long>(s) * t;
        for (int l = 0; l < r; ++l) exp += static_cast<long>(s) * cat.degree(w[l]);
        const Rational sign = sign_of(exp);
        std::vector<Letter> outer(w.begin(), w.begin() + r);
        outer.push_back(Letter{inner.front().source, inner.back().target, 0});
        outer.insert(outer.end(), w.begin() + r + s, w.end());
        for (const auto& [i, x] : v) {
          outer[r].index = i;
          auto o = cat.mult(outer);
          if (!o.empty()) axpy(residual, sign * x, o);
        }
      }
      if (!residual.empty())
        rep.fail("arity " + std::to_string(total) + " on " + format_word(cat, w) + ": residual " +
                 format_vector(cat, w.front().source, w.back().target, residual));
    }
  }
  return rep;
}

CheckReport check_units(const AInftyCategory& cat) {
  CheckReport rep{"units"};
  const std::size_t n_obj = cat.object_count();
  std::vector<bool> present(n_obj);
  for (ObjectId a = 0; a < n_obj; ++a) {
    const auto& name = cat.object_name(a);
    if (!cat.has_unit(a)) {
      rep.fail("object " + name + " has no unit");
      continue;
    }
    present[a] = true;
    const auto& u = cat.unit(a);
    for (const auto& [i, x] : u)
      if (cat.hom(a, a).basis[i].degree != 0) rep.fail("unit of " + name + " is not of degree 0");
    auto d = cat.mult(std::vector<HomElement>{{a, a, u}});
    if (!d.coords.empty()) rep.fail("unit of " + name + " is not closed: m_1(1) = " +
                                    format_vector(cat, a, a, d.coords));
    for (ObjectId b = 0; b < n_obj; ++b) {
      for (std::size_t i = 0; i < cat.hom(b, a).dim(); ++i) {
        HomElement alpha{b, a, {{i, Rational(1)}}};
        auto r = cat.mult(std::vector<HomElement>{alpha, {a, a, u}});
        if (r.coords != alpha.coords)
          rep.fail("m_2(" + cat.hom(b, a).basis[i].name + ", 1_" + name + ") = " +
                   format_vector(cat, b, a, r.coords));
      }
      for (std::size_t i = 0; i < cat.hom(a, b).dim(); ++i) {
        HomElement beta{a, b, {{i, Rational(1)}}};
        auto r = cat.mult(std::vector<HomElement>{{a, a, u}, beta});
        if (r.coords != beta.coords)
          rep.fail("m_2(1_" + name + ", " + cat.hom(a, b).basis[i].name + ") = " +
                   format_vector(cat, a, b, r.coords));
      }
    }
  }
  for (int n : cat.nonzero_arities()) {
    if (n < 3) continue;
    for (const auto& w : cat.composable_words(n - 1)) {
      for (int j = 0; j < n; ++j) {
        const ObjectId obj = j < n - 1 ? w[j].source : w.back().target;
        if (!present[obj]) continue;
        std::vector<HomElement> args;
        for (int k = 0; k < n - 1; ++k) {
          if (k == j) args.push_back({obj, obj, cat.unit(obj)});
          args.push_back({w[k].source, w[k].target, {{w[k].index, Rational(1)}}});
        }
        if (j == n - 1) args.push_back({obj, obj, cat.unit(obj)});
        auto r = cat.mult(args);
        if (!r.coords.empty())
          rep.fail("m_" + std::to_string(n) + " with unit in slot " + std::to_string(j) + " on " +
                   format_word(cat, w) + " = " + format_vector(cat, r.source, r.target, r.coords));
      }
    }
  }
  return rep;
}

CYStructure::CYStructure(std::shared_ptr<const AInftyCategory> base, int dimension)
    : base_(std::move(base)), dimension_(dimension) {
  if (!base_) throw InvalidStructure("CY structure needs a base category");
  for (ObjectId a = 0; a < base_->object_count(); ++a)
    for (ObjectId b = 0; b < base_->object_count(); ++b)
      pairings_.emplace(std::make_pair(a, b), SparseMatrix(base_->hom(a, b).dim(), base_->hom(b, a).dim()));
}

void CYStructure::set_pairing(ObjectId a, ObjectId b, std::size_t left, std::size_t right, const Rational& v) {
  auto it = pairings_.find({a, b});
  if (it == pairings_.end() || left >= it->second.rows() || right >= it->second.cols())
    throw InvalidStructure("pairing entry out of range");
  it->second.set(left, right, v);
}

const SparseMatrix& CYStructure::pairing_matrix(ObjectId a, ObjectId b) const {
  auto it = pairings_.find({a, b});
  if (it == pairings_.end()) throw InvalidStructure("object index out of range");
  return it->second;
}

Rational CYStructure::pair(const HomElement& x, const HomElement& y) const {
  if (x.target != y.source || y.target != x.source) throw InvalidStructure("pairing arguments do not match");
  const auto& m = pairing_matrix(x.source, x.target);
  Rational sum;
  auto my = m.apply(y.coords);
  for (const auto& [i, v] : x.coords) {
    auto it = my.find(i);
    if (it != my.end()) sum += v * it->second;
  }
  return sum;
}

CYStructure CYStructure::rebased(std::shared_ptr<const AInftyCategory> new_base,
                                 const std::map<std::pair<ObjectId, ObjectId>, SparseMatrix>& T) const {
  CYStructure out(std::move(new_base), dimension_);
  auto t_of = [&](ObjectId a, ObjectId b) {
    auto it = T.find({a, b});
    return it == T.end() ? SparseMatrix::identity(base_->hom(a, b).dim()) : it->second;
  };
  for (const auto& [ab, m] : pairings_) {
    auto [a, b] = ab;
    out.pairings_[ab] = t_of(a, b).transpose() * m * t_of(b, a);
  }
  return out;
}

CYStructure CYStructure::scaled(const Rational& s) const {
  CYStructure out(*this);
  for (auto& [ab, m] : out.pairings_) m = m.scaled(s);
  return out;
}

CheckReport check_nondegenerate(const CYStructure& cy) {
  CheckReport rep{"nondegenerate"};
  const auto& cat = cy.base();
  const int d = cy.dimension();
  for (ObjectId a = 0; a < cat.object_count(); ++a)
    for (ObjectId b = 0; b < cat.object_count(); ++b) {
      const auto& left = cat.hom(a, b);
      const auto& right = cat.hom(b, a);
      const auto& m = cy.pairing_matrix(a, b);
      const std::string where = "(" + cat.object_name(a) + ", " + cat.object_name(b) + ")";
      for (const auto& t : m.triplets())
        if (left.basis[t.row].degree + right.basis[t.col].degree != -d)
          rep.fail("pairing on " + where + " links " + left.basis[t.row].name + " and " +
                   right.basis[t.col].name + " whose degrees do not sum to " + std::to_string(-d));
      std::map<int, std::vector<std::size_t>> lrows, rcols;
      for (std::size_t i = 0; i < left.dim(); ++i) lrows[left.basis[i].degree].push_back(i);
      for (std::size_t j = 0; j < right.dim(); ++j) rcols[right.basis[j].degree].push_back(j);
      std::set<int> degs;
      for (const auto& [k, v] : lrows) degs.insert(k);
      for (const auto& [k, v] : rcols) degs.insert(-d - k);
      for (int i : degs) {
        const auto& rs = lrows[i];
        const auto& cs = rcols[-d - i];
        if (rs.size() != cs.size()) {
          rep.fail("dim Hom_" + std::to_string(i) + where + " = " + std::to_string(rs.size()) +
                   " but the dual degree has dimension " + std::to_string(cs.size()));
          continue;
        }
        const std::size_t r = rank(m.select_rows(rs).select_columns(cs));
        if (r != rs.size())
          rep.fail("pairing block in degree " + std::to_string(i) + " on " + where + " has rank " +
                   std::to_string(r) + " < " + std::to_string(rs.size()));
      }
    }
  return rep;
}

CheckReport check_cyclic(const CYStructure& cy, int up_to_arity) {
  const auto& cat = cy.base();
  if (up_to_arity > cat.max_arity())
    throw ArityTooLarge("requested arity " + std::to_string(up_to_arity) + " exceeds the maximum arity " +
                        std::to_string(cat.max_arity()));
  auto nd = check_nondegenerate(cy);
  if (!nd.ok) throw DegeneratePairing(nd.details.empty() ? "pairing is degenerate" : nd.details.front());
  CheckReport rep{"cyclic"};
  for (ObjectId a = 0; a < cat.object_count(); ++a)
    for (ObjectId b = 0; b < cat.object_count(); ++b) {
      const auto& m = cy.pairing_matrix(a, b);
      const auto& mt = cy.pairing_matrix(b, a);
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
          const Letter x{a, b, i}, y{b, a, j};
          if (m.at(i, j) != sign_of(static_cast<long>(cat.degree(x)) * cat.degree(y)) * mt.at(j, i))
            rep.fail("pairing is not graded symmetric on (" + cat.letter_name(x) + ", " + cat.letter_name(y) + ")");
        }
    }
  for (int k = 1; k <= up_to_arity; ++k) {
    if (!cat.has_arity(k)) continue;
    for (const auto& w : cat.composable_words(k)) {
      const ObjectId first = w.front().source, last = w.back().target;
      for (std::size_t c = 0; c < cat.hom(last, first).dim(); ++c) {
        const Letter close{last, first, c};
        HomElement lhs_arg{first, last, cat.mult(w)};
        const Rational lhs = cy.pair(lhs_arg, {last, first, {{c, Rational(1)}}});
        std::vector<Letter> rot(w.begin() + 1, w.end());
        rot.push_back(close);
        long tail = 0;
        for (const auto& l : rot) tail += cat.degree(l);
        const Rational sign = sign_of((k + 2) + static_cast<long>(cat.degree(w.front())) * tail);
        HomElement rhs_arg{rot.front().source, rot.back().target, cat.mult(rot)};
        const Rational rhs = sign * cy.pair(rhs_arg, {w.front().source, w.front().target, {{w.front().index, Rational(1)}}});
        if (lhs != rhs) {
          auto full = w;
          full.push_back(close);
          rep.fail("arity " + std::to_string(k) + " on " + format_word(cat, full) + ": " + lhs.str() +
                   " vs " + rhs.str());
        }
      }
    }
  }
  return rep;
}

AInftyCategory from_dg_category(const DgCategorySpec& dg) {
  AInftyCategory cat(dg.objects);
  for (const auto& [ab, basis] : dg.homs) cat.set_hom(ab.first, ab.second, basis);
  for (const auto& [a, u] : dg.units) cat.set_unit(a, u);
  for (const auto& e : dg.differential) {
    if (e.inputs.size() != 1) throw InvalidStructure("differential entries take one input");
    cat.add_mult(e.inputs, e.output, e.coeff);
  }
  for (const auto& e : dg.composition) {
    if (e.inputs.size() != 2) throw InvalidStructure("composition entries take two inputs");
    cat.add_mult(e.inputs, e.output, e.coeff);
  }
  auto basis_elt = [](const Letter& l) { return HomElement{l.source, l.target, {{l.index, Rational(1)}}}; };
  auto m = [&](std::vector<HomElement> args) { return cat.mult(args); };
  for (const auto& w : cat.composable_words(1)) {
    auto dd = m({m({basis_elt(w[0])})});
    if (!dd.coords.empty()) throw LeibnizFailure("differential does not square to zero on " + cat.letter_name(w[0]));
  }
  for (const auto& w : cat.composable_words(3)) {
    auto left = m({m({basis_elt(w[0]), basis_elt(w[1])}), basis_elt(w[2])});
    auto right = m({basis_elt(w[0]), m({basis_elt(w[1]), basis_elt(w[2])})});
    if (left.coords != right.coords) throw NotAssociative("composition is not associative on " + format_word(cat, w));
  }
  for (const auto& w : cat.composable_words(2)) {
    auto a = basis_elt(w[0]), b = basis_elt(w[1]);
    auto lhs = m({m({a, b})});
    auto rhs = m({m({a}), b});
    axpy(rhs.coords, sign_of(cat.degree(w[0])), m({a, m({b})}).coords);
    if (lhs.coords != rhs.coords) throw LeibnizFailure("Leibniz rule fails on " + format_word(cat, w));
  }
  return cat;
}

}  // namespace octcft
