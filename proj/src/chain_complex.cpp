#include "octcft/chain_complex.hpp"

#include <set>

namespace octcft {

std::size_t GradedSpace::add(int degree, std::string label) {
  auto& lk = lookup_[degree];
  if (lk.count(label))
    throw std::invalid_argument("duplicate basis label '" + label + "' in degree " +
                                std::to_string(degree));
  auto& comp = components_[degree];
  lk.emplace(label, comp.size());
  comp.push_back(std::move(label));
  return comp.size() - 1;
}

std::size_t GradedSpace::dim(int degree) const {
  auto it = components_.find(degree);
  return it == components_.end() ? 0 : it->second.size();
}

const std::vector<std::string>& GradedSpace::basis(int degree) const {
  static const std::vector<std::string> empty;
  auto it = components_.find(degree);
  return it == components_.end() ? empty : it->second;
}

std::optional<std::size_t> GradedSpace::index_of(int degree, const std::string& label) const {
  auto it = lookup_.find(degree);
  if (it == lookup_.end()) return std::nullopt;
  auto jt = it->second.find(label);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::vector<int> GradedSpace::degrees() const {
  std::vector<int> out;
  for (const auto& [k, v] : components_)
    if (!v.empty()) out.push_back(k);
  return out;
}

std::size_t GradedSpace::total_dim() const {
  std::size_t n = 0;
  for (const auto& [k, v] : components_) n += v.size();
  return n;
}

ChainComplex::ChainComplex(GradedSpace space, std::map<int, SparseMatrix> differentials,
                           std::map<int, Completeness> completeness)
    : space_(std::move(space)), completeness_(std::move(completeness)) {
  for (auto& [k, d] : differentials) {
    if (d.rows() != space_.dim(k - 1) || d.cols() != space_.dim(k))
      throw std::invalid_argument("differential d_" + std::to_string(k) + " has shape " +
                                  std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                                  ", expected " + std::to_string(space_.dim(k - 1)) + "x" +
                                  std::to_string(space_.dim(k)));
    if (!d.is_zero()) differentials_.emplace(k, std::move(d));
  }
}

SparseMatrix ChainComplex::differential(int k) const {
  auto it = differentials_.find(k);
  if (it != differentials_.end()) return it->second;
  return SparseMatrix(space_.dim(k - 1), space_.dim(k));
}

Completeness ChainComplex::completeness(int k) const {
  auto it = completeness_.find(k);
  return it == completeness_.end() ? Completeness::Complete : it->second;
}

namespace {

std::optional<DSquaredReport> check_pair(const ChainComplex& c, int k) {
  auto lower = c.differentials().find(k - 1);
  auto upper = c.differentials().find(k);
  if (lower == c.differentials().end() || upper == c.differentials().end()) return std::nullopt;
  SparseMatrix prod = lower->second * upper->second;
  if (prod.is_zero()) return std::nullopt;
  auto t = prod.triplets().front();
  return DSquaredReport{false, k, t.row, t.col, t.value};
}

}  // namespace

DSquaredReport verify_d_squared(const ChainComplex& c) {
  for (const auto& [k, d] : c.differentials())
    if (auto bad = check_pair(c, k)) return *bad;
  return {};
}

std::map<int, HomologyEntry> homology_dims(const ChainComplex& c, int lo, int hi) {
  for (int k = lo; k <= hi + 2; ++k)
    if (auto bad = check_pair(c, k))
      throw NotAComplex("d^2 != 0 at degree " + std::to_string(bad->failing_degree));
  std::map<int, std::size_t> ranks;
  auto rank_of = [&](int k) {
    auto it = ranks.find(k);
    if (it != ranks.end()) return it->second;
    std::size_t r = 0;
    auto dit = c.differentials().find(k);
    if (dit != c.differentials().end()) r = rank(dit->second);
    ranks.emplace(k, r);
    return r;
  };
  std::map<int, HomologyEntry> out;
  for (int k = lo; k <= hi; ++k) {
    HomologyEntry e;
    e.dim = c.dim(k) - rank_of(k) - rank_of(k + 1);
    e.flag = worst(c.completeness(k), worst(c.completeness(k - 1), c.completeness(k + 1)));
    out.emplace(k, e);
  }
  return out;
}

ChainComplex dual_complex(const ChainComplex& c) {
  GradedSpace dual;
  std::set<int> degs;
  for (int k : c.space().degrees()) {
    degs.insert(k);
    for (const auto& label : c.space().basis(k)) dual.add(-k, label);
  }
  std::map<int, SparseMatrix> diffs;
  // dual differential out of degree -k is built from d_{k+1}: C_{k+1} -> C_k
  for (const auto& [j, d] : c.differentials()) {
    const long k = j - 1;
    diffs.emplace(static_cast<int>(-k), d.transpose().scaled(sign_of(k * (k + 1) / 2)));
  }
  std::map<int, Completeness> flags;
  for (const auto& [k, f] : c.completeness_flags()) flags.emplace(-k, f);
  return ChainComplex(std::move(dual), std::move(diffs), std::move(flags));
}

std::optional<std::vector<Rational>> HomologyBasis::coordinates(const SparseVector& cycle) const {
  SparseMatrix reps = SparseMatrix::from_columns(ambient_dim, representatives);
  auto x = solve(reps.hconcat(boundaries), cycle);
  if (!x) return std::nullopt;
  std::vector<Rational> coords(representatives.size());
  for (const auto& [i, v] : *x)
    if (i < coords.size()) coords[i] = v;
  return coords;
}

HomologyBasis homology_basis(const ChainComplex& c, int k) {
  HomologyBasis hb;
  hb.degree = k;
  hb.ambient_dim = c.dim(k);
  hb.boundaries = c.differential(k + 1);
  auto cycles = kernel_basis(c.differential(k));
  SparseMatrix z = SparseMatrix::from_columns(hb.ambient_dim, cycles);
  SparseMatrix all = hb.boundaries.hconcat(z);
  for (std::size_t idx : independent_columns(all))
    if (idx >= hb.boundaries.cols()) hb.representatives.push_back(cycles[idx - hb.boundaries.cols()]);
  return hb;
}

}  // namespace octcft
