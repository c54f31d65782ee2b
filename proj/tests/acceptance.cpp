// Acceptance run: one PASS/FAIL line per criterion. Every comparison is an
// exact rational identity (tolerance 0); the only numeric limits are the
// wall-clock budgets printed with each line.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "octcft/cli.hpp"
#include "octcft/corpus.hpp"
#include "octcft/hochschild.hpp"
#include "octcft/surfcat.hpp"
#include "octcft/tcftops.hpp"

using namespace octcft;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kSurfcatBudget = 120.0;
constexpr double kOracleBudget = 60.0;
constexpr double kSuiteBudget = 600.0;

struct Outcome {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

int run_quiet(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

const CorpusEntry& entry(const std::string& name) {
  const auto* e = find_corpus_entry(name);
  if (!e) throw std::logic_error("missing corpus entry " + name);
  return *e;
}

std::shared_ptr<const AInftyCategory> category(const std::string& name) {
  return std::make_shared<const AInftyCategory>(build_category(entry(name).spec));
}

AlgebraSpec load_spec(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_algebra_spec(ss.str());
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t = Clock::now();
  std::string out;
  o.require(run_quiet({"surfcat-check", "--max-n", "7", "--alphabet", "2"}, &out) == 0,
            "surfcat-check --max-n 7 reported a surviving term");
  o.require(out.find("\"d_squared_shift_2\"") != std::string::npos, "shift 2 missing from the report");
  const double s = seconds_since(t);
  o.require(s < kSurfcatBudget, "over budget");
  o.note = (o.ok ? "" : o.note + "; ") + fmt(s) + " (limit " + fmt(kSurfcatBudget) + ")";
  return o;
}

Outcome criterion2(const std::string& data_dir) {
  Outcome o;
  std::size_t controls = 0;
  for (const auto& e : list_corpus()) {
    const auto cat = build_category(e.spec);
    const bool rel = check_ainfty_relations(cat, 6).ok;
    const bool plus = check_plus_boundary(cat, 6).ok;
    o.require(rel && plus, e.name + ": relations or plus boundary fail");
    // negative controls: every single-constant corruption
    for (std::size_t i = 0; i < e.spec.mults.size(); ++i) {
      auto bad = e.spec;
      bad.mults[i].coeff = bad.mults[i].coeff * Rational(2);
      const auto c = build_category(bad);
      const bool r = check_ainfty_relations(c, 6).ok;
      o.require(check_plus_boundary(c, 6).ok == r, e.name + ": verdicts differ after corrupting constant " +
                                                       std::to_string(i));
      controls += !r;
    }
  }
  // a genuine m_3, its sign flipped, and a sign fault in the action
  auto q = load_spec(data_dir + "/m3-quiver.json");
  const auto good = build_category(q);
  o.require(check_ainfty_relations(good, 6).ok && check_plus_boundary(good, 6).ok, "m3-quiver should pass");
  o.require(!check_plus_boundary(good, 6, SignFault{SignFault::Family::Disc, 3}).ok,
            "sign fault in the disc boundary not caught");
  for (auto& m : q.mults)
    if (m.inputs.size() == 3 && m.output == 0 && q.objects[m.inputs.back().target] == "4") m.coeff = -m.coeff;
  const auto flipped = build_category(q);
  o.require(!check_ainfty_relations(flipped, 6).ok && !check_plus_boundary(flipped, 6).ok,
            "flipped m_3 should fail both checks");
  controls += 2;
  if (o.ok) o.note = std::to_string(list_corpus().size()) + " entries, " + std::to_string(controls) +
                     " failing controls agree";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::size_t degrees = 0;
  for (const auto& e : list_corpus()) {
    const auto cat = build_category(e.spec);
    for (int L = 1; L <= 5; ++L) {
      const auto tc = build_tensor_complex(cat, L);
      const auto hc = build_normalized_complex(cat, L);
      const auto rep = compare_with_hochschild(tc, hc);
      o.require(rep.ok, e.name + " L=" + std::to_string(L) + ": " + rep.first_mismatch);
      for (const auto& d : rep.degrees) {
        if (d.flag != Completeness::Complete) continue;
        o.require(d.bijective && d.differential_agrees && d.mismatched_entries == 0,
                  e.name + " degree " + std::to_string(d.degree));
        ++degrees;
      }
    }
    std::string out;
    o.require(run_quiet({"equiv", e.name, "5"}, &out) == 0, "equiv " + e.name + " 5 failed");
  }
  if (o.ok) o.note = std::to_string(degrees) + " complete degrees, exact rational equality";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t = Clock::now();
  std::size_t compared = 0;
  for (const std::string name : {"ground-field", "dual-numbers", "matrix-2", "cyclic-group-3", "sphere-cohomology"}) {
    const auto& e = entry(name);
    const auto oracle = brute_force_hochschild_oracle(total_algebra(e.spec), 6);
    const auto hh = hh_dims(build_category(e.spec), 6, -6, 6);
    for (const auto& [k, h] : hh) {
      if (h.flag != Completeness::Complete || k > oracle.length_bound - 1) continue;
      const auto it = oracle.dims.find(k);
      const std::size_t want = it == oracle.dims.end() ? 0 : it->second;
      o.require(h.dim == want, name + " degree " + std::to_string(k) + ": " + std::to_string(h.dim) + " vs oracle " +
                                   std::to_string(want));
      ++compared;
    }
  }
  const double s = seconds_since(t);
  o.require(s < kOracleBudget, "over budget");
  o.note = (o.ok ? std::to_string(compared) + " degrees, " : o.note + "; ") + fmt(s) + " (limit " +
           fmt(kOracleBudget) + ")";
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& [name, d] : {std::pair<std::string, int>{"sphere-cohomology", 2}, {"matrix-2", 0}}) {
    const auto cat = category(name);
    const auto cy = build_cy(entry(name).spec, cat);
    o.require(cy && cy->dimension() == d, name + ": wrong dimension");
    if (!cy) continue;
    const auto rep = duality_check(*cy, 6, -5, 5);
    std::size_t complete = 0;
    for (const auto& x : rep.entries)
      if (x.complete) {
        ++complete;
        o.require(x.hh_dim == x.coh_dim, name + ": HH_" + std::to_string(x.degree) + " vs HH^" +
                                             std::to_string(d + x.degree));
      }
    o.require(rep.ok && complete >= 3, name + ": too few complete degrees");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const std::string name : {"dual-numbers", "matrix-2"}) {
    const auto cat = category(name);
    const auto hc = build_normalized_complex(*cat, 5);
    const auto B = connes_B(hc);
    const auto& cx = hc.complex();
    for (int k : B.exact) {
      if (B.exact.count(k + 1)) o.require((B.at(k + 1) * B.at(k)).is_zero(), name + ": B^2 != 0");
      const auto dB = cx.differential(k + 1) * B.at(k);
      const auto Bd = B.maps.count(k - 1) ? B.at(k - 1) * cx.differential(k) : SparseMatrix(cx.dim(k), cx.dim(k));
      o.require((dB + Bd).is_zero(), name + ": Bd + dB != 0 at degree " + std::to_string(k));
    }
    const auto rep = compare_b_operator(*cat, 5);
    o.require(rep.ok && rep.squares_to_zero && rep.anticommutes && rep.mismatched_degrees.empty() &&
                  !rep.compared_degrees.empty(),
              name + ": b_operator_via_annuli != connes_B");
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const auto& e : list_corpus()) {
    const auto cat = std::make_shared<const AInftyCategory>(build_category(e.spec));
    const auto cy = build_cy(e.spec, cat);
    if (!cy) continue;
    const auto table = coproduct(*cy, 5, -4, 4);
    for (const auto& [key, block] : table.blocks) {
      // HH_i -> HH_j (x) HH_k needs j + k = i - d
      const int k = key.first - cy->dimension() - key.second;
      o.require(table.chain_bases.count(k) > 0, e.name + ": block outside degree -d");
    }
    const auto rep = coassociativity_check(table);
    o.require(rep.ok && rep.compared > 0 && rep.nonzero_blocks > 0, e.name + ": " + rep.failure);
  }
  return o;
}

// Random complexes built as a direct sum of Q and (Q -> Q) pieces, then
// conjugated by random elementary row/column operations. Homology and ranks
// are known from the construction.
struct KnownComplex {
  ChainComplex complex;
  std::map<int, std::size_t> homology, ranks;
};

KnownComplex random_known_complex(std::mt19937& rng) {
  std::uniform_int_distribution<int> pieces(0, 3), val(-3, 3);
  const int lo = 0, hi = 4;
  std::map<int, std::size_t> dims, singles, pairs;  // pairs[k]: pieces C_k -> C_{k-1}
  for (int k = lo; k <= hi; ++k) singles[k] = pieces(rng);
  for (int k = lo + 1; k <= hi; ++k) pairs[k] = pieces(rng);
  for (int k = lo; k <= hi; ++k) dims[k] = singles[k] + pairs[k] + (k < hi ? pairs[k + 1] : 0);
  // basis of C_k: singles, then sources of pairs[k], then targets of pairs[k+1]
  std::map<int, SparseMatrix> d;
  for (int k = lo + 1; k <= hi; ++k) {
    SparseMatrix m(dims[k - 1], dims[k]);
    for (std::size_t p = 0; p < pairs[k]; ++p)
      m.set(singles[k - 1] + pairs[k - 1] + p, singles[k] + p, Rational(1));
    d.emplace(k, m);
  }
  // change of basis g_k on C_k: d_k -> g_{k-1} d_k g_k^{-1}, one elementary operation at a time
  for (int op = 0; op < 12; ++op) {
    const int k = std::uniform_int_distribution<int>(lo, hi)(rng);
    if (dims[k] < 2) continue;
    std::uniform_int_distribution<std::size_t> pick(0, dims[k] - 1);
    const std::size_t i = pick(rng), j = pick(rng);
    const int c = val(rng);
    if (i == j || c == 0) continue;
    // g = 1 + c E_ij: rows of d_k (out of degree k+1) get row_i += c row_j;
    // g^{-1} = 1 - c E_ij: columns of d_k get col_j -= c col_i
    if (d.count(k + 1)) {
      auto& m = d.at(k + 1);
      SparseMatrix e = SparseMatrix::identity(dims[k]);
      e.set(i, j, Rational(c));
      m = e * m;
    }
    if (d.count(k)) {
      auto& m = d.at(k);
      SparseMatrix e = SparseMatrix::identity(dims[k]);
      e.set(i, j, Rational(-c));
      m = m * e;
    }
  }
  GradedSpace space;
  for (int k = lo; k <= hi; ++k)
    for (std::size_t i = 0; i < dims[k]; ++i) space.add(k, "e" + std::to_string(k) + "_" + std::to_string(i));
  KnownComplex out{ChainComplex(space, d), {}, {}};
  for (int k = lo; k <= hi; ++k) out.homology[k] = singles[k];
  for (int k = lo + 1; k <= hi; ++k) out.ranks[k] = pairs[k];
  return out;
}

Outcome criterion8(const std::string& data_dir) {
  Outcome o;
  std::mt19937 rng(20261016);
  std::size_t perturbed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto kc = random_known_complex(rng);
    const auto& c = kc.complex;
    o.require(verify_d_squared(c).ok, "d^2 != 0 on a constructed complex");
    for (const auto& [k, r] : kc.ranks) {
      const auto m = c.differential(k);
      const auto ker = kernel_basis(m);
      o.require(rank(m) == r, "rank differs from construction");
      o.require(rank(m.transpose()) == r, "row rank != column rank");
      o.require(ker.size() + r == m.cols(), "rank + nullity != columns");
      for (const auto& v : ker) o.require(m.apply(v).empty(), "kernel vector not killed");
      o.require(rank(SparseMatrix::from_columns(m.cols(), ker)) == ker.size(), "kernel basis dependent");
    }
    const auto h = homology_dims(c, 0, 4);
    for (const auto& [k, e] : h) o.require(e.dim == kc.homology.at(k), "homology differs from construction");
    // perturb one entry of d_2 and compare with the product computed directly
    auto diffs = c.differentials();
    if (!diffs.count(2)) diffs.emplace(2, SparseMatrix(c.dim(1), c.dim(2)));
    auto& d2 = diffs.at(2);
    if (d2.rows() > 0 && d2.cols() > 0) {
      d2.add(0, 0, Rational(1));
      const ChainComplex bad(c.space(), diffs);
      bool zero = true;
      for (int k = 1; k <= 4; ++k) zero = zero && (bad.differential(k - 1) * bad.differential(k)).is_zero();
      o.require(verify_d_squared(bad).ok == zero, "verify_d_squared disagrees with the direct product");
      perturbed += !zero;
    }
  }
  o.require(perturbed > 0, "no perturbation broke d^2");

  // determinism and the exit-code contract
  const std::vector<std::vector<std::string>> cmds{{"validate", "matrix-2"},
                                                   {"hh", "dual-numbers", "--degrees", "0..3", "--b-operator"},
                                                   {"duality", "sphere-cohomology"},
                                                   {"equiv", "dual-numbers", "4"},
                                                   {"corpus", "run", "matrix-2"}};
  for (const auto& cmd : cmds) {
    std::string a, b;
    const int ca = run_quiet(cmd, &a), cb = run_quiet(cmd, &b);
    o.require(a == b && ca == cb, "non-deterministic output for " + cmd[0]);
    o.require(ca == 0, cmd[0] + " should exit 0");
  }
  o.require(run_quiet({"validate", data_dir + "/odd-unit.json"}) == 1, "unit of degree 1 must exit 1");
  o.require(run_quiet({"validate", data_dir + "/bad-rational.json"}) == 2, "1/0 must exit 2");
  o.require(run_quiet({"validate", data_dir + "/bad-reference.json"}) == 2, "bad reference must exit 2");
  o.require(run_quiet({"--strict", "hh", "dual-numbers", "--degrees", "0..7"}) == 1, "--strict must exit 1");
  if (o.ok) o.note = "200 random complexes, " + std::to_string(perturbed) + " perturbations caught";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : OCTCFT_TEST_DATA;
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sign-convention gate: d^2 = 0 on discs and annuli, n <= 7, 2 labels, d = 0, 1, 2", criterion1},
      {"A-infinity correspondence: act(dD+) = 0 iff the relations hold, arity <= 6, with negative controls",
       [&] { return criterion2(data_dir); }},
      {"D+(-,1) (x) B equals normalized Hochschild chains for all corpus entries, L <= 5", criterion3},
      {"normalized HH dims equal the un-normalized brute-force oracle at L = 6", criterion4},
      {"duality dim HH_i = dim HH^{d+i} for sphere-cohomology (d = 2) and matrix-2 (d = 0)", criterion5},
      {"B^2 = 0, Bd + dB = 0 and annulus B = connes_B on dual-numbers and matrix-2, L = 5", criterion6},
      {"coproduct is coassociative of degree -d on Calabi-Yau corpus entries", criterion7},
      {"d^2 and rank/kernel identities on 200 random instances; CLI determinism and exit codes",
       [&] { return criterion8(data_dir); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    all = all && o.ok;
    std::printf("%s [%zu] %s%s%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.note.empty() ? "" : " -- ", o.note.c_str());
    std::fflush(stdout);
  }
  const double total = seconds_since(start);
  std::printf("acceptance total %s (suite limit %s)\n", fmt(total).c_str(), fmt(kSuiteBudget).c_str());
  return all && total < kSuiteBudget ? 0 : 1;
}
