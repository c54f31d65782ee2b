#include "octcft/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "octcft/algebra_spec.hpp"
#include "octcft/corpus.hpp"
#include "octcft/hochschild.hpp"
#include "octcft/surfcat.hpp"
#include "octcft/tcftops.hpp"

namespace octcft {

namespace {

using ojson = nlohmann::ordered_json;

/// Bad command-line values and missing pieces of the input (exit 2).
struct InputError : std::runtime_error {
  InputError(const std::string& what, std::string h = "") : std::runtime_error(what), hint(std::move(h)) {}
  std::string hint;
};

struct Options {
  bool full = false;
  bool strict = false;
};

struct Input {
  std::string source;  // path or "corpus:<name>"
  std::string text;
  AlgebraSpec spec;
};

Input load_input(const std::string& target) {
  Input in;
  std::ifstream f(target, std::ios::binary);
  if (f) {
    std::ostringstream ss;
    ss << f.rdbuf();
    in.source = target;
    in.text = ss.str();
  } else if (const auto* e = find_corpus_entry(target)) {
    in.source = "corpus:" + e->name;
    in.text = e->source;
  } else {
    throw ResolutionError("'" + target + "' is neither a readable file nor a corpus entry", target);
  }
  in.spec = parse_algebra_spec(in.text);
  return in;
}

std::pair<int, int> parse_degrees(const std::string& s) {
  static const std::regex re(R"(^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw InputError("--degrees expects a..b, got '" + s + "'");
  const int lo = std::stoi(m[1]), hi = std::stoi(m[2]);
  if (lo > hi) throw InputError("--degrees: empty range " + s);
  return {lo, hi};
}

unsigned thread_count() {
  if (const char* v = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n >= 1) return static_cast<unsigned>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

class Report {
 public:
  Report(std::string command, const Options& opt) : opt_(opt) {
    doc_["tool"] = "octcft";
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
  }

  void input(const std::string& source, const std::string& text) {
    doc_["input"] = ojson{{"source", source}, {"digest", input_digest(text)}};
  }
  ojson& parameters() { return doc_["parameters"]; }
  ojson& summary() { return doc_["summary"]; }

  /// Adds a check; details beyond the first ten are elided unless --full.
  ojson& check(const std::string& name, bool ok, const std::vector<std::string>& details = {},
               const std::vector<std::string>& provenance = {}) {
    ojson c;
    c["name"] = name;
    c["verdict"] = verdict(ok);
    ojson d = ojson::array();
    const std::size_t cap = opt_.full ? details.size() : std::min<std::size_t>(details.size(), 10);
    for (std::size_t i = 0; i < cap; ++i) d.push_back(details[i]);
    if (cap < details.size()) d.push_back("... " + std::to_string(details.size() - cap) + " more (use --full)");
    c["details"] = d;
    c["degrees"] = ojson::array();
    c["provenance"] = provenance;
    all_ok_ = all_ok_ && ok;
    checks_.push_back(std::move(c));
    return checks_.back();
  }
  ojson& check(const CheckReport& r, const std::vector<std::string>& provenance = {}) {
    auto details = r.details;
    if (r.violation_count > r.details.size())
      details.push_back(std::to_string(r.violation_count) + " violations in total");
    return check(r.name, r.ok, details, provenance);
  }
  /// Marks a check failed after the fact (used by --strict).
  void fail(ojson& c, const std::string& why) {
    c["verdict"] = "fail";
    c["details"].push_back(why);
    all_ok_ = false;
  }
  bool ok() const { return all_ok_; }

  int finish(std::ostream& out) {
    doc_["checks"] = checks_;
    doc_["verdict"] = verdict(all_ok_);
    const int code = all_ok_ ? 0 : 1;
    doc_["exitCode"] = code;
    out << doc_.dump(2) << "\n";
    return code;
  }

 private:
  const Options& opt_;
  ojson doc_;
  std::vector<ojson> checks_;
  bool all_ok_ = true;
};

ojson completeness_row(int degree, std::size_t dim, Completeness flag) {
  return ojson{{"degree", degree}, {"dim", dim}, {"complete", flag == Completeness::Complete}};
}

std::size_t count_truncated(const ojson& rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n += !r.at("complete").get<bool>();
  return n;
}

void apply_strict(Report& rep, ojson& c, const Options& opt) {
  if (!opt.strict) return;
  if (const auto n = count_truncated(c["degrees"]); n > 0)
    rep.fail(c, std::to_string(n) + " truncated degree(s) under --strict");
}

/// Hom spaces, objects lexicographic, basis in declared order.
ojson hom_table(const AlgebraSpec& s) {
  std::vector<std::pair<ObjectId, ObjectId>> keys;
  for (const auto& [st, basis] : s.homs)
    if (!basis.empty()) keys.push_back(st);
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    return std::tie(s.objects[a.first], s.objects[a.second]) < std::tie(s.objects[b.first], s.objects[b.second]);
  });
  ojson rows = ojson::array();
  for (const auto& st : keys) {
    ojson basis = ojson::array();
    for (const auto& e : s.homs.at(st)) basis.push_back({{"name", e.name}, {"degree", e.degree}});
    rows.push_back({{"source", s.objects[st.first]}, {"target", s.objects[st.second]}, {"basis", basis}});
  }
  return rows;
}

std::vector<std::string> sorted_objects(const AlgebraSpec& s) {
  auto o = s.objects;
  std::sort(o.begin(), o.end());
  return o;
}

struct Built {
  std::shared_ptr<const AInftyCategory> cat;
  std::optional<CYStructure> cy;
};

Built build(const AlgebraSpec& s) {
  Built b;
  b.cat = std::make_shared<const AInftyCategory>(build_category(s));
  b.cy = build_cy(s, b.cat);
  return b;
}

/// The validate checks; returns whether all passed.
bool add_validation(Report& rep, const Built& b) {
  const bool before = rep.ok();
  const auto& cat = *b.cat;
  rep.check(check_ainfty_relations(cat, cat.max_arity()),
            {"A-infinity relations checked on every composable basis word up to arity " +
             std::to_string(cat.max_arity())});
  rep.check(check_units(cat), {"strict unit axioms on basis elements"});
  if (b.cy) {
    auto nd = check_nondegenerate(*b.cy);
    const bool nd_ok = nd.ok;
    rep.check(nd, {"pairing matrix per pair of objects, exact rank"});
    if (nd_ok) {
      rep.check(check_cyclic(*b.cy, cat.max_arity()),
                {"graded symmetry and cyclic identity up to arity " + std::to_string(cat.max_arity())});
    } else {
      rep.check("cyclic", false, {"skipped: the pairing is degenerate"});
    }
  }
  return before && rep.ok();
}

const char* kDgHint = "supply dg model: this operation needs m_n = 0 for n >= 3";

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& target, const Options& opt, std::ostream& out) {
  const Input in = load_input(target);
  Report rep("validate", opt);
  rep.input(in.source, in.text);
  rep.summary() = ojson{{"objects", sorted_objects(in.spec)}, {"homs", hom_table(in.spec)},
                        {"maxArity", in.spec.max_arity}, {"calabiYau", !in.spec.pairing.empty()}};
  add_validation(rep, build(in.spec));
  return rep.finish(out);
}

int cmd_hh(const std::string& target, int L, const std::optional<std::string>& degrees, bool cohomology,
           bool b_operator, const Options& opt, std::ostream& out) {
  if (L < 1) throw InputError("--max-length must be at least 1");
  const auto [lo, hi] = degrees ? parse_degrees(*degrees) : std::pair<int, int>{0, std::max(0, L - 2)};
  const Input in = load_input(target);
  Report rep("hh", opt);
  rep.input(in.source, in.text);
  rep.parameters() = ojson{{"maxLength", L}, {"degrees", {lo, hi}}, {"cohomology", cohomology},
                           {"bOperator", b_operator}};
  const Built b = build(in.spec);
  if (!add_validation(rep, b)) return rep.finish(out);

  const auto dims = hh_dims(*b.cat, L, lo, hi);
  auto& c = rep.check("hh", true, {},
                      {"normalized Hochschild chains of bar length <= " + std::to_string(L),
                       "rows flagged incomplete may change at a larger --max-length"});
  for (const auto& [k, e] : dims) c["degrees"].push_back(completeness_row(k, e.dim, e.flag));
  apply_strict(rep, c, opt);

  if (cohomology) {
    const auto cc = build_cochain_complex(*b.cat, L, CochainModel::Direct);
    const auto co = hh_cohomology_dims(cc, lo, hi);
    auto& cc_check = rep.check("hh_cohomology", true, {},
                               {"normalized cochains with values in the category, length <= " + std::to_string(L)});
    for (const auto& [k, e] : co) cc_check["degrees"].push_back(completeness_row(k, e.dim, e.flag));
    apply_strict(rep, cc_check, opt);
  }
  if (b_operator) {
    std::vector<std::string> details;
    bool ok = true;
    // annuli with L + 1 points act through m_{L+1}; stay within the arity bound
    const int Lb = std::min(L, b.cat->max_arity() - 1);
    if (Lb < L) details.push_back("annulus comparison run at length bound " + std::to_string(Lb));
    try {
      const auto r = compare_b_operator(*b.cat, Lb);
      ok = r.ok;
      if (!r.squares_to_zero) details.push_back("B^2 != 0");
      if (!r.anticommutes) details.push_back("Bd + dB != 0");
      for (int k : r.mismatched_degrees)
        details.push_back("annulus operator differs from connes_B out of degree " + std::to_string(k));
      std::ostringstream compared;
      for (int k : r.compared_degrees) compared << (compared.tellp() > 0 ? "," : "") << k;
      details.push_back("compared degrees: " + compared.str());
    } catch (const ComparisonUnavailable& e) {
      ok = false;
      details.push_back(e.what());
    }
    rep.check("b_operator", ok, details,
              {"B^2 = 0 and Bd + dB = 0 on exact degrees; basepoint sweep over annuli equals connes_B as matrices"});
  }
  return rep.finish(out);
}

int cmd_duality(const std::string& target, int L, const std::optional<std::string>& degrees, const Options& opt,
                std::ostream& out) {
  if (L < 1) throw InputError("--max-length must be at least 1");
  const Input in = load_input(target);
  const Built b = build(in.spec);
  if (!b.cy) throw InputError("duality needs a pairing and a dimension in the input");
  const int d = b.cy->dimension();
  const auto [lo, hi] = degrees ? parse_degrees(*degrees) : std::pair<int, int>{-d, std::max(-d, L - 2 - d)};
  Report rep("duality", opt);
  rep.input(in.source, in.text);
  rep.parameters() = ojson{{"maxLength", L}, {"degrees", {lo, hi}}, {"dimension", d}};
  if (!add_validation(rep, b)) return rep.finish(out);
  const auto r = duality_check(*b.cy, L, lo, hi);
  std::vector<std::string> details;
  for (const auto& e : r.entries)
    if (e.complete && !e.agree)
      details.push_back("dim HH_" + std::to_string(e.degree) + " = " + std::to_string(e.hh_dim) + " but dim HH^" +
                        std::to_string(d + e.degree) + " = " + std::to_string(e.coh_dim));
  auto& c = rep.check("duality", r.ok, details,
                      {"dim HH_i against dim HH^{d+i}; only complete rows are compared"});
  for (const auto& e : r.entries)
    c["degrees"].push_back(ojson{{"degree", e.degree},
                                 {"dim", e.hh_dim},
                                 {"dualDegree", d + e.degree},
                                 {"dualDim", e.coh_dim},
                                 {"complete", e.complete},
                                 {"agree", e.agree}});
  apply_strict(rep, c, opt);
  return rep.finish(out);
}

int cmd_surfcat(std::size_t max_n, const std::optional<int>& shift, std::size_t alphabet, const Options& opt,
                std::ostream& out) {
  if (max_n < 1 || max_n > 9) throw InputError("--max-n must be between 1 and 9");
  if (alphabet < 1 || alphabet > 4) throw InputError("--alphabet must be between 1 and 4");
  std::vector<int> shifts = shift ? std::vector<int>{*shift} : std::vector<int>{0, 1, 2};
  Report rep("surfcat-check", opt);
  std::ostringstream params;
  params << "max-n=" << max_n << ";alphabet=" << alphabet << ";shifts=";
  for (int d : shifts) params << d << ",";
  rep.input("parameters", params.str());
  rep.parameters() = ojson{{"maxN", max_n}, {"alphabet", alphabet}, {"shifts", shifts}};
  const unsigned threads = thread_count();
  for (int d : shifts) {
    const auto r = check_d_squared(max_n, d, alphabet, {}, threads);
    std::vector<std::string> details;
    if (!r.ok) details.push_back("first failure at arity " + std::to_string(*r.first_failing_arity) + ": " +
                                 r.first_failure);
    auto& c = rep.check("d_squared_shift_" + std::to_string(d), r.ok, details,
                        {"d^2 on discs D(l) (n >= 3) and annuli A(l) (n >= 1) for all label sequences, "
                         "as fully reduced chains"});
    for (std::size_t n = 1; n <= max_n; ++n) {
      ojson row{{"arity", n}};
      for (const auto* fam : {&r.discs, &r.annuli}) {
        const char* key = fam == &r.discs ? "discs" : "annuli";
        auto it = std::find_if(fam->begin(), fam->end(), [&](const SurfArityStats& s) { return s.arity == n; });
        if (it == fam->end()) continue;
        row[key] = ojson{{"sequences", it->sequences},
                         {"boundaryTerms", it->boundary_terms},
                         {"squareTerms", it->square_terms},
                         {"surviving", it->surviving}};
      }
      row["complete"] = true;
      c["degrees"].push_back(row);
    }
  }
  return rep.finish(out);
}

int cmd_equiv(const std::string& target, int L, const Options& opt, std::ostream& out) {
  if (L < 1) throw InputError("length bound must be at least 1");
  const Input in = load_input(target);
  Report rep("equiv", opt);
  rep.input(in.source, in.text);
  rep.parameters() = ojson{{"maxLength", L}};
  const Built b = build(in.spec);
  if (!add_validation(rep, b)) return rep.finish(out);

  const auto tc = build_tensor_complex(*b.cat, L);
  const auto hc = build_normalized_complex(*b.cat, L);
  const auto cmp = compare_with_hochschild(tc, hc);
  std::vector<std::string> details;
  if (!cmp.first_mismatch.empty()) details.push_back(cmp.first_mismatch);
  auto& c = rep.check("tensor_vs_hochschild", cmp.ok, details,
                      {"D+(-,1) (x) B against normalized Hochschild chains, exact rational matrices",
                       "generator bijection carries the sign (-1)^{sum_i (n-1-i)|phi_i|}"});
  for (const auto& d : cmp.degrees) {
    ojson suspects = ojson::array();
    for (auto f : d.suspects) suspects.push_back(family_name(f));
    c["degrees"].push_back(ojson{{"degree", d.degree},
                                 {"tensorDim", d.tensor_dim},
                                 {"hochschildDim", d.hochschild_dim},
                                 {"bijective", d.bijective},
                                 {"differentialAgrees", d.differential_agrees},
                                 {"complete", d.flag == Completeness::Complete},
                                 {"mismatchedEntries", d.mismatched_entries},
                                 {"suspects", suspects}});
  }
  ojson witness = ojson::array();
  for (int k : tc.complex().space().degrees())
    for (const auto& g : tc.generators(k)) {
      if (!hc.index_of(g.letters)) continue;
      witness.push_back(ojson{{"degree", k},
                              {"tensor", tc.label(g)},
                              {"hochschild", hc.label(g.letters)},
                              {"sign", bijection_sign(tc.category(), g.letters)}});
    }
  c["bijection"] = witness;
  apply_strict(rep, c, opt);

  std::vector<std::string> bdetails;
  bool bok = false;
  try {
    const auto r = compare_b_operator(*b.cat, L);
    bok = r.ok;
    if (!r.squares_to_zero) bdetails.push_back("B^2 != 0");
    if (!r.anticommutes) bdetails.push_back("Bd + dB != 0");
    for (int k : r.mismatched_degrees) bdetails.push_back("mismatch out of degree " + std::to_string(k));
  } catch (const ComparisonUnavailable& e) {
    bdetails.push_back(e.what());
  }
  rep.check("b_operator", bok, bdetails, {"basepoint sweep over annuli against connes_B"});
  return rep.finish(out);
}

int cmd_corpus_list(const Options& opt, std::ostream& out) {
  Report rep("corpus list", opt);
  ojson entries = ojson::array();
  std::string all;
  for (const auto& e : list_corpus()) {
    ojson checks = ojson::array();
    for (const auto& x : e.expected) checks.push_back(x.check);
    entries.push_back(ojson{{"name", e.name},
                            {"description", e.spec.description},
                            {"objects", sorted_objects(e.spec)},
                            {"calabiYau", !e.spec.pairing.empty()},
                            {"digest", input_digest(e.source)},
                            {"checks", checks}});
    all += e.source;
  }
  rep.input("corpus", all);
  rep.summary() = ojson{{"entries", entries}};
  return rep.finish(out);
}

// Runs one expected check of a corpus entry; returns the actual value.
ojson run_expected(const ExpectedValue& x, const Built& b, std::vector<std::string>& notes, ojson& rows) {
  const auto args = nlohmann::json::parse(x.args_json);
  const auto& cat = *b.cat;
  if (x.check == "validate") {
    bool ok = check_ainfty_relations(cat, cat.max_arity()).ok && check_units(cat).ok;
    if (b.cy) ok = ok && check_nondegenerate(*b.cy).ok && check_cyclic(*b.cy, cat.max_arity()).ok;
    return verdict(ok);
  }
  if (x.check == "hh") {
    const int L = args.at("maxLength");
    const int lo = args.at("degrees")[0], hi = args.at("degrees")[1];
    ojson value = ojson::object();
    for (const auto& [k, e] : hh_dims(cat, L, lo, hi)) {
      value[std::to_string(k)] = e.dim;
      rows.push_back(completeness_row(k, e.dim, e.flag));
      if (e.flag != Completeness::Complete) notes.push_back("degree " + std::to_string(k) + " is truncated");
    }
    return value;
  }
  if (x.check == "plus-boundary") {
    const int n = args.at("maxArity");
    const bool plus = check_plus_boundary(cat, n).ok;
    const bool rel = check_ainfty_relations(cat, n).ok;
    if (plus != rel) notes.push_back("act_on_module(dD+) and check_ainfty_relations disagree");
    return plus == rel ? verdict(plus) : "fail";
  }
  if (x.check == "equiv") return verdict(compare_with_hochschild(cat, args.at("maxLength")).ok);
  if (x.check == "b-operator") return verdict(compare_b_operator(cat, args.at("maxLength")).ok);
  if (x.check == "duality" || x.check == "coproduct") {
    if (!b.cy) throw std::logic_error("corpus check " + x.check + " needs a pairing");
    const int L = args.at("maxLength");
    const int lo = args.at("degrees")[0], hi = args.at("degrees")[1];
    if (x.check == "duality") return verdict(duality_check(*b.cy, L, lo, hi).ok);
    const auto r = coassociativity_check(coproduct(*b.cy, L, lo, hi));
    if (!r.failure.empty()) notes.push_back(r.failure);
    notes.push_back(std::to_string(r.compared) + " coassociativity squares compared");
    return verdict(r.ok && r.nonzero_blocks > 0 && r.compared > 0);
  }
  throw std::logic_error("unknown corpus check " + x.check);
}

int cmd_corpus_run(const std::string& name, const Options& opt, std::ostream& out) {
  const auto* e = find_corpus_entry(name);
  if (!e) throw ResolutionError("unknown corpus entry '" + name + "'", name);
  Report rep("corpus run", opt);
  rep.input("corpus:" + e->name, e->source);
  const Built b = build(e->spec);
  for (const auto& x : e->expected) {
    std::vector<std::string> notes;
    ojson rows = ojson::array();
    const ojson actual = run_expected(x, b, notes, rows);
    const ojson expected = ojson::parse(x.value_json);
    // object member order is irrelevant here
    const bool same = nlohmann::json::parse(actual.dump()) == nlohmann::json::parse(x.value_json);
    const bool ok = same && count_truncated(rows) == 0;
    std::vector<std::string> details = notes;
    if (!same) details.insert(details.begin(), "expected " + expected.dump() + ", got " + actual.dump());
    auto& c = rep.check(x.check, ok, details, {x.provenance + ": " + x.oracle});
    c["degrees"] = rows;
    c["expected"] = expected;
    c["actual"] = actual;
    c["arguments"] = ojson::parse(x.args_json);
  }
  return rep.finish(out);
}

ojson error_report(const std::string& kind, const std::string& message) {
  ojson doc;
  doc["tool"] = "octcft";
  doc["version"] = kToolVersion;
  doc["error"] = ojson{{"kind", kind}, {"message", message}};
  doc["verdict"] = "error";
  doc["exitCode"] = 2;
  return doc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"octcft: open TCFT / A-infinity toolkit with exact rational arithmetic", "octcft"};
  app.set_version_flag("--version", kToolVersion);
  app.fallthrough();
  app.require_subcommand(1);
  Options opt;
  bool json_flag = false;
  app.add_flag("--json", json_flag, "JSON report on stdout (the default and only format)");
  app.add_flag("--full", opt.full, "do not elide long detail lists");
  app.add_flag("--strict", opt.strict, "treat truncated degrees as failures");

  std::string target;
  int L = 6;
  std::optional<std::string> degrees;
  bool cohomology = false, b_op = false;
  std::size_t max_n = 7, alphabet = 2;
  std::optional<int> shift;

  auto* validate = app.add_subcommand("validate", "check the A-infinity, unit and Calabi-Yau axioms");
  validate->add_option("spec", target, "algebra document (path or corpus entry name)")->required();

  auto* hh = app.add_subcommand("hh", "Hochschild homology dimensions");
  hh->add_option("spec", target, "algebra document (path or corpus entry name)")->required();
  hh->add_option("--max-length", L, "bar length bound L")->capture_default_str();
  hh->add_option("--degrees", degrees, "degree range a..b (default 0..L-2)");
  hh->add_flag("--cohomology", cohomology, "also report HH^k for k in the range");
  hh->add_flag("--b-operator", b_op, "verify Connes' B and its annulus description");

  auto* duality = app.add_subcommand("duality", "dim HH_i = dim HH^{d+i} for Calabi-Yau input");
  duality->add_option("spec", target, "algebra document with a pairing")->required();
  duality->add_option("--max-length", L, "bar length bound L")->capture_default_str();
  duality->add_option("--degrees", degrees, "range of i as a..b (default -d..L-2-d)");

  auto* surf = app.add_subcommand("surfcat-check", "d^2 = 0 on disc and annulus generators");
  surf->add_option("--max-n", max_n, "largest number of boundary points")->capture_default_str();
  surf->add_option("--shift", shift, "node shift d (default: 0, 1 and 2)");
  surf->add_option("--alphabet", alphabet, "number of labels")->capture_default_str();

  int equiv_L = 5;
  auto* equiv = app.add_subcommand("equiv", "D+(-,1) (x) B against normalized Hochschild chains");
  equiv->add_option("spec", target, "corpus entry name or algebra document")->required();
  equiv->add_option("L", equiv_L, "length bound")->capture_default_str();

  std::string corpus_name;
  auto* corpus = app.add_subcommand("corpus", "built-in example categories");
  corpus->fallthrough();
  corpus->require_subcommand(1);
  auto* clist = corpus->add_subcommand("list", "list entries");
  auto* crun = corpus->add_subcommand("run", "run every shipped check of an entry against its expected values");
  crun->add_option("name", corpus_name, "entry name")->required();
  clist->fallthrough();
  crun->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return cmd_validate(target, opt, out);
    if (*hh) return cmd_hh(target, L, degrees, cohomology, b_op, opt, out);
    if (*duality) return cmd_duality(target, L, degrees, opt, out);
    if (*surf) return cmd_surfcat(max_n, shift, alphabet, opt, out);
    if (*equiv) return cmd_equiv(target, equiv_L, opt, out);
    if (*clist) return cmd_corpus_list(opt, out);
    if (*crun) return cmd_corpus_run(corpus_name, opt, out);
  } catch (const ParseError& e) {
    auto doc = error_report("ParseError", e.what());
    doc["error"]["line"] = e.line;
    doc["error"]["column"] = e.column;
    out << doc.dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const ResolutionError& e) {
    auto doc = error_report("ResolutionError", e.what());
    doc["error"]["reference"] = e.reference;
    out << doc.dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const HigherMultiplication& e) {
    auto doc = error_report("HigherMultiplication", e.what());
    doc["error"]["hint"] = kDgHint;
    out << doc.dump(2) << "\n";
    err << "octcft: " << e.what() << " (" << kDgHint << ")\n";
    return 2;
  } catch (const InputError& e) {
    auto doc = error_report("InputError", e.what());
    if (!e.hint.empty()) doc["error"]["hint"] = e.hint;
    out << doc.dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const InvalidStructure& e) {
    out << error_report("InvalidStructure", e.what()).dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const ArityTooLarge& e) {
    out << error_report("ArityTooLarge", e.what()).dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const ArityExceedsBound& e) {
    out << error_report("ArityExceedsBound", e.what()).dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  } catch (const SizeExceeded& e) {
    out << error_report("SizeExceeded", e.what()).dump(2) << "\n";
    err << "octcft: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace octcft
